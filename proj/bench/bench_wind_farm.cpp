// Serial reference versus OpenMP column kernels on square farms of growing size.
#include <benchmark/benchmark.h>

#include "hybridsim/wind_farm.hpp"
#include "wind_farm_kernels.hpp"

using namespace hybridsim;

namespace {

WindFarm make_farm(int side)
{
    WindFarm farm;
    farm.turbine = default_turbine_params();
    farm.control = default_wind_controller(farm.turbine);
    farm.layout = FarmLayout::rectangular(side, side, 7.0 * 2.0 * farm.turbine.rotor_radius, 0.04);
    return farm;
}

template <bool Parallel>
void BM_Sweep(benchmark::State& st)
{
    const WindFarm farm = make_farm(static_cast<int>(st.range(0)));
    const FarmState s = initialize_farm(farm, 11.0, 6.5);
    WindField field;
    for (auto _ : st) {
        if constexpr (Parallel) {
            kernels::sweep_columns_omp(farm, 11.0, s.turbines, {}, field);
        } else {
            kernels::sweep_columns_serial(farm, 11.0, s.turbines, {}, field);
        }
        benchmark::DoNotOptimize(field.wind.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(farm.layout.size()));
}

template <bool Parallel>
void BM_StepColumns(benchmark::State& st)
{
    const WindFarm farm = make_farm(static_cast<int>(st.range(0)));
    const FarmState s = initialize_farm(farm, 11.0, 6.5);
    kernels::TurbineStepOutputs out;
    WindField now;
    WindField next;
    for (auto _ : st) {
        if constexpr (Parallel) {
            kernels::step_columns_omp(farm, 11.0, s.turbines, 3.0e6, 0.5, out, now, next);
        } else {
            kernels::step_columns_serial(farm, 11.0, s.turbines, 3.0e6, 0.5, out, now, next);
        }
        benchmark::DoNotOptimize(out.power.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(farm.layout.size()));
}

template <Execution E>
void BM_FarmStep(benchmark::State& st)
{
    const WindFarm farm = make_farm(static_cast<int>(st.range(0)));
    const FarmState s = initialize_farm(farm, 11.0, 6.5);
    const double sp = 0.5 * farm_available_power(11.0, farm.turbine, farm.layout.size());
    for (auto _ : st) {
        FarmStepResult r = farm_step(farm, s, 11.0, sp, 0.5, E);
        benchmark::DoNotOptimize(r.total_power);
    }
}

}  // namespace

BENCHMARK(BM_Sweep<false>)->Name("sweep/serial")->RangeMultiplier(2)->Range(4, 64);
BENCHMARK(BM_Sweep<true>)->Name("sweep/omp")->RangeMultiplier(2)->Range(4, 64);
BENCHMARK(BM_StepColumns<false>)->Name("step/serial")->RangeMultiplier(2)->Range(4, 64);
BENCHMARK(BM_StepColumns<true>)->Name("step/omp")->RangeMultiplier(2)->Range(4, 64);
BENCHMARK(BM_FarmStep<Execution::Serial>)->Name("farm_step/serial")->RangeMultiplier(2)->Range(4, 64);
BENCHMARK(BM_FarmStep<Execution::Parallel>)->Name("farm_step/omp")->RangeMultiplier(2)->Range(4, 64);

BENCHMARK_MAIN();
