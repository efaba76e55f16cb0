#pragma once

// Column kernels behind farm_step and resolve_wind_field. Columns do not
// interact, so each kernel has a serial reference and an OpenMP version
// parallel over columns; the two must agree bit for bit.

#include <span>
#include <vector>

#include "hybridsim/wind_farm.hpp"

namespace hybridsim::kernels {

struct TurbineStepOutputs {
    std::vector<TurbineState> state;
    std::vector<double> power;      // at the new rotor speed and end-of-step wind
    std::vector<double> tsr;        // same
    std::vector<double> torque;
    std::vector<unsigned char> infeasible;

    void resize(std::size_t n);
};

// u_inf minus the root-sum-square of upstream deficits, floored at u_min.
// Reads wind and induction of the upstream turbines from field.
double waked_wind(const WindFarm& farm, std::size_t j, double u_inf, const WindField& field);

// Advance one turbine one step with its torque and wind held constant.
// u_next is the turbine's effective wind at the end of the step.
void step_turbine(const WindFarm& farm, std::size_t j, const TurbineState& in, double u_eff,
                  double u_next, double p_setpoint, double dt, TurbineStepOutputs& out);

// Step one column front to back. `now` receives the wind field at the start
// of the step; `next` the field produced by the new rotor speeds, whose
// difference feeds each turbine's barrier row as the wind rate.
void step_column(const WindFarm& farm, int col, double u_inf, std::span<const TurbineState> in,
                 double p_setpoint, double dt, TurbineStepOutputs& out, WindField& now,
                 WindField& next);

void step_columns_serial(const WindFarm& farm, double u_inf, std::span<const TurbineState> in,
                         double p_setpoint, double dt, TurbineStepOutputs& out, WindField& now,
                         WindField& next);
void step_columns_omp(const WindFarm& farm, double u_inf, std::span<const TurbineState> in,
                      double p_setpoint, double dt, TurbineStepOutputs& out, WindField& now,
                      WindField& next);

// Resolve one column of the wake field, upstream to downstream. If
// inductions is non-empty it is used as given; otherwise each turbine's
// induction is computed from C_T at its tip-speed ratio.
void sweep_column(const WindFarm& farm, int col, double u_inf,
                  std::span<const TurbineState> turbines, std::span<const double> inductions,
                  WindField& field);

void sweep_columns_serial(const WindFarm& farm, double u_inf,
                          std::span<const TurbineState> turbines,
                          std::span<const double> inductions, WindField& field);
void sweep_columns_omp(const WindFarm& farm, double u_inf,
                       std::span<const TurbineState> turbines,
                       std::span<const double> inductions, WindField& field);

}  // namespace hybridsim::kernels
