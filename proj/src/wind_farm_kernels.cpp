#include "wind_farm_kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>

namespace hybridsim::kernels {

namespace {

void reset_field(WindField& field, std::size_t n, double u_inf)
{
    field.wind.assign(n, u_inf);
    field.induction.assign(n, 0.0);
}

// Runs body(col) for every column, in parallel when requested. Exceptions
// must not escape an OpenMP region, so the first one is captured and rethrown.
template <typename Body>
void for_each_column(int n_cols, bool parallel, Body&& body)
{
    if (!parallel) {
        for (int c = 0; c < n_cols; ++c) body(c);
        return;
    }
    std::exception_ptr failure;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < n_cols; ++c) {
        try {
            body(c);
        } catch (...) {
#pragma omp critical(hybridsim_column_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

void TurbineStepOutputs::resize(std::size_t n)
{
    state.resize(n);
    power.resize(n);
    tsr.resize(n);
    torque.resize(n);
    infeasible.resize(n);
}

double waked_wind(const WindFarm& farm, std::size_t j, double u_inf, const WindField& field)
{
    const FarmLayout& layout = farm.layout;
    double sum_sq = 0.0;
    for (const std::size_t i : layout.upstream[j]) {
        const double dist = layout.streamwise_position(j) - layout.streamwise_position(i);
        const double du = wake_deficit(field.wind[i], field.induction[i], dist,
                                       farm.turbine.rotor_radius, layout.k_w);
        sum_sq += du * du;
    }
    return std::max(u_inf - std::sqrt(sum_sq), layout.u_min);
}

void step_turbine(const WindFarm& farm, std::size_t j, const TurbineState& in, double u_eff,
                  double u_next, double p_setpoint, double dt, TurbineStepOutputs& out)
{
    const TurbineParams& tp = farm.turbine;
    const WindControllerParams& ctrl = farm.control;
    TorqueCommand cmd = torque_safe(tp, ctrl, in, u_eff, p_setpoint, (u_next - u_eff) / dt);

    const auto advance = [&](double torque) {
        const auto rhs = [&](const std::array<double, 1>& x) {
            // Stage evaluations may dip below the floor on aggressive braking;
            // the dynamics are only defined for positive rotor speed.
            const double w = std::max(x[0], ctrl.omega_floor);
            return std::array<double, 1>{rotor_acceleration(tp, w, u_eff, torque)};
        };
        const auto next = integrate_step(std::array<double, 1>{in.omega_r}, rhs, dt);
        return std::max(next[0], ctrl.omega_floor);
    };
    double omega = advance(cmd.torque);

    // The row above holds at the start of the step only. Over the held step,
    // enforce the sampled barrier b(t + dt) >= b(t) e^{-c_w dt} directly; the
    // end speed decreases with torque, so the smallest admissible torque is
    // found by bisection.
    const double lambda_now = tip_speed_ratio(tp, in.omega_r, u_eff);
    const double lambda_cap =
        ctrl.lambda_barrier + (lambda_now - ctrl.lambda_barrier) * std::exp(-ctrl.barrier_slope * dt);
    const double omega_cap = lambda_cap * u_next / tp.rotor_radius;
    if (!cmd.infeasible && omega > omega_cap) {
        double lo = cmd.torque;
        double hi = ctrl.torque_max;
        double omega_hi = advance(hi);
        if (omega_hi > omega_cap) {
            cmd.torque = hi;
            cmd.infeasible = true;
            omega = omega_hi;
        } else {
            for (int it = 0; it < 100 && hi - lo > 1e-9 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double w = advance(mid);
                if (w > omega_cap) {
                    lo = mid;
                } else {
                    hi = mid;
                    omega_hi = w;
                }
            }
            cmd.torque = hi;
            omega = omega_hi;
        }
    }

    out.state[j] = TurbineState{omega};
    out.torque[j] = cmd.torque;
    out.infeasible[j] = cmd.infeasible ? 1 : 0;
}

void step_column(const WindFarm& farm, int col, double u_inf, std::span<const TurbineState> in,
                 double p_setpoint, double dt, TurbineStepOutputs& out, WindField& now,
                 WindField& next)
{
    const TurbineParams& tp = farm.turbine;
    for (int row = 0; row < farm.layout.n_rows; ++row) {
        const std::size_t j = farm.layout.index(row, col);
        now.wind[j] = waked_wind(farm, j, u_inf, now);
        now.induction[j] =
            axial_induction(tp.ct_curve(tip_speed_ratio(tp, in[j].omega_r, now.wind[j])));
        // Upstream turbines are already stepped, so the end-of-step wind here
        // is known exactly.
        next.wind[j] = waked_wind(farm, j, u_inf, next);
        step_turbine(farm, j, in[j], now.wind[j], next.wind[j], p_setpoint, dt, out);

        const double omega = out.state[j].omega_r;
        out.tsr[j] = tip_speed_ratio(tp, omega, next.wind[j]);
        out.power[j] = aero_power(tp, omega, next.wind[j]);
        next.induction[j] = axial_induction(tp.ct_curve(out.tsr[j]));
    }
}

void step_columns_serial(const WindFarm& farm, double u_inf, std::span<const TurbineState> in,
                         double p_setpoint, double dt, TurbineStepOutputs& out, WindField& now,
                         WindField& next)
{
    out.resize(in.size());
    reset_field(now, in.size(), u_inf);
    reset_field(next, in.size(), u_inf);
    for_each_column(farm.layout.n_cols, false, [&](int c) {
        step_column(farm, c, u_inf, in, p_setpoint, dt, out, now, next);
    });
}

void step_columns_omp(const WindFarm& farm, double u_inf, std::span<const TurbineState> in,
                      double p_setpoint, double dt, TurbineStepOutputs& out, WindField& now,
                      WindField& next)
{
    out.resize(in.size());
    reset_field(now, in.size(), u_inf);
    reset_field(next, in.size(), u_inf);
    for_each_column(farm.layout.n_cols, true, [&](int c) {
        step_column(farm, c, u_inf, in, p_setpoint, dt, out, now, next);
    });
}

void sweep_column(const WindFarm& farm, int col, double u_inf,
                  std::span<const TurbineState> turbines, std::span<const double> inductions,
                  WindField& field)
{
    for (int row = 0; row < farm.layout.n_rows; ++row) {
        const std::size_t j = farm.layout.index(row, col);
        field.wind[j] = waked_wind(farm, j, u_inf, field);
        if (!inductions.empty()) {
            field.induction[j] = inductions[j];
        } else {
            const double tsr = tip_speed_ratio(farm.turbine, turbines[j].omega_r, field.wind[j]);
            field.induction[j] = axial_induction(farm.turbine.ct_curve(tsr));
        }
    }
}

void sweep_columns_serial(const WindFarm& farm, double u_inf,
                          std::span<const TurbineState> turbines,
                          std::span<const double> inductions, WindField& field)
{
    reset_field(field, farm.layout.size(), u_inf);
    for_each_column(farm.layout.n_cols, false, [&](int c) {
        sweep_column(farm, c, u_inf, turbines, inductions, field);
    });
}

void sweep_columns_omp(const WindFarm& farm, double u_inf,
                       std::span<const TurbineState> turbines,
                       std::span<const double> inductions, WindField& field)
{
    reset_field(field, farm.layout.size(), u_inf);
    for_each_column(farm.layout.n_cols, true, [&](int c) {
        sweep_column(farm, c, u_inf, turbines, inductions, field);
    });
}

}  // namespace hybridsim::kernels
