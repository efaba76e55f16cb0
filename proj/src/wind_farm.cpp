#include "hybridsim/wind_farm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wind_farm_kernels.hpp"

namespace hybridsim {

namespace {

constexpr double kBetzLimit = 16.0 / 27.0;

// Curve shape qualitatively follows the NREL 5 MW zero-pitch C_p surface:
// dead below lambda = 2, peak 0.48 at 7.55, falling off past the peak.
const std::vector<double> kCpLambda = {0.0, 1.0, 2.0,  3.0,  4.0,  5.0,  6.0,  7.0,  7.55,
                                       8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0};
const std::vector<double> kCpValue = {0.0,   0.0,  0.0,  0.10, 0.22, 0.33, 0.42, 0.47, 0.48,
                                      0.478, 0.46, 0.43, 0.39, 0.34, 0.28, 0.21, 0.13};

const std::vector<double> kCtLambda = {0.0, 2.0, 3.0, 4.0, 5.0,  6.0,
                                       7.0, 8.0, 9.0, 10.0, 12.0, 15.0};
const std::vector<double> kCtValue = {0.0,  0.10, 0.25, 0.40, 0.55, 0.66,
                                      0.74, 0.80, 0.85, 0.89, 0.94, 0.97};

}  // namespace

PiecewiseLinear default_cp_curve() { return {kCpLambda, kCpValue}; }
PiecewiseLinear default_ct_curve() { return {kCtLambda, kCtValue}; }

void TurbineParams::validate() const
{
    if (!(rotor_inertia > 0.0)) throw ValidationError("rotor_inertia > 0");
    if (!(rotor_radius > 0.0)) throw ValidationError("rotor_radius > 0");
    if (!(air_density > 0.0)) throw ValidationError("air_density > 0");
    if (!(rated_power > 0.0)) throw ValidationError("rated_power > 0");
    const double area = std::numbers::pi * rotor_radius * rotor_radius;
    if (std::abs(swept_area - area) > 1e-9 * area) {
        throw ValidationError("swept_area = pi * rotor_radius^2");
    }
    if (cp_curve.xs().empty() || ct_curve.xs().empty()) {
        throw ValidationError("cp_curve and ct_curve must be provided");
    }
    if (cp_curve.min_value() < 0.0 || cp_curve.max_value() > kBetzLimit) {
        throw ValidationError("cp_curve values within [0, 16/27]");
    }
    if (ct_curve.min_value() < 0.0 || !(ct_curve.max_value() < 1.0)) {
        throw ValidationError("ct_curve values within [0, 1)");
    }
    if (!(cp_max > 0.0)) throw ValidationError("cp_max > 0");
}

TurbineParams make_turbine_params(PiecewiseLinear cp_curve, PiecewiseLinear ct_curve,
                                  double rotor_radius, double rotor_inertia, double air_density,
                                  double rated_power)
{
    TurbineParams p;
    p.rotor_inertia = rotor_inertia;
    p.rotor_radius = rotor_radius;
    p.swept_area = std::numbers::pi * rotor_radius * rotor_radius;
    p.air_density = air_density;
    p.rated_power = rated_power;
    const auto& ys = cp_curve.ys();
    const auto best = static_cast<std::size_t>(std::max_element(ys.begin(), ys.end()) - ys.begin());
    p.lambda_opt = cp_curve.xs()[best];
    p.cp_max = ys[best];
    p.cp_curve = std::move(cp_curve);
    p.ct_curve = std::move(ct_curve);
    p.validate();
    return p;
}

TurbineParams default_turbine_params()
{
    return make_turbine_params(default_cp_curve(), default_ct_curve());
}

FarmLayout FarmLayout::rectangular(int n_rows, int n_cols, double dx, double k_w)
{
    FarmLayout layout;
    layout.n_rows = n_rows;
    layout.n_cols = n_cols;
    layout.dx = dx;
    layout.k_w = k_w;
    layout.upstream.assign(layout.size(), {});
    for (int c = 0; c < n_cols; ++c) {
        for (int r = 0; r < n_rows; ++r) {
            auto& ups = layout.upstream[layout.index(r, c)];
            for (int q = 0; q < r; ++q) ups.push_back(layout.index(q, c));
        }
    }
    layout.validate();
    return layout;
}

void FarmLayout::validate() const
{
    if (n_rows < 1 || n_cols < 1) throw ValidationError("farm needs n_rows >= 1 and n_cols >= 1");
    if (!(dx > 0.0)) throw ValidationError("dx > 0");
    if (!(k_w >= 0.0)) throw ValidationError("k_w >= 0");
    if (!(u_min > 0.0)) throw ValidationError("u_min > 0");
    if (upstream.size() != size()) throw ValidationError("wake graph must list every turbine");
    for (std::size_t j = 0; j < size(); ++j) {
        // Upstream set of j is exactly the turbines ahead of it in its column.
        const auto& ups = upstream[j];
        if (ups.size() != static_cast<std::size_t>(row_of(j))) {
            throw ValidationError("wake graph: upstream set must be the turbines ahead in the column");
        }
        for (const std::size_t i : ups) {
            if (i >= size() || col_of(i) != col_of(j) || row_of(i) >= row_of(j)) {
                throw ValidationError("wake graph: upstream set must be the turbines ahead in the column");
            }
        }
    }
}

void WindControllerParams::validate(const TurbineParams& turbine) const
{
    if (!(gain > 0.0)) throw ValidationError("wind controller gain K > 0");
    if (!(barrier_slope > 0.0)) throw ValidationError("c_w > 0");
    if (!(lambda_barrier > 0.0 && lambda_barrier < turbine.lambda_opt)) {
        throw ValidationError("0 < lambda_barrier < lambda_opt");
    }
    if (!(torque_max > 0.0)) throw ValidationError("torque_max > 0");
    if (!(omega_floor > 0.0)) throw ValidationError("omega_floor > 0");
}

WindControllerParams default_wind_controller(const TurbineParams& turbine)
{
    WindControllerParams c;
    c.lambda_barrier = 0.95 * turbine.lambda_opt;
    return c;
}

double tip_speed_ratio(const TurbineParams& params, double omega_r, double u_eff)
{
    return params.rotor_radius * omega_r / u_eff;
}

double aero_power(const TurbineParams& params, double omega_r, double u_eff)
{
    if (!(u_eff > 0.0)) {
        std::ostringstream msg;
        msg << "effective wind " << u_eff << " m/s is not positive";
        throw NonPositiveWind(msg.str());
    }
    const double cp = params.cp_curve(tip_speed_ratio(params, omega_r, u_eff));
    return 0.5 * params.air_density * params.swept_area * cp * u_eff * u_eff * u_eff;
}

double axial_induction(double ct)
{
    if (!(ct >= 0.0 && ct < 1.0)) {
        std::ostringstream msg;
        msg << "thrust coefficient " << ct << " outside [0, 1)";
        throw CtOutOfRange(msg.str());
    }
    return 0.5 * (1.0 - std::sqrt(1.0 - ct));
}

double wake_expansion(double dx, double rotor_radius, double k_w)
{
    // ln(1 + e^x) written to stay finite for large x.
    const double x = dx / rotor_radius;
    const double softplus = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    return 1.0 + k_w * softplus;
}

double wake_deficit(double u_at_source, double a, double dx, double rotor_radius, double k_w)
{
    const double dw = wake_expansion(dx, rotor_radius, k_w);
    const double spread = 1.0 + std::erf(dx / (rotor_radius * std::numbers::sqrt2));
    return u_at_source * (2.0 * a / (dw * dw)) * spread;
}

std::vector<double> effective_wind_field(double u_inf, const FarmLayout& layout,
                                         double rotor_radius,
                                         const std::vector<double>& inductions)
{
    if (inductions.size() != layout.size()) {
        throw ValidationError("one induction per turbine required");
    }
    WindFarm farm;
    farm.layout = layout;
    farm.turbine.rotor_radius = rotor_radius;
    WindField field;
    kernels::sweep_columns_serial(farm, u_inf, {}, inductions, field);
    return field.wind;
}

WindField resolve_wind_field(double u_inf, const WindFarm& farm,
                             const std::vector<TurbineState>& turbines)
{
    WindField field;
    kernels::sweep_columns_serial(farm, u_inf, turbines, {}, field);
    return field;
}

double rotor_acceleration(const TurbineParams& params, double omega_r, double u_eff,
                          double torque)
{
    return (aero_power(params, omega_r, u_eff) / omega_r - torque) / params.rotor_inertia;
}

double torque_nominal(const TurbineParams& params, const WindControllerParams& ctrl,
                      const TurbineState& state, double u_eff, double p_setpoint)
{
    const double power = aero_power(params, state.omega_r, u_eff);
    const double error = power - p_setpoint;
    const double scale =
        params.air_density * params.swept_area * params.rotor_radius * u_eff * u_eff;
    return 2.0 * error * params.rotor_inertia * ctrl.gain / scale + power / state.omega_r;
}

Halfplane tsr_barrier_row(const TurbineParams& params, const WindControllerParams& ctrl,
                          const TurbineState& state, double u_eff, double wind_rate)
{
    // -k (P/w - T) + lambda U'/U + c_w b >= 0  <=>  -k T <= -k P/w + lambda U'/U + c_w b
    const double k = params.rotor_radius / (u_eff * params.rotor_inertia);
    const double tsr = tip_speed_ratio(params, state.omega_r, u_eff);
    const double p_over_w = aero_power(params, state.omega_r, u_eff) / state.omega_r;
    return Halfplane{-k, -k * p_over_w + tsr * wind_rate / u_eff +
                             ctrl.barrier_slope * (ctrl.lambda_barrier - tsr)};
}

double tsr_barrier_slack(const TurbineParams& params, const WindControllerParams& ctrl,
                         const TurbineState& state, double u_eff, double torque,
                         double wind_rate)
{
    const double k = params.rotor_radius / (u_eff * params.rotor_inertia);
    const double tsr = tip_speed_ratio(params, state.omega_r, u_eff);
    const double p_over_w = aero_power(params, state.omega_r, u_eff) / state.omega_r;
    return -k * (p_over_w - torque) + tsr * wind_rate / u_eff +
           ctrl.barrier_slope * (ctrl.lambda_barrier - tsr);
}

TorqueCommand torque_safe(const TurbineParams& params, const WindControllerParams& ctrl,
                          const TurbineState& state, double u_eff, double p_setpoint,
                          double wind_rate)
{
    TorqueCommand cmd;
    cmd.nominal = torque_nominal(params, ctrl, state, u_eff, p_setpoint);
    const std::array<Halfplane, 3> rows = {
        tsr_barrier_row(params, ctrl, state, u_eff, wind_rate),
        Halfplane{-1.0, 0.0},              // T >= 0
        Halfplane{1.0, ctrl.torque_max},   // T <= T_max
    };
    const Interval feasible = intersect_halfplanes(rows);
    if (feasible.empty()) {
        cmd.torque = ctrl.torque_max;
        cmd.infeasible = true;
        return cmd;
    }
    cmd.torque = project_to_interval(cmd.nominal, feasible);
    return cmd;
}

FarmState initialize_farm(const WindFarm& farm, double u_inf, double lambda_init)
{
    // Downstream winds depend on upstream inductions, which depend on the
    // upstream rotor speed; walk each column front to back.
    FarmState state;
    state.turbines.assign(farm.layout.size(), TurbineState{});
    WindField field;
    field.wind.assign(farm.layout.size(), u_inf);
    field.induction.assign(farm.layout.size(), 0.0);
    const double radius = farm.turbine.rotor_radius;
    for (int c = 0; c < farm.layout.n_cols; ++c) {
        for (int r = 0; r < farm.layout.n_rows; ++r) {
            const std::size_t j = farm.layout.index(r, c);
            double sum_sq = 0.0;
            for (const std::size_t i : farm.layout.upstream[j]) {
                const double dist =
                    farm.layout.streamwise_position(j) - farm.layout.streamwise_position(i);
                const double du =
                    wake_deficit(field.wind[i], field.induction[i], dist, radius, farm.layout.k_w);
                sum_sq += du * du;
            }
            field.wind[j] = std::max(u_inf - std::sqrt(sum_sq), farm.layout.u_min);
            const double omega =
                std::max(lambda_init * field.wind[j] / radius, farm.control.omega_floor);
            state.turbines[j].omega_r = omega;
            field.induction[j] = axial_induction(
                farm.turbine.ct_curve(tip_speed_ratio(farm.turbine, omega, field.wind[j])));
        }
    }
    return state;
}

FarmStepResult farm_step(const WindFarm& farm, const FarmState& state, double u_inf,
                         double p_farm_setpoint, double dt, Execution execution)
{
    const std::size_t n = farm.layout.size();
    if (state.turbines.size() != n) throw ValidationError("farm state size does not match layout");
    if (!(dt > 0.0)) throw ValidationError("dt > 0");
    const double p_each = p_farm_setpoint / static_cast<double>(n);

    WindField now;
    WindField next;
    kernels::TurbineStepOutputs out;
    if (execution == Execution::Parallel) {
        kernels::step_columns_omp(farm, u_inf, state.turbines, p_each, dt, out, now, next);
    } else {
        kernels::step_columns_serial(farm, u_inf, state.turbines, p_each, dt, out, now, next);
    }

    FarmStepResult result;
    result.state.turbines = std::move(out.state);
    result.turbine_power = std::move(out.power);
    result.effective_wind = std::move(now.wind);
    result.next_wind = std::move(next.wind);
    result.tip_speed_ratio = std::move(out.tsr);
    result.torque = std::move(out.torque);
    // Summed in index order regardless of execution policy.
    for (std::size_t j = 0; j < n; ++j) {
        result.total_power += result.turbine_power[j];
        result.infeasible_events += out.infeasible[j];
    }
    return result;
}

double farm_available_power(double u_inf, const TurbineParams& params, std::size_t n_turbines)
{
    if (u_inf < 0.0) throw NonPositiveWind("free-stream wind must be non-negative");
    const double per_turbine =
        0.5 * params.air_density * params.swept_area * params.cp_max * u_inf * u_inf * u_inf;
    return static_cast<double>(n_turbines) * std::min(per_turbine, params.rated_power);
}

double farm_available_power(const TurbineParams& params, const std::vector<double>& effective_wind)
{
    double total = 0.0;
    for (const double u : effective_wind) total += farm_available_power(u, params, 1);
    return total;
}

double farm_power_at_tsr(const WindFarm& farm, double u_inf, const std::vector<double>& lambdas,
                         bool with_wakes)
{
    const std::size_t n = farm.layout.size();
    if (lambdas.size() != n) throw ValidationError("one tip-speed ratio per turbine required");
    std::vector<double> inductions(n, 0.0);
    if (with_wakes) {
        for (std::size_t j = 0; j < n; ++j) {
            inductions[j] = axial_induction(farm.turbine.ct_curve(lambdas[j]));
        }
    }
    const std::vector<double> wind =
        effective_wind_field(u_inf, farm.layout, farm.turbine.rotor_radius, inductions);
    const TurbineParams& tp = farm.turbine;
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        total += 0.5 * tp.air_density * tp.swept_area * tp.cp_curve(lambdas[j]) * wind[j] *
                 wind[j] * wind[j];
    }
    return total;
}

}  // namespace hybridsim
