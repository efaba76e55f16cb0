#include "hybridsim/battery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hybridsim {

namespace {

// Monotone synthetic OCV, 3.0 V empty to 4.1 V full.
const std::vector<double> kOcvSoc = {0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5,
                                     0.6, 0.7,  0.8, 0.9, 0.95, 1.0};
const std::vector<double> kOcvVolts = {3.00, 3.30, 3.45, 3.55, 3.61, 3.66, 3.71,
                                       3.77, 3.84, 3.92, 4.00, 4.05, 4.10};

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

std::array<double, 4> to_array(const BatteryState& s) { return {s.u1, s.z, s.h, s.i_c}; }
BatteryState from_array(const std::array<double, 4>& a) { return {a[0], a[1], a[2], a[3]}; }

}  // namespace

PiecewiseLinear default_ocv_table() { return {kOcvSoc, kOcvVolts}; }

void BatteryParams::validate() const
{
    if (!(r0 > 0.0 && r1 > 0.0 && c1 > 0.0 && q_cell > 0.0)) {
        throw ValidationError("r0, r1, c1, q_cell > 0");
    }
    if (!(eta_b > 0.0 && eta_b <= 1.0)) throw ValidationError("eta_b in (0, 1]");
    if (!(n_s >= 1.0 && n_p >= 1.0)) throw ValidationError("n_s, n_p >= 1");
    if (!(0.0 <= z_min && z_min < z_max && z_max <= 1.0)) {
        throw ValidationError("0 <= z_min < z_max <= 1");
    }
    if (!(i_c_max > 0.0)) throw ValidationError("i_c_max > 0");
    if (!(g_hyst >= 0.0 && m_hyst >= 0.0)) throw ValidationError("g_hyst, m_hyst >= 0");
    if (!(k_ic > 0.0 && c_ic > 0.0)) throw ValidationError("k_ic, c_ic > 0");
    if (!(c_z1_min > 0.0 && c_z2_min > 0.0 && c_z1_max > 0.0 && c_z2_max > 0.0)) {
        throw ValidationError("SOC barrier slopes > 0");
    }
    if (!(control_dt > 0.0)) throw ValidationError("control_dt > 0");

    const auto& zs = ocv.xs();
    const auto& vs = ocv.ys();
    if (zs.size() < 2) throw ValidationError("OCV table must be provided");
    if (zs.front() > 0.0 || zs.back() < 1.0) throw ValidationError("OCV table must span z in [0, 1]");
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (!(vs[i] > 0.0)) throw ValidationError("OCV voltages > 0");
        if (i > 0 && !(vs[i] > vs[i - 1])) throw ValidationError("OCV must be strictly increasing");
    }

    // Worst-case terminal voltage over the operating envelope must keep the
    // control-law denominator positive.
    const double v_low =
        ocv(z_min) - (r0 + r1) * i_c_max - m_hyst - std::abs(r_e) * i_c_max;
    if (!(v_low > 0.0)) throw ValidationError("V + r_e I_c > 0 over the operating envelope");
}

void size_battery(BatteryParams& params, double energy_wh, double v_nominal, double c_rate)
{
    if (!(energy_wh > 0.0 && v_nominal > 0.0 && c_rate > 0.0)) {
        throw ValidationError("battery energy, nominal voltage and C-rate > 0");
    }
    const double cells_per_side = std::round(std::sqrt(energy_wh / (v_nominal * params.q_cell)));
    params.n_s = std::max(cells_per_side, 1.0);
    params.n_p = params.n_s;
    params.i_c_max = c_rate * params.q_cell;
}

BatteryParams default_battery_params()
{
    BatteryParams p;
    p.ocv = default_ocv_table();
    size_battery(p, 160.0e6, 3.3, 0.25);
    p.validate();
    return p;
}

BatteryOutputs battery_outputs(const BatteryParams& params, const BatteryState& state)
{
    BatteryOutputs out;
    out.v_cell = params.ocv(state.z) - params.r0 * state.i_c - state.u1 + state.h;
    out.p_total = params.cells() * out.v_cell * state.i_c;
    return out;
}

BatteryState battery_derivatives(const BatteryParams& params, const BatteryState& state,
                                 double nu)
{
    const double zdot = params.soc_rate_per_amp() * state.i_c;
    const double hyst_rate = std::abs(params.g_hyst * zdot);
    BatteryState d;
    d.u1 = -state.u1 / (params.r1 * params.c1) + state.i_c / params.c1;
    d.z = zdot;
    d.h = -hyst_rate * state.h - hyst_rate * sign(state.i_c) * params.m_hyst;
    d.i_c = nu;
    return d;
}

double terminal_voltage_rate(const BatteryParams& params, const BatteryState& state, double nu)
{
    const BatteryState d = battery_derivatives(params, state, nu);
    return params.ocv.slope(state.z) * d.z - params.r0 * nu - d.u1 + d.h;
}

double iss_gain(const BatteryParams& params, const BatteryState& state)
{
    const double v = battery_outputs(params, state).v_cell;
    return params.k_ic * v / (v + params.r_e * state.i_c);
}

double current_control_nominal(const BatteryParams& params, const BatteryState& state,
                               double p_setpoint_pack)
{
    const BatteryOutputs out = battery_outputs(params, state);
    const double denom = out.v_cell + params.r_e * state.i_c;
    if (!(denom > 0.0)) {
        std::ostringstream msg;
        msg << "V + r_e I_c = " << denom << " V is not positive";
        throw DenominatorNonpositive(msg.str());
    }
    const double error = (out.p_total - p_setpoint_pack) / params.cells();
    return -params.k_ic * error / denom;
}

std::array<Halfplane, 4> battery_cbf_rows(const BatteryParams& params, const BatteryState& state)
{
    const double beta = params.soc_rate_per_amp();
    const double i = state.i_c;

    // nu + c (i - i_min) >= 0 and -nu + c (i_max - i) >= 0.
    const Halfplane current_floor{-1.0, params.c_ic * (i + params.i_c_max)};
    const Halfplane current_ceiling{1.0, params.c_ic * (params.i_c_max - i)};

    // psi_2 = beta nu + c1 beta i + c2 psi_1 >= 0, psi_1 = beta i + c1 (z - z_min).
    const double psi1_min = beta * i + params.c_z1_min * (state.z - params.z_min);
    const Halfplane soc_floor{-beta, params.c_z1_min * beta * i + params.c_z2_min * psi1_min};

    // Mirror with b = z_max - z: psi_1 = -beta i + c1 (z_max - z).
    const double psi1_max = -beta * i + params.c_z1_max * (params.z_max - state.z);
    const Halfplane soc_ceiling{beta, -params.c_z1_max * beta * i + params.c_z2_max * psi1_max};

    return {current_floor, current_ceiling, soc_floor, soc_ceiling};
}

BatteryStepResult battery_step(const BatteryParams& params, const BatteryState& state,
                               double p_setpoint, double dt)
{
    if (!(dt > 0.0)) throw ValidationError("dt > 0");
    const double setpoint_internal = -p_setpoint;  // dynamics are charge-positive
    const auto substeps = static_cast<int>(std::max(1.0, std::ceil(dt / params.control_dt - 1e-9)));
    const double h = dt / substeps;

    BatteryStepResult result;
    result.min_iss_gain = kInf;
    BatteryState x = state;
    for (int k = 0; k < substeps; ++k) {
        const double nu_star = current_control_nominal(params, x, setpoint_internal);
        const auto rows = battery_cbf_rows(params, x);
        const Interval feasible = intersect_halfplanes(rows);
        double nu = 0.0;
        if (feasible.empty()) {
            // Current rows bound both sides finitely, so the crossed bounds
            // are finite here.
            nu = 0.5 * (feasible.lo + feasible.hi);
            ++result.infeasible_events;
        } else {
            nu = project_to_interval(nu_star, feasible);
        }
        if (nu != nu_star) result.filter_active = true;

        result.min_iss_gain = std::min(result.min_iss_gain, iss_gain(params, x));
        result.disturbance_peak = std::max(
            result.disturbance_peak, std::abs(x.i_c * terminal_voltage_rate(params, x, nu)));
        // i_c is linear in time under a held nu.
        result.charge_throughput += x.i_c * h + 0.5 * nu * h * h;

        const auto rhs = [&](const std::array<double, 4>& s) {
            return to_array(battery_derivatives(params, from_array(s), nu));
        };
        x = from_array(integrate_step(to_array(x), rhs, h));
    }
    result.state = x;
    result.delivered_power = -battery_outputs(params, x).p_total;
    return result;
}

}  // namespace hybridsim
