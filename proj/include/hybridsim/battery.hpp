#pragma once

#include <array>

#include "hybridsim/sim_core.hpp"

namespace hybridsim {

// Li-ion pack of n_s x n_p identical cells. Electrical quantities are per
// cell; the pack power is n_s n_p V I_c. Internally positive current charges.
struct BatteryParams {
    double r0 = 0.005;       // Ohm
    double r1 = 0.002;       // Ohm
    double c1 = 5000.0;      // F
    double eta_b = 0.99;
    double q_cell = 20.0;    // Ah
    double n_s = 1.0;
    double n_p = 1.0;
    double g_hyst = 150.0;
    double m_hyst = 0.03;    // V
    PiecewiseLinear ocv;     // V(z)
    double i_c_max = 5.0;    // A
    double z_min = 0.1;
    double z_max = 0.9;
    double k_ic = 20.0;      // per-cell Newton-Raphson gain, 1/s
    double r_e = 0.0;        // Ohm, stands in for -R_0 in the gradient
    double c_ic = 20.0;      // 1/s
    double c_z1_min = 1.0;
    double c_z2_min = 1.0;
    double c_z1_max = 1.0;
    double c_z2_max = 1.0;
    bool soc_ns_factor = true;  // keep the n_s factor in dz/dt
    double control_dt = 0.01;   // s, safety-filter update interval inside a step

    // Capacity in coulombs: 3600 n_p q_cell.
    double charge_capacity() const { return 3600.0 * n_p * q_cell; }
    // dz/dt per ampere of cell current.
    double soc_rate_per_amp() const
    {
        return eta_b * (soc_ns_factor ? n_s : 1.0) / charge_capacity();
    }
    double cells() const { return n_s * n_p; }

    void validate() const;
};

PiecewiseLinear default_ocv_table();

// n_s = n_p = round(sqrt(E / (V_nom q_cell))), I_max = c_rate * q_cell.
void size_battery(BatteryParams& params, double energy_wh, double v_nominal, double c_rate);

BatteryParams default_battery_params();

struct BatteryState {
    double u1 = 0.0;   // RC branch voltage, V
    double z = 0.5;    // state of charge
    double h = 0.0;    // hysteresis voltage, V
    double i_c = 0.0;  // cell current, A (charge-positive)
};

struct BatteryOutputs {
    double v_cell = 0.0;   // V
    double p_total = 0.0;  // W, charge-positive
};

BatteryOutputs battery_outputs(const BatteryParams& params, const BatteryState& state);

// Time derivative of [u1, z, h, i_c] with di_c/dt = nu.
BatteryState battery_derivatives(const BatteryParams& params, const BatteryState& state,
                                 double nu);

// dV/dt along the dynamics for a given nu.
double terminal_voltage_rate(const BatteryParams& params, const BatteryState& state, double nu);

// A = k_ic V / (V + r_e I_c); the error contracts at this rate.
double iss_gain(const BatteryParams& params, const BatteryState& state);

// -k_ic e / (V + r_e I_c), e the per-cell power error against a charge-positive
// pack setpoint. Throws DenominatorNonpositive if V + r_e I_c <= 0.
double current_control_nominal(const BatteryParams& params, const BatteryState& state,
                               double p_setpoint_pack);

// Rows in nu: current floor, current ceiling, SOC floor (second order),
// SOC ceiling (second order).
std::array<Halfplane, 4> battery_cbf_rows(const BatteryParams& params, const BatteryState& state);

struct BatteryStepResult {
    BatteryState state;
    double delivered_power = 0.0;     // W, discharge-positive
    double charge_throughput = 0.0;   // integral of i_c dt over the step, A s
    double disturbance_peak = 0.0;    // max |i_c dV/dt| over the step
    double min_iss_gain = 0.0;        // min A over the step
    int infeasible_events = 0;
    bool filter_active = false;       // some update clipped the nominal control
};

// p_setpoint is discharge-positive. The safety filter is re-solved every
// control_dt (or dt if smaller) with nu held between updates.
BatteryStepResult battery_step(const BatteryParams& params, const BatteryState& state,
                               double p_setpoint, double dt);

}  // namespace hybridsim
