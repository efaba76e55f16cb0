#pragma once

#include <cstddef>
#include <vector>

#include "hybridsim/sim_core.hpp"

namespace hybridsim {

// Aerodynamic rotor model parameters; defaults follow the NREL 5 MW reference
// turbine (rotor radius, rotor inertia, rated power).
struct TurbineParams {
    double rotor_inertia = 38759227.0;  // kg m^2
    double rotor_radius = 63.0;         // m
    double swept_area = 0.0;            // m^2, pi R^2 (filled by make_turbine_params)
    double air_density = 1.225;         // kg/m^3
    PiecewiseLinear cp_curve;           // C_p(lambda)
    PiecewiseLinear ct_curve;           // C_T(lambda)
    double lambda_opt = 0.0;            // argmax of cp_curve
    double cp_max = 0.0;
    double rated_power = 5.0e6;         // W

    void validate() const;
};

PiecewiseLinear default_cp_curve();
PiecewiseLinear default_ct_curve();

// Fills swept_area, lambda_opt and cp_max from the radius and curves.
TurbineParams make_turbine_params(PiecewiseLinear cp_curve, PiecewiseLinear ct_curve,
                                  double rotor_radius = 63.0,
                                  double rotor_inertia = 38759227.0,
                                  double air_density = 1.225, double rated_power = 5.0e6);
TurbineParams default_turbine_params();

struct TurbineState {
    double omega_r = 1.0;  // rad/s
};

// Rectangular farm, wind aligned with the columns. Turbine index is
// col * n_rows + row; row 0 faces the free stream.
struct FarmLayout {
    int n_rows = 1;
    int n_cols = 1;
    double dx = 882.0;      // streamwise spacing, m
    double k_w = 0.04;      // wake expansion coefficient
    double u_min = 0.5;     // floor on effective wind, m/s
    std::vector<std::vector<std::size_t>> upstream;  // per-turbine upstream indices

    static FarmLayout rectangular(int n_rows, int n_cols, double dx, double k_w);

    std::size_t size() const { return static_cast<std::size_t>(n_rows) * n_cols; }
    std::size_t index(int row, int col) const
    {
        return static_cast<std::size_t>(col) * n_rows + row;
    }
    int row_of(std::size_t i) const { return static_cast<int>(i % n_rows); }
    int col_of(std::size_t i) const { return static_cast<int>(i / n_rows); }
    double streamwise_position(std::size_t i) const { return row_of(i) * dx; }

    void validate() const;
};

struct WindControllerParams {
    double gain = 2.0;             // K, stands in for 1 / (dC_p/dlambda)
    double barrier_slope = 1.0;    // c_w, 1/s
    double lambda_barrier = 0.0;   // tip-speed-ratio ceiling, < lambda_opt
    double torque_max = 8.0e6;     // N m
    double omega_floor = 0.1;      // rad/s

    void validate(const TurbineParams& turbine) const;
};

// Controller defaults for a given turbine: lambda_barrier = 0.95 lambda_opt.
WindControllerParams default_wind_controller(const TurbineParams& turbine);

struct WindFarm {
    TurbineParams turbine;
    WindControllerParams control;
    FarmLayout layout;
};

double tip_speed_ratio(const TurbineParams& params, double omega_r, double u_eff);

// 1/2 rho A C_p(lambda) u^3. Throws NonPositiveWind for u_eff <= 0.
double aero_power(const TurbineParams& params, double omega_r, double u_eff);

// 1/2 (1 - sqrt(1 - ct)). Throws CtOutOfRange outside [0, 1).
double axial_induction(double ct);

// Wake diameter growth 1 + k_w ln(1 + e^{dx/R}).
double wake_expansion(double dx, double rotor_radius, double k_w);

// Steady-state velocity deficit at streamwise distance dx behind a turbine
// that sees u_at_source and has induction a.
double wake_deficit(double u_at_source, double a, double dx, double rotor_radius, double k_w);

// Root-sum-square superposition of upstream deficits, for given inductions.
std::vector<double> effective_wind_field(double u_inf, const FarmLayout& layout,
                                         double rotor_radius,
                                         const std::vector<double>& inductions);

struct WindField {
    std::vector<double> wind;        // effective wind per turbine, m/s
    std::vector<double> induction;   // axial induction per turbine
};

// Upstream-to-downstream sweep that evaluates each turbine's induction from
// C_T at its own tip-speed ratio, then feeds the deficit to the turbines behind.
WindField resolve_wind_field(double u_inf, const WindFarm& farm,
                             const std::vector<TurbineState>& turbines);

double rotor_acceleration(const TurbineParams& params, double omega_r, double u_eff,
                          double torque);

// Feedback-linearizing torque law with K in place of 1 / (dC_p/dlambda).
double torque_nominal(const TurbineParams& params, const WindControllerParams& ctrl,
                      const TurbineState& state, double u_eff, double p_setpoint);

// Tip-speed-ratio barrier row written as a halfplane in the torque:
// -(R / (U J)) (P/w - T) + lambda U'/U + c_w (lambda_b - lambda) >= 0.
// wind_rate is dU/dt of the turbine's effective wind; at zero this is the
// constant-wind barrier.
Halfplane tsr_barrier_row(const TurbineParams& params, const WindControllerParams& ctrl,
                          const TurbineState& state, double u_eff, double wind_rate = 0.0);

// Value of the barrier inequality (>= 0 when satisfied) for a torque.
double tsr_barrier_slack(const TurbineParams& params, const WindControllerParams& ctrl,
                         const TurbineState& state, double u_eff, double torque,
                         double wind_rate = 0.0);

struct TorqueCommand {
    double torque = 0.0;
    double nominal = 0.0;
    bool infeasible = false;  // barrier and actuator box disagreed; torque = torque_max
};

TorqueCommand torque_safe(const TurbineParams& params, const WindControllerParams& ctrl,
                          const TurbineState& state, double u_eff, double p_setpoint,
                          double wind_rate = 0.0);

struct FarmState {
    std::vector<TurbineState> turbines;
};

struct FarmStepResult {
    FarmState state;
    std::vector<double> turbine_power;   // W, new rotor speed in the end-of-step wind
    std::vector<double> effective_wind;  // m/s used during the step
    std::vector<double> next_wind;       // m/s produced by the new rotor speeds
    std::vector<double> tip_speed_ratio; // new rotor speed over end-of-step wind
    std::vector<double> torque;          // N m applied during the step
    double total_power = 0.0;
    int infeasible_events = 0;
};

enum class Execution { Serial, Parallel };

// Initial rotor speeds putting every turbine at lambda_init against its own
// effective wind.
FarmState initialize_farm(const WindFarm& farm, double u_inf, double lambda_init);

// Each column is stepped front to back. A turbine's barrier row includes the
// rate of change of its effective wind over the step, which is exact because
// the upstream turbines it depends on have already been advanced. u_inf is
// held over the step.
FarmStepResult farm_step(const WindFarm& farm, const FarmState& state, double u_inf,
                         double p_farm_setpoint, double dt,
                         Execution execution = Execution::Parallel);

// Free-stream availability estimate, ignores wakes.
double farm_available_power(double u_inf, const TurbineParams& params, std::size_t n_turbines);

// Availability with each turbine producing according to its own incoming
// (waked) wind: sum of min(1/2 rho A C_p,max u_j^3, rated).
double farm_available_power(const TurbineParams& params, const std::vector<double>& effective_wind);

// Farm aerodynamic power with every turbine held at the given tip-speed ratio;
// with_wakes=false evaluates every turbine at u_inf.
double farm_power_at_tsr(const WindFarm& farm, double u_inf,
                         const std::vector<double>& lambdas, bool with_wakes);

}  // namespace hybridsim
