#pragma once

#include <array>

namespace hybridsim {

struct SolarParams {
    double area = 1.0e5;      // m^2
    double efficiency = 0.5;
    double tau = 10.0;        // s, low-pass time constant
    double kp = 2.5;
    double ki = 0.2;          // 1/s
    double integration_step = 0.1;  // s, RK4 sub-step inside a plant step

    // Also checks that the closed loop is Hurwitz.
    void validate() const;
};

struct SolarState {
    double p_s = 0.0;    // filtered plant power, W
    double e_int = 0.0;  // integrated tracking error, W s
};

// Row-major closed-loop matrix of [P_s, e_int] with e = P_sp - P_s.
std::array<double, 4> solar_closed_loop_matrix(const SolarParams& params);

// I_T A_s eta_s. Throws NegativeIrradiance for irradiance < 0.
double solar_available(const SolarParams& params, double irradiance);

struct SolarStepResult {
    SolarState state;
    double output = 0.0;     // W, clamped to [0, available]
    bool frozen = false;     // integrator held during some sub-step
};

// Integrated in sub-steps of at most integration_step; the anti-windup
// decision is re-evaluated on every sub-step.
SolarStepResult solar_step(const SolarParams& params, const SolarState& state,
                           double p_setpoint, double irradiance, double dt);

}  // namespace hybridsim
