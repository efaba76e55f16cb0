#include "hybridsim/solar_plant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hybridsim/sim_core.hpp"

namespace hybridsim {

void SolarParams::validate() const
{
    if (!(area > 0.0)) throw ValidationError("solar area > 0");
    if (!(efficiency > 0.0 && efficiency <= 1.0)) throw ValidationError("solar efficiency in (0, 1]");
    if (!(tau > 0.0)) throw ValidationError("solar tau > 0");
    if (!(integration_step > 0.0)) throw ValidationError("solar integration_step > 0");
    // 2x2 Hurwitz test: trace < 0 and det > 0.
    const auto m = solar_closed_loop_matrix(*this);
    const double trace = m[0] + m[3];
    const double det = m[0] * m[3] - m[1] * m[2];
    if (!(trace < 0.0 && det > 0.0)) {
        throw ValidationError("solar PI gains must give a stable closed loop (kp > -1, ki > 0)");
    }
}

std::array<double, 4> solar_closed_loop_matrix(const SolarParams& params)
{
    return {-(1.0 + params.kp) / params.tau, params.ki / params.tau, -1.0, 0.0};
}

double solar_available(const SolarParams& params, double irradiance)
{
    if (irradiance < 0.0) {
        std::ostringstream msg;
        msg << "irradiance " << irradiance << " W/m^2 is negative";
        throw NegativeIrradiance(msg.str());
    }
    return irradiance * params.area * params.efficiency;
}

SolarStepResult solar_step(const SolarParams& params, const SolarState& state,
                           double p_setpoint, double irradiance, double dt)
{
    if (!(dt > 0.0)) throw ValidationError("dt > 0");
    const double available = solar_available(params, irradiance);

    const auto substeps =
        static_cast<int>(std::max(1.0, std::ceil(dt / params.integration_step - 1e-9)));
    const double h = dt / substeps;

    std::array<double, 2> x{state.p_s, state.e_int};
    bool any_frozen = false;
    for (int k = 0; k < substeps; ++k) {
        // Integrator freezes only while the output sits on a limit and the
        // error would push it further past that limit.
        const double e0 = p_setpoint - x[0];
        const bool frozen = (x[0] >= available && e0 > 0.0) || (x[0] <= 0.0 && e0 < 0.0);
        any_frozen = any_frozen || frozen;
        const auto rhs = [&](const std::array<double, 2>& y) {
            const double e = p_setpoint - y[0];
            const double u = params.kp * e + params.ki * y[1];
            return std::array<double, 2>{(-y[0] + u) / params.tau, frozen ? 0.0 : e};
        };
        x = integrate_step(x, rhs, h);
    }
    const auto next = x;

    SolarStepResult result;
    result.state = SolarState{next[0], next[1]};
    result.output = std::min(std::max(next[0], 0.0), available);
    result.frozen = any_frozen;
    return result;
}

}  // namespace hybridsim
