#include "hybridsim/supervisor.hpp"

#include <algorithm>

#include "hybridsim/errors.hpp"

namespace hybridsim {

void SupervisorParams::validate(double z_min, double z_max, double dt) const
{
    if (!(z_min <= soc_low_threshold && soc_low_threshold < soc_high_threshold &&
          soc_high_threshold <= z_max)) {
        throw ValidationError("z_min <= soc_low_threshold < soc_high_threshold <= z_max");
    }
    if (!(battery_power_rating > 0.0)) throw ValidationError("battery_power_rating > 0");
    if (!(update_period >= dt)) throw ValidationError("update_period >= dt");
    if (!(saturation_margin >= 0.0)) throw ValidationError("saturation_margin >= 0");
    if (!(integral_gain >= 0.0)) throw ValidationError("integral_gain >= 0");
    if (!(derate_width > 0.0)) throw ValidationError("derate_width > 0");
}

Supervisor::Supervisor(SupervisorParams params, double dt)
    : params_(params), slew_(params.battery_power_rating * dt / params.update_period)
{
}

double Supervisor::discharge_derate(double soc) const
{
    return std::clamp((soc - params_.soc_low_threshold) / params_.derate_width, 0.0, 1.0);
}

double Supervisor::charge_derate(double soc) const
{
    return std::clamp((params_.soc_high_threshold - soc) / params_.derate_width, 0.0, 1.0);
}

DispatchCommand Supervisor::supervise(const SupervisorInputs& in)
{
    const double demand = std::max(in.demand, 0.0);
    const double wind_avail = std::max(in.wind_available, 0.0);
    const double solar_avail = std::max(in.solar_available, 0.0);
    const double avail = wind_avail + solar_avail;
    const double rating = params_.battery_power_rating;

    const double target = std::min(demand, avail);
    double charge = 0.0;
    if (params_.charge_from_surplus && avail > demand) {
        charge = std::min(avail - demand, rating) * charge_derate(in.soc);
    }

    DispatchCommand cmd;
    const double wind_cap = wind_avail * (1.0 + params_.saturation_margin);
    const double solar_cap = solar_avail * (1.0 + params_.saturation_margin);
    if (avail > 0.0) {
        const double total = target + charge + trim_;
        cmd.p_wind_sp = std::clamp(total * wind_avail / avail, 0.0, wind_cap);
        cmd.p_solar_sp = std::clamp(total * solar_avail / avail, 0.0, solar_cap);
    }

    const bool saturated = cmd.p_wind_sp >= wind_cap && cmd.p_solar_sp >= solar_cap;
    if (!saturated) {
        const double residual = target + charge - (in.wind_measured + in.solar_measured);
        trim_ += params_.integral_gain * residual;
    }
    trim_ = std::clamp(trim_, -(target + charge), avail * (1.0 + params_.saturation_margin));

    double battery = demand - (in.wind_measured + in.solar_measured);
    if (battery > 0.0) {
        battery = std::min(battery, rating * discharge_derate(in.soc));
    } else {
        battery = std::max(battery, -rating * charge_derate(in.soc));
    }
    battery = std::clamp(battery, last_battery_ - slew_, last_battery_ + slew_);
    battery = std::clamp(battery, -rating, rating);
    cmd.p_batt_sp = battery;
    last_battery_ = battery;
    return cmd;
}

}  // namespace hybridsim
