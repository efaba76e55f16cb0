#pragma once

namespace hybridsim {

struct SupervisorParams {
    double soc_high_threshold = 0.85;
    double soc_low_threshold = 0.15;
    double battery_power_rating = 40.0e6;  // W
    double update_period = 1.0;            // s
    double saturation_margin = 0.0;
    double integral_gain = 0.2;            // per update
    double derate_width = 0.05;            // SOC span of the derating ramps
    bool charge_from_surplus = false;

    void validate(double z_min, double z_max, double dt) const;
};

struct SupervisorInputs {
    double demand = 0.0;            // W
    double wind_available = 0.0;    // W
    double solar_available = 0.0;   // W
    double wind_measured = 0.0;     // W
    double solar_measured = 0.0;    // W
    double battery_measured = 0.0;  // W, discharge-positive
    double soc = 0.5;
};

struct DispatchCommand {
    double p_wind_sp = 0.0;
    double p_solar_sp = 0.0;
    double p_batt_sp = 0.0;  // discharge-positive
};

// Rule-based dispatcher. Renewables get the demand they can cover, split in
// proportion to availability, with an integral trim that stops once both are
// pinned at availability. The battery covers whatever the renewables are
// actually failing to deliver, derated near the SOC thresholds and slew
// limited between updates.
class Supervisor {
public:
    Supervisor(SupervisorParams params, double dt);

    DispatchCommand supervise(const SupervisorInputs& in);

    const SupervisorParams& params() const { return params_; }
    double renewable_trim() const { return trim_; }
    double last_battery_command() const { return last_battery_; }
    // Largest change of the battery command between consecutive updates.
    double battery_slew_limit() const { return slew_; }

    double discharge_derate(double soc) const;
    double charge_derate(double soc) const;

private:
    SupervisorParams params_;
    double slew_ = 0.0;
    double trim_ = 0.0;
    double last_battery_ = 0.0;
};

}  // namespace hybridsim
