#pragma once

#include <string>
#include <vector>

#include "hybridsim/scenario.hpp"

namespace hybridsim {

// One logged instant. Powers are plant outputs at `time`; setpoints are the
// commands held from `time` to the next row.
struct RunRow {
    double time = 0.0;             // s
    double demand = 0.0;           // W
    double wind_speed = 0.0;       // m/s, free stream
    double irradiance = 0.0;       // W/m^2
    double wind_available = 0.0;   // W
    double solar_available = 0.0;  // W
    double wind_setpoint = 0.0;    // W
    double solar_setpoint = 0.0;   // W
    double battery_setpoint = 0.0; // W, discharge-positive
    double wind_power = 0.0;       // W
    double solar_power = 0.0;      // W
    double battery_power = 0.0;    // W, discharge-positive
    double total_power = 0.0;      // W
    double soc = 0.0;
    double cell_current = 0.0;     // A, charge-positive
    double cell_charge = 0.0;      // A s, cumulative integral of cell current
    double iss_gain = 0.0;         // min over the preceding step
    double disturbance_peak = 0.0; // max |I_c dV/dt| over the preceding step
    int wind_qp_events = 0;        // infeasible torque QPs in the preceding step
    int battery_qp_events = 0;     // infeasible current QPs in the preceding step
    int tsr_violations = 0;        // turbines breaking the barrier in the preceding step
    std::vector<double> tip_speed_ratio;  // per turbine
};

struct RunEvent {
    double time = 0.0;
    std::string kind;
    std::string detail;
};

struct RunRecord {
    std::size_t n_turbines = 0;
    double lambda_barrier = 0.0;
    std::vector<RunRow> rows;
    std::vector<RunEvent> events;
    FarmState final_farm;
    SolarState final_solar;
    BatteryState final_battery;
};

// Number of rows run_scenario produces: floor(duration / dt) + 1.
std::size_t expected_row_count(double duration, double dt);

// Runs the coupled plant. Subsystem errors are rethrown as the same kind
// with the simulation time prepended.
RunRecord run_scenario(const Scenario& scenario);

struct InvariantReport {
    int soc_violations = 0;
    int current_violations = 0;
    int tsr_violations = 0;
    int solar_violations = 0;
    int time_violations = 0;
    double energy_relative_error = 0.0;
    bool energy_ok = true;
    std::vector<std::string> messages;  // first few violations, human-readable

    int total() const
    {
        return soc_violations + current_violations + tsr_violations + solar_violations +
               time_violations + (energy_ok ? 0 : 1);
    }
};

// Checks the logged trajectory against the plant invariants: SOC within
// [z_min, z_max] +- 1e-4, |I_c| <= I_max (1 + 1e-6), the tip-speed-ratio
// barrier, solar output within [0, available], monotone time, and SOC change
// against integrated cell current to 1e-6 relative.
InvariantReport check_invariants(const Scenario& scenario, const RunRecord& record);

}  // namespace hybridsim
