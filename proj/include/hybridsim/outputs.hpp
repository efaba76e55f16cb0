#pragma once

#include <filesystem>
#include <string>

#include "hybridsim/simulation.hpp"

namespace hybridsim {

struct RunSummary {
    std::size_t rows = 0;
    double duration = 0.0;            // s, last minus first row time
    double mean_demand = 0.0;         // W
    double rms_tracking_error = 0.0;  // W, total - demand over all rows
    double rms_relative = 0.0;        // rms / mean demand, 0 if no demand
    double wind_saturation = 0.0;     // fraction of rows with wind setpoint at availability
    double solar_saturation = 0.0;
    double battery_saturation = 0.0;  // fraction of rows with |battery setpoint| at rating
    double soc_min = 0.0;
    double soc_max = 0.0;
    double soc_final = 0.0;
    double max_tip_speed_ratio = 0.0;
    long wind_qp_events = 0;
    long battery_qp_events = 0;
    long tsr_violations = 0;
};

RunSummary compute_summary(const RunRecord& record, double battery_power_rating);

// Writes timeseries.csv, events.csv, summary.txt, run_meta.json and the
// long-format plots/{powers_vs_time,demand_vs_total,soc_vs_time}.csv.
// Throws IoError.
void write_outputs(const RunRecord& record, const std::filesystem::path& out_dir,
                   const Scenario& scenario);

void write_timeseries(const RunRecord& record, const std::filesystem::path& path);
// Rows only; per-turbine columns are recovered from the header.
RunRecord read_timeseries(const std::filesystem::path& path);

std::string format_summary(const RunSummary& summary);

// Recomputes the summary of a finished run directory from its files.
RunSummary summarize_run_dir(const std::filesystem::path& run_dir);

}  // namespace hybridsim
