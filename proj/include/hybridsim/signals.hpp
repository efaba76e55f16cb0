#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hybridsim/sim_core.hpp"

namespace hybridsim {

// Two numeric columns with a header row. Throws ParseError naming the path
// and line on malformed input or a missing file.
struct TwoColumnTable {
    std::vector<double> first;
    std::vector<double> second;
};
TwoColumnTable read_two_column_csv(const std::filesystem::path& path);
void write_two_column_csv(const std::filesystem::path& path, const std::string& header_a,
                          const std::string& header_b, const std::vector<double>& a,
                          const std::vector<double>& b);

SignalSeries read_signal_csv(const std::filesystem::path& path,
                             Interpolation mode = Interpolation::ZeroOrderHold);
void write_signal_csv(const std::filesystem::path& path, const std::string& value_name,
                      const SignalSeries& series);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

enum class SignalProfile { Steady, Ramping, Gusty };
SignalProfile parse_profile(const std::string& name);
std::string profile_name(SignalProfile profile);

struct SyntheticSignalOptions {
    double sample_interval = 1.0;   // s
    double start_hour = 9.0;        // local solar time of t = 0
    double plant_rating = 250.0e6;  // W, demand never exceeds this
    double demand_mean_fraction = 0.32;
    double demand_band_fraction = 0.12;
};

struct SyntheticSignals {
    SignalSeries wind;        // m/s
    SignalSeries irradiance;  // W/m^2
    SignalSeries demand;      // W
};

// Reproducible wind, irradiance and demand covering [0, duration].
SyntheticSignals generate_synthetic_signals(std::uint64_t seed, double duration,
                                            SignalProfile profile,
                                            const SyntheticSignalOptions& options = {});

}  // namespace hybridsim
