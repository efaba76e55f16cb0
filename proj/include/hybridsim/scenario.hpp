#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "hybridsim/battery.hpp"
#include "hybridsim/signals.hpp"
#include "hybridsim/solar_plant.hpp"
#include "hybridsim/supervisor.hpp"
#include "hybridsim/wind_farm.hpp"

namespace hybridsim {

inline constexpr int kScenarioSchemaVersion = 1;

struct InitialConditions {
    double tip_speed_ratio = 6.0;  // every turbine against its own effective wind
    SolarState solar;
    BatteryState battery;
};

struct Scenario {
    int schema_version = kScenarioSchemaVersion;
    double duration = 6.0 * 3600.0;  // s
    double dt = 0.5;                 // s
    std::uint64_t seed = 0;
    std::optional<SignalProfile> synthetic_profile;  // set when signals are generated
    SyntheticSignalOptions synthetic_options;
    SignalSeries wind;        // m/s
    SignalSeries irradiance;  // W/m^2
    SignalSeries demand;      // W
    WindFarm farm;
    SolarParams solar;
    BatteryParams battery;
    SupervisorParams supervisor;
    InitialConditions initial;
    Execution execution = Execution::Serial;

    // Checks every invariant; throws ValidationError naming the first violated one.
    void validate() const;
};

// Plant parameters of the reference configuration: 8 x 4 farm of 5 MW
// turbines at 7 D spacing, k_w = 0.04, c_w = 1; 1e5 m^2 solar at 50 %
// with tau = 10 s, K_p = 2.5, K_i = 0.2; 160 MWh / 40 MW battery with
// z in [0.1, 0.9]. Signals are left empty.
Scenario reference_plant();

// Reference plant plus synthetic signals for the given seed and profile.
Scenario default_scenario(std::uint64_t seed = 7, SignalProfile profile = SignalProfile::Ramping,
                          double duration = 6.0 * 3600.0);

// Parses a JSON scenario. Relative CSV paths resolve against base_dir.
// Throws ParseError (syntax, types, unknown fields, unreadable files) or
// ValidationError (invariants).
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir,
                        const std::string& source_name = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

// Replaces dt and/or duration, regenerating synthetic signals for a new
// duration, and re-validates.
void override_timing(Scenario& scenario, std::optional<double> dt,
                     std::optional<double> duration);

// Fully resolved parameter set, defaults included, as pretty JSON.
std::string describe_scenario(const Scenario& scenario);

}  // namespace hybridsim
