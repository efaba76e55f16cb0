#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hybridsim/errors.hpp"
#include "hybridsim/outputs.hpp"
#include "hybridsim/scenario.hpp"
#include "hybridsim/signals.hpp"
#include "hybridsim/simulation.hpp"

using namespace hybridsim;

namespace {

std::string quoted(const std::string& s)
{
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

int fail(const std::string& kind, const std::string& message, int code)
{
    std::cerr << "error: kind=" << kind << " message=" << quoted(message) << '\n';
    return code;
}

int exit_code_for(const std::string& kind)
{
    if (kind == "ParseError" || kind == "ValidationError") return 3;
    if (kind == "IoError") return 5;
    return 4;
}

Scenario load_with_overrides(const std::string& config, std::optional<double> dt,
                             std::optional<double> duration)
{
    Scenario s = load_scenario(config);
    if (dt || duration) override_timing(s, dt, duration);
    return s;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hybrid wind/solar/battery plant simulator with barrier-function safety filters"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir;
    std::string run_dir;
    std::string profile;
    std::uint64_t seed = 0;
    std::optional<double> dt;
    std::optional<double> duration;

    auto* run = app.add_subcommand("run", "Simulate a scenario and write outputs");
    run->add_option("config", config, "Scenario JSON")->required();
    run->add_option("--out", out_dir, "Output directory")->default_val("run_out");
    run->add_option("--dt", dt, "Override the step size, s");
    run->add_option("--duration", duration, "Override the duration, s");

    auto* validate = app.add_subcommand("validate", "Load and validate a scenario");
    validate->add_option("config", config, "Scenario JSON")->required();
    validate->add_option("--dt", dt, "Override the step size, s");
    validate->add_option("--duration", duration, "Override the duration, s");

    auto* gen = app.add_subcommand("gen-signals", "Write synthetic wind, irradiance and demand CSVs");
    gen->add_option("seed", seed, "RNG seed")->required();
    gen->add_option("profile", profile, "steady, ramping or gusty")->required();
    gen->add_option("--out", out_dir, "Output directory")->default_val("signals");
    gen->add_option("--duration", duration, "Signal span, s (default 21600)");
    gen->add_option("--dt", dt, "Sample interval, s (default 1)");

    auto* summarize = app.add_subcommand("summarize", "Recompute the summary of a run directory");
    summarize->add_option("run_dir", run_dir, "Directory written by run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("UsageError", e.what(), 2);
    }

    try {
        if (*run) {
            const Scenario s = load_with_overrides(config, dt, duration);
            const RunRecord rec = run_scenario(s);
            write_outputs(rec, out_dir, s);
            const InvariantReport inv = check_invariants(s, rec);
            std::cout << format_summary(compute_summary(rec, s.supervisor.battery_power_rating));
            std::cout << "invariant_violations = " << inv.total() << '\n';
            std::cout << "output_dir = " << out_dir << '\n';
            if (inv.total() > 0) {
                const std::string first = inv.messages.empty() ? "" : inv.messages.front();
                return fail("InvariantViolation", first, 6);
            }
        } else if (*validate) {
            const Scenario s = load_with_overrides(config, dt, duration);
            std::cout << describe_scenario(s) << '\n';
            std::cout << "ok\n";
        } else if (*gen) {
            SyntheticSignalOptions opts;
            if (dt) opts.sample_interval = *dt;
            const SyntheticSignals sig = generate_synthetic_signals(
                seed, duration.value_or(6.0 * 3600.0), parse_profile(profile), opts);
            std::error_code ec;
            std::filesystem::create_directories(out_dir, ec);
            if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());
            const std::filesystem::path dir(out_dir);
            write_signal_csv(dir / "wind.csv", "wind_speed", sig.wind);
            write_signal_csv(dir / "irradiance.csv", "irradiance", sig.irradiance);
            write_signal_csv(dir / "demand.csv", "demand", sig.demand);
            std::cout << "wrote " << sig.wind.size() << " samples per signal to " << out_dir << '\n';
        } else if (*summarize) {
            std::cout << format_summary(summarize_run_dir(run_dir));
        }
    } catch (const SimError& e) {
        return fail(e.kind(), e.what(), exit_code_for(e.kind()));
    } catch (const std::exception& e) {
        return fail("InternalError", e.what(), 1);
    }
    return 0;
}
