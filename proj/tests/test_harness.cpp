#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hybridsim/outputs.hpp"
#include "hybridsim/scenario.hpp"
#include "hybridsim/signals.hpp"
#include "hybridsim/simulation.hpp"

using namespace hybridsim;
namespace fs = std::filesystem;

namespace {

const fs::path kData = HYBRIDSIM_DATA_DIR;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
    {
        path = fs::temp_directory_path() / ("hybridsim_test_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SignalSeries constant(double value, double duration)
{
    return SignalSeries({0.0, duration}, {value, value});
}

Scenario short_scenario(double duration)
{
    return default_scenario(3, SignalProfile::Gusty, duration);
}

template <typename Fn>
std::string error_message(Fn&& fn)
{
    try {
        fn();
    } catch (const SimError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("bundled scenarios load")
{
    const Scenario def = load_scenario(kData / "default_scenario.json");
    CHECK(def.duration == 21600.0);
    CHECK(def.dt == 0.5);
    CHECK(def.farm.layout.size() == 32);

    const Scenario min = load_scenario(kData / "minimal_scenario.json");
    CHECK(min.dt == 0.5);
    CHECK(min.farm.layout.dx == doctest::Approx(7.0 * 2.0 * 63.0));
    CHECK(min.farm.layout.k_w == 0.04);
    CHECK(min.farm.control.barrier_slope == 1.0);
    CHECK(min.solar.area == 1.0e5);
    CHECK(min.solar.efficiency == 0.5);
    CHECK(min.solar.tau == 10.0);
    CHECK(min.solar.kp == 2.5);
    CHECK(min.solar.ki == 0.2);
    CHECK(min.battery.n_s == 1557.0);
    CHECK(min.battery.z_min == 0.1);
    CHECK(min.battery.z_max == 0.9);
    CHECK(min.battery.r_e == 0.0);
    CHECK(min.supervisor.battery_power_rating == 40.0e6);
    CHECK(min.synthetic_profile == SignalProfile::Steady);
}

TEST_CASE("invalid configurations are rejected with the reason")
{
    const std::string crossed = R"({
        "signals": {"synthetic": {"seed": 1, "profile": "steady"}},
        "battery": {"z_min": 0.9, "z_max": 0.1}
    })";
    CHECK_THROWS_AS(parse_scenario(crossed, kData), ValidationError);
    CHECK(error_message([&] { parse_scenario(crossed, kData); }).find("z_min < z_max") !=
          std::string::npos);

    const std::string missing = R"({
        "signals": {"wind": "no_such_wind.csv", "irradiance": "x.csv", "demand": "y.csv"}
    })";
    CHECK_THROWS_AS(parse_scenario(missing, kData), ParseError);
    CHECK(error_message([&] { parse_scenario(missing, kData); }).find("no_such_wind.csv") !=
          std::string::npos);

    const std::string unknown = R"({
        "signals": {"synthetic": {"seed": 1, "profile": "steady"}},
        "solar": {"tau": 10, "gain_kp": 3}
    })";
    CHECK_THROWS_AS(parse_scenario(unknown, kData), ParseError);
    CHECK(error_message([&] { parse_scenario(unknown, kData); }).find("gain_kp") !=
          std::string::npos);

    const std::string syntax = "{\n  \"duration\": 10,\n  \"dt\": ,\n}";
    CHECK_THROWS_AS(parse_scenario(syntax, kData, "bad.json"), ParseError);
    CHECK(error_message([&] { parse_scenario(syntax, kData, "bad.json"); }).find("bad.json:3") !=
          std::string::npos);

    const std::string no_signals = R"({"duration": 10})";
    CHECK_THROWS_AS(parse_scenario(no_signals, kData), ParseError);

    CHECK_THROWS_AS(load_scenario(kData / "does_not_exist.json"), ParseError);
}

TEST_CASE("CSV signals load and must cover the run")
{
    TempDir dir("csv_signals");
    write_signal_csv(dir.path / "wind.csv", "wind_speed", constant(9.0, 100.0));
    write_signal_csv(dir.path / "irr.csv", "irradiance", constant(600.0, 100.0));
    write_signal_csv(dir.path / "dem.csv", "demand", constant(5.0e7, 100.0));
    const std::string ok = R"({
        "duration": 100,
        "signals": {"wind": "wind.csv", "irradiance": "irr.csv", "demand": "dem.csv"}
    })";
    const Scenario s = parse_scenario(ok, dir.path);
    CHECK(s.wind.sample(50.0) == 9.0);
    CHECK_FALSE(s.synthetic_profile.has_value());

    const std::string too_long = R"({
        "duration": 200,
        "signals": {"wind": "wind.csv", "irradiance": "irr.csv", "demand": "dem.csv"}
    })";
    CHECK_THROWS_AS(parse_scenario(too_long, dir.path), ValidationError);
}

TEST_CASE("row count and time grid")
{
    CHECK(expected_row_count(10.0, 0.5) == 21);
    CHECK(expected_row_count(1.0, 0.3) == 4);
    Scenario s = short_scenario(120.0);
    const RunRecord r = run_scenario(s);
    REQUIRE(r.rows.size() == expected_row_count(120.0, 0.5));
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
        CHECK(r.rows[k].time == doctest::Approx(0.5 * k).epsilon(1e-12));
        CHECK(r.rows[k].tip_speed_ratio.size() == 32);
    }
}

TEST_CASE("zero demand from calm states produces no power")
{
    Scenario s = reference_plant();
    s.duration = 300.0;
    s.wind = constant(10.0, 300.0);
    s.irradiance = constant(700.0, 300.0);
    s.demand = constant(0.0, 300.0);
    s.initial.tip_speed_ratio = 1.5;
    s.validate();
    const RunRecord r = run_scenario(s);
    for (const RunRow& row : r.rows) REQUIRE(std::abs(row.total_power) < 1.0e3);
}

TEST_CASE("invariants hold on a short gusty run")
{
    const Scenario s = short_scenario(1800.0);
    const RunRecord r = run_scenario(s);
    const InvariantReport rep = check_invariants(s, r);
    CHECK(rep.total() == 0);
    CHECK(rep.tsr_violations == 0);
    CHECK(rep.energy_relative_error < 1e-6);
    // A drop in the held free-stream wind at the start of a step can lift
    // lambda above the ceiling; otherwise an excursion may only decay.
    const double cap = s.farm.control.lambda_barrier;
    for (std::size_t k = 2; k < r.rows.size(); ++k) {
        const RunRow& prev = r.rows[k - 1];
        const bool wind_dropped = prev.wind_speed < r.rows[k - 2].wind_speed;
        for (std::size_t j = 0; j < prev.tip_speed_ratio.size(); ++j) {
            const double lambda = r.rows[k].tip_speed_ratio[j];
            if (lambda > cap * (1.0 + 1e-6) && !wind_dropped) {
                REQUIRE(lambda < prev.tip_speed_ratio[j]);
            }
        }
    }
}

TEST_CASE("identical scenarios give identical records")
{
    const Scenario s = short_scenario(300.0);
    const RunRecord a = run_scenario(s);
    const RunRecord b = run_scenario(s);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        REQUIRE(a.rows[k].total_power == b.rows[k].total_power);
        REQUIRE(a.rows[k].soc == b.rows[k].soc);
        REQUIRE(a.rows[k].tip_speed_ratio == b.rows[k].tip_speed_ratio);
    }

    Scenario par = s;
    par.execution = Execution::Parallel;
    const RunRecord c = run_scenario(par);
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        REQUIRE(a.rows[k].total_power == c.rows[k].total_power);
    }
}

TEST_CASE("timeseries round-trips exactly and the summary matches the file")
{
    TempDir dir("roundtrip");
    const Scenario s = short_scenario(200.0);
    const RunRecord r = run_scenario(s);
    write_outputs(r, dir.path, s);
    for (const char* name : {"timeseries.csv", "events.csv", "summary.txt", "run_meta.json",
                             "plots/powers_vs_time.csv", "plots/demand_vs_total.csv",
                             "plots/soc_vs_time.csv"}) {
        CHECK(fs::exists(dir.path / name));
    }

    const RunRecord back = read_timeseries(dir.path / "timeseries.csv");
    REQUIRE(back.rows.size() == r.rows.size());
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
        REQUIRE(back.rows[k].time == r.rows[k].time);
        REQUIRE(back.rows[k].total_power == r.rows[k].total_power);
        REQUIRE(back.rows[k].soc == r.rows[k].soc);
        REQUIRE(back.rows[k].cell_charge == r.rows[k].cell_charge);
        REQUIRE(back.rows[k].tsr_violations == r.rows[k].tsr_violations);
        REQUIRE(back.rows[k].tip_speed_ratio == r.rows[k].tip_speed_ratio);
    }

    // Independent parse of the CSV for the RMS tracking error.
    std::ifstream in(dir.path / "timeseries.csv");
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    const auto col = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        FAIL("missing column " << name);
        return std::size_t{0};
    };
    const std::size_t i_total = col("total_power");
    const std::size_t i_demand = col("demand");
    double sum_sq = 0.0;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
        const double e = cells[i_total] - cells[i_demand];
        sum_sq += e * e;
        ++n;
    }
    CHECK(n == r.rows.size());
    const double rms = std::sqrt(sum_sq / static_cast<double>(n));
    const RunSummary sum = summarize_run_dir(dir.path);
    CHECK(std::abs(sum.rms_tracking_error - rms) <= 1e-9 * std::max(rms, 1.0));
    CHECK(sum.rows == r.rows.size());
    const RunSummary direct = compute_summary(r, s.supervisor.battery_power_rating);
    CHECK(direct.rms_tracking_error == doctest::Approx(rms).epsilon(1e-12));
}

TEST_CASE("empty record writes a header-only CSV and notes zero rows")
{
    TempDir dir("empty");
    RunRecord r;
    r.n_turbines = 4;
    write_timeseries(r, dir.path / "timeseries.csv");
    const std::string text = read_file(dir.path / "timeseries.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 1);
    CHECK(text.find("tsr_3") != std::string::npos);
    const std::string summary = format_summary(compute_summary(r, 40.0e6));
    CHECK(summary.find("rows = 0") != std::string::npos);
    CHECK(summary.find("no rows") != std::string::npos);
}

TEST_CASE("synthetic signals are reproducible and shaped by profile")
{
    const auto a = generate_synthetic_signals(42, 3600.0, SignalProfile::Gusty);
    const auto b = generate_synthetic_signals(42, 3600.0, SignalProfile::Gusty);
    CHECK(a.wind.values() == b.wind.values());
    CHECK(a.irradiance.values() == b.irradiance.values());
    CHECK(a.demand.values() == b.demand.values());
    const auto c = generate_synthetic_signals(43, 3600.0, SignalProfile::Gusty);
    CHECK(a.wind.values() != c.wind.values());

    TempDir dir("gen");
    write_signal_csv(dir.path / "a.csv", "wind_speed", a.wind);
    write_signal_csv(dir.path / "b.csv", "wind_speed", b.wind);
    CHECK(read_file(dir.path / "a.csv") == read_file(dir.path / "b.csv"));

    SyntheticSignalOptions opts;
    for (const SignalProfile p : {SignalProfile::Steady, SignalProfile::Ramping,
                                  SignalProfile::Gusty}) {
        const auto s = generate_synthetic_signals(5, 21600.0, p, opts);
        CHECK(s.wind.times().front() == 0.0);
        CHECK(s.wind.times().back() >= 21600.0);
        for (const double d : s.demand.values()) {
            REQUIRE(d >= 0.0);
            REQUIRE(d <= opts.plant_rating);
        }
        for (const double u : s.wind.values()) REQUIRE(u > 0.0);
        for (const double i : s.irradiance.values()) REQUIRE(i >= 0.0);
    }

    const auto steady = generate_synthetic_signals(5, 21600.0, SignalProfile::Steady);
    double mean = 0.0;
    for (const double u : steady.wind.values()) mean += u;
    mean /= static_cast<double>(steady.wind.size());
    double var = 0.0;
    for (const double u : steady.wind.values()) var += (u - mean) * (u - mean);
    var /= static_cast<double>(steady.wind.size());
    CHECK(var < 0.01 * mean);
}

TEST_CASE("timing overrides")
{
    Scenario s = short_scenario(600.0);
    override_timing(s, 0.25, 120.0);
    CHECK(s.dt == 0.25);
    CHECK(s.duration == 120.0);
    CHECK(run_scenario(s).rows.size() == 481);
    CHECK_THROWS_AS(override_timing(s, -1.0, std::nullopt), ValidationError);
}

TEST_CASE("described scenario parses back to the same plant")
{
    const Scenario s = load_scenario(kData / "minimal_scenario.json");
    const std::string text = describe_scenario(s);
    CHECK(text.find("\"lambda_barrier\"") != std::string::npos);
    CHECK(text.find("\"k_ic\"") != std::string::npos);
}
