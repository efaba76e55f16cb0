#include "hybridsim/signals.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace hybridsim {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return s.substr(first, last - first + 1);
}

bool parse_number(std::string_view text, double& out)
{
    text = trim(text);
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

std::string format_double(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

TwoColumnTable read_two_column_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open CSV file '" + path.string() + "'");
    TwoColumnTable table;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        double a = 0.0;
        double b = 0.0;
        if (comma == std::string::npos ||
            !parse_number(std::string_view(line).substr(0, comma), a) ||
            !parse_number(std::string_view(line).substr(comma + 1), b)) {
            std::ostringstream msg;
            msg << path.string() << ":" << line_no << ": expected two numeric columns";
            throw ParseError(msg.str());
        }
        table.first.push_back(a);
        table.second.push_back(b);
    }
    if (table.first.empty()) throw ParseError(path.string() + ": no data rows");
    return table;
}

void write_two_column_csv(const std::filesystem::path& path, const std::string& header_a,
                          const std::string& header_b, const std::vector<double>& a,
                          const std::vector<double>& b)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << header_a << ',' << header_b << '\n';
    for (std::size_t i = 0; i < a.size(); ++i) {
        out << format_double(a[i]) << ',' << format_double(b[i]) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

SignalSeries read_signal_csv(const std::filesystem::path& path, Interpolation mode)
{
    TwoColumnTable t = read_two_column_csv(path);
    try {
        return SignalSeries(std::move(t.first), std::move(t.second), mode);
    } catch (const ValidationError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_signal_csv(const std::filesystem::path& path, const std::string& value_name,
                      const SignalSeries& series)
{
    write_two_column_csv(path, "time", value_name, series.times(), series.values());
}

SignalProfile parse_profile(const std::string& name)
{
    if (name == "steady") return SignalProfile::Steady;
    if (name == "ramping") return SignalProfile::Ramping;
    if (name == "gusty") return SignalProfile::Gusty;
    throw ValidationError("profile must be one of steady, ramping, gusty (got '" + name + "')");
}

std::string profile_name(SignalProfile profile)
{
    switch (profile) {
    case SignalProfile::Steady: return "steady";
    case SignalProfile::Ramping: return "ramping";
    case SignalProfile::Gusty: return "gusty";
    }
    return "steady";
}

SyntheticSignals generate_synthetic_signals(std::uint64_t seed, double duration,
                                            SignalProfile profile,
                                            const SyntheticSignalOptions& options)
{
    if (!(duration >= 0.0)) throw ValidationError("duration >= 0");
    if (!(options.sample_interval > 0.0)) throw ValidationError("sample_interval > 0");

    std::vector<double> times;
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * options.sample_interval;
        if (t > duration) break;
        times.push_back(t);
    }
    if (times.back() < duration) times.push_back(duration);
    const std::size_t n = times.size();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    // Wind, m/s.
    const double wind_mean = 8.0 + 4.0 * uniform(rng);
    std::vector<double> wind(n, wind_mean);
    switch (profile) {
    case SignalProfile::Steady: {
        double x = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            x = 0.9 * x + 0.02 * normal(rng);
            wind[k] = wind_mean + x;
        }
        break;
    }
    case SignalProfile::Ramping: {
        // Piecewise-linear ramps between knots every 30 minutes.
        const double knot_spacing = 1800.0;
        const auto knots = static_cast<std::size_t>(std::ceil(duration / knot_spacing)) + 1;
        std::vector<double> level(knots);
        for (auto& v : level) v = wind_mean + 4.0 * (uniform(rng) - 0.5);
        for (std::size_t k = 0; k < n; ++k) {
            const double pos = times[k] / knot_spacing;
            const auto i = std::min(static_cast<std::size_t>(pos), knots - 2);
            const double w = pos - static_cast<double>(i);
            wind[k] = level[i] + w * (level[i + 1] - level[i]);
        }
        break;
    }
    case SignalProfile::Gusty: {
        double turb = 0.0;
        const double a = std::exp(-options.sample_interval / 60.0);
        const double sd = 1.2 * std::sqrt(1.0 - a * a);
        for (std::size_t k = 0; k < n; ++k) {
            turb = a * turb + sd * normal(rng);
            wind[k] = wind_mean + turb;
        }
        break;
    }
    }
    for (auto& w : wind) w = std::clamp(w, 3.0, 16.0);

    // Irradiance: clear-sky diurnal bump with cloud attenuation.
    std::vector<double> irradiance(n);
    struct Cloud {
        double start, end, depth, edge;
    };
    std::vector<Cloud> clouds;
    if (profile == SignalProfile::Ramping) {
        const double jitter = 600.0 * (uniform(rng) - 0.5);
        clouds.push_back({5400.0 + jitter, 10800.0 + jitter, 0.7, 900.0});
    } else if (profile == SignalProfile::Gusty) {
        double t = 0.0;
        while (true) {
            t += 1200.0 + 2400.0 * uniform(rng);
            if (t > duration) break;
            const double len = 120.0 + 480.0 * uniform(rng);
            clouds.push_back({t, t + len, 0.3 + 0.5 * uniform(rng), 60.0});
            t += len;
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double hour = options.start_hour + times[k] / 3600.0;
        const double day = std::fmod(hour, 24.0);
        double clear = 1000.0 * std::sin(std::numbers::pi * (day - 6.0) / 12.0);
        clear = std::max(clear, 0.0);
        double factor = 1.0;
        for (const Cloud& c : clouds) {
            double cover = 0.0;
            if (times[k] >= c.start && times[k] <= c.end) {
                cover = std::min({1.0, (times[k] - c.start) / c.edge, (c.end - times[k]) / c.edge});
            }
            factor = std::min(factor, 1.0 - c.depth * cover);
        }
        irradiance[k] = std::clamp(clear * factor, 0.0, 1000.0);
    }

    // Demand: mean-reverting random walk, low-pass filtered, clamped to a band
    // inside the plant rating.
    const double base = options.demand_mean_fraction * options.plant_rating;
    const double band = options.demand_band_fraction * options.plant_rating;
    const double revert = 1800.0;
    const double sigma = 0.5 * band / std::sqrt(0.5 * revert);
    const double smooth = std::exp(-options.sample_interval / 120.0);
    const double lo = std::max(0.0, base - band);
    const double hi = std::min(options.plant_rating, base + band);
    std::vector<double> demand(n);
    double walk = 0.0;
    double filtered = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double h = options.sample_interval;
        walk += -walk / revert * h + sigma * std::sqrt(h) * normal(rng);
        filtered = smooth * filtered + (1.0 - smooth) * walk;
        demand[k] = std::clamp(base + filtered, lo, hi);
    }

    SyntheticSignals out;
    out.wind = SignalSeries(times, std::move(wind));
    out.irradiance = SignalSeries(times, std::move(irradiance));
    out.demand = SignalSeries(times, std::move(demand));
    return out;
}

}  // namespace hybridsim
