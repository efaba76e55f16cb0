#include "hybridsim/outputs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "hybridsim/errors.hpp"

namespace hybridsim {

namespace {

using nlohmann::json;

struct Column {
    const char* name;
    std::function<double(const RunRow&)> get;
    std::function<void(RunRow&, double)> set;
};

#define HYBRIDSIM_REAL_COLUMN(field)                                                    \
    Column{#field, [](const RunRow& r) { return static_cast<double>(r.field); },        \
           [](RunRow& r, double v) { r.field = v; }}
#define HYBRIDSIM_INT_COLUMN(field)                                                     \
    Column{#field, [](const RunRow& r) { return static_cast<double>(r.field); },        \
           [](RunRow& r, double v) { r.field = static_cast<int>(v); }}

const std::vector<Column>& columns()
{
    static const std::vector<Column> cols = {
        HYBRIDSIM_REAL_COLUMN(time),
        HYBRIDSIM_REAL_COLUMN(demand),
        HYBRIDSIM_REAL_COLUMN(wind_speed),
        HYBRIDSIM_REAL_COLUMN(irradiance),
        HYBRIDSIM_REAL_COLUMN(wind_available),
        HYBRIDSIM_REAL_COLUMN(solar_available),
        HYBRIDSIM_REAL_COLUMN(wind_setpoint),
        HYBRIDSIM_REAL_COLUMN(solar_setpoint),
        HYBRIDSIM_REAL_COLUMN(battery_setpoint),
        HYBRIDSIM_REAL_COLUMN(wind_power),
        HYBRIDSIM_REAL_COLUMN(solar_power),
        HYBRIDSIM_REAL_COLUMN(battery_power),
        HYBRIDSIM_REAL_COLUMN(total_power),
        HYBRIDSIM_REAL_COLUMN(soc),
        HYBRIDSIM_REAL_COLUMN(cell_current),
        HYBRIDSIM_REAL_COLUMN(cell_charge),
        HYBRIDSIM_REAL_COLUMN(iss_gain),
        HYBRIDSIM_REAL_COLUMN(disturbance_peak),
        HYBRIDSIM_INT_COLUMN(wind_qp_events),
        HYBRIDSIM_INT_COLUMN(battery_qp_events),
        HYBRIDSIM_INT_COLUMN(tsr_violations),
    };
    return cols;
}

#undef HYBRIDSIM_REAL_COLUMN
#undef HYBRIDSIM_INT_COLUMN

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path)
{
    out.close();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> parts;
    while (true) {
        const auto comma = line.find(',');
        parts.push_back(line.substr(0, comma));
        if (comma == std::string_view::npos) break;
        line.remove_prefix(comma + 1);
    }
    return parts;
}

void write_long(const std::filesystem::path& path, const RunRecord& record,
                const std::vector<std::pair<const char*, double RunRow::*>>& series)
{
    auto out = open_out(path);
    out << "time,series,value\n";
    for (const RunRow& r : record.rows) {
        for (const auto& [name, field] : series) {
            out << format_double(r.time) << ',' << name << ',' << format_double(r.*field) << '\n';
        }
    }
    close_out(out, path);
}

}  // namespace

RunSummary compute_summary(const RunRecord& record, double battery_power_rating)
{
    RunSummary s;
    s.rows = record.rows.size();
    if (s.rows == 0) return s;
    s.duration = record.rows.back().time - record.rows.front().time;
    s.soc_min = s.soc_max = record.rows.front().soc;
    double sum_demand = 0.0;
    double sum_sq = 0.0;
    std::size_t wind_sat = 0;
    std::size_t solar_sat = 0;
    std::size_t batt_sat = 0;
    for (const RunRow& r : record.rows) {
        sum_demand += r.demand;
        const double e = r.total_power - r.demand;
        sum_sq += e * e;
        if (r.wind_available > 0.0 && r.wind_setpoint >= r.wind_available) ++wind_sat;
        if (r.solar_available > 0.0 && r.solar_setpoint >= r.solar_available) ++solar_sat;
        if (battery_power_rating > 0.0 && std::abs(r.battery_setpoint) >= battery_power_rating) {
            ++batt_sat;
        }
        s.soc_min = std::min(s.soc_min, r.soc);
        s.soc_max = std::max(s.soc_max, r.soc);
        for (const double l : r.tip_speed_ratio) s.max_tip_speed_ratio = std::max(s.max_tip_speed_ratio, l);
        s.wind_qp_events += r.wind_qp_events;
        s.battery_qp_events += r.battery_qp_events;
        s.tsr_violations += r.tsr_violations;
    }
    const auto n = static_cast<double>(s.rows);
    s.mean_demand = sum_demand / n;
    s.rms_tracking_error = std::sqrt(sum_sq / n);
    s.rms_relative = s.mean_demand > 0.0 ? s.rms_tracking_error / s.mean_demand : 0.0;
    s.wind_saturation = static_cast<double>(wind_sat) / n;
    s.solar_saturation = static_cast<double>(solar_sat) / n;
    s.battery_saturation = static_cast<double>(batt_sat) / n;
    s.soc_final = record.rows.back().soc;
    return s;
}

std::string format_summary(const RunSummary& s)
{
    std::ostringstream out;
    out << "rows = " << s.rows << '\n';
    if (s.rows == 0) {
        out << "note = no rows recorded, statistics omitted\n";
        return out.str();
    }
    const auto line = [&](const char* key, double v) { out << key << " = " << format_double(v) << '\n'; };
    line("duration_s", s.duration);
    line("mean_demand_w", s.mean_demand);
    line("rms_tracking_error_w", s.rms_tracking_error);
    line("rms_tracking_error_relative", s.rms_relative);
    line("wind_saturation_fraction", s.wind_saturation);
    line("solar_saturation_fraction", s.solar_saturation);
    line("battery_saturation_fraction", s.battery_saturation);
    line("soc_min", s.soc_min);
    line("soc_max", s.soc_max);
    line("soc_final", s.soc_final);
    line("max_tip_speed_ratio", s.max_tip_speed_ratio);
    out << "wind_qp_events = " << s.wind_qp_events << '\n';
    out << "battery_qp_events = " << s.battery_qp_events << '\n';
    out << "tsr_violations = " << s.tsr_violations << '\n';
    return out.str();
}

void write_timeseries(const RunRecord& record, const std::filesystem::path& path)
{
    auto out = open_out(path);
    const auto& cols = columns();
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c].name;
    for (std::size_t j = 0; j < record.n_turbines; ++j) out << ",tsr_" << j;
    out << '\n';
    std::string buf;
    for (const RunRow& r : record.rows) {
        buf.clear();
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) buf += ',';
            buf += format_double(cols[c].get(r));
        }
        for (const double l : r.tip_speed_ratio) {
            buf += ',';
            buf += format_double(l);
        }
        buf += '\n';
        out << buf;
    }
    close_out(out, path);
}

RunRecord read_timeseries(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ":1: missing header");
    const auto header = split(line);
    const auto& cols = columns();
    if (header.size() < cols.size()) throw ParseError(path.string() + ":1: too few columns");
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (header[c] != cols[c].name) {
            throw ParseError(path.string() + ":1: expected column '" + cols[c].name + "'");
        }
    }
    RunRecord rec;
    rec.n_turbines = header.size() - cols.size();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != header.size()) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected " + std::to_string(header.size()) + " fields");
        }
        RunRow row;
        row.tip_speed_ratio.resize(rec.n_turbines);
        for (std::size_t c = 0; c < fields.size(); ++c) {
            double v = 0.0;
            const auto f = fields[c];
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc() || ptr != f.data() + f.size()) {
                throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad number in column " +
                                 std::string(header[c]));
            }
            if (c < cols.size()) {
                cols[c].set(row, v);
            } else {
                row.tip_speed_ratio[c - cols.size()] = v;
            }
        }
        rec.rows.push_back(std::move(row));
    }
    return rec;
}

void write_outputs(const RunRecord& record, const std::filesystem::path& out_dir,
                   const Scenario& scenario)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir / "plots", ec);
    if (ec) throw IoError("cannot create '" + (out_dir / "plots").string() + "': " + ec.message());

    write_timeseries(record, out_dir / "timeseries.csv");

    {
        const auto path = out_dir / "events.csv";
        auto out = open_out(path);
        out << "time,kind,detail\n";
        for (const RunEvent& e : record.events) {
            out << format_double(e.time) << ',' << e.kind << ",\"" << e.detail << "\"\n";
        }
        close_out(out, path);
    }

    const double rating = scenario.supervisor.battery_power_rating;
    const RunSummary summary = compute_summary(record, rating);
    {
        const auto path = out_dir / "summary.txt";
        auto out = open_out(path);
        out << format_summary(summary);
        close_out(out, path);
    }

    {
        json meta;
        meta["schema_version"] = kScenarioSchemaVersion;
        meta["rows"] = record.rows.size();
        meta["n_turbines"] = record.n_turbines;
        meta["lambda_barrier"] = record.lambda_barrier;
        meta["battery_power_rating"] = rating;
        meta["events"] = record.events.size();
        meta["scenario"] = json::parse(describe_scenario(scenario));
        const auto path = out_dir / "run_meta.json";
        auto out = open_out(path);
        out << meta.dump(2) << '\n';
        close_out(out, path);
    }

    write_long(out_dir / "plots" / "powers_vs_time.csv", record,
               {{"wind", &RunRow::wind_power},
                {"solar", &RunRow::solar_power},
                {"battery", &RunRow::battery_power},
                {"total", &RunRow::total_power},
                {"demand", &RunRow::demand}});
    write_long(out_dir / "plots" / "demand_vs_total.csv", record,
               {{"demand", &RunRow::demand}, {"total", &RunRow::total_power}});
    write_long(out_dir / "plots" / "soc_vs_time.csv", record, {{"soc", &RunRow::soc}});
}

RunSummary summarize_run_dir(const std::filesystem::path& run_dir)
{
    RunRecord rec = read_timeseries(run_dir / "timeseries.csv");
    double rating = 0.0;
    const auto meta_path = run_dir / "run_meta.json";
    std::ifstream in(meta_path);
    if (!in) throw ParseError("cannot open '" + meta_path.string() + "'");
    try {
        const json meta = json::parse(in);
        rating = meta.at("battery_power_rating").get<double>();
    } catch (const json::exception& e) {
        throw ParseError(meta_path.string() + ": " + e.what());
    }
    return compute_summary(rec, rating);
}

}  // namespace hybridsim
