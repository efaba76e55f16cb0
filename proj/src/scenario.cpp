#include "hybridsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hybridsim {

using nlohmann::json;

namespace {

// Typed view of one JSON object that remembers which keys were read, so
// unknown (usually misspelled) keys can be reported.
class Section {
public:
    Section(const json& node, std::string path) : node_(&node), path_(std::move(path))
    {
        if (!node.is_object()) throw ParseError(where() + ": expected an object");
    }

    double number(const std::string& key, double fallback)
    {
        const json* v = find(key);
        if (v == nullptr) return fallback;
        if (!v->is_number()) throw ParseError(field(key) + ": expected a number");
        return v->get<double>();
    }

    std::optional<double> maybe_number(const std::string& key)
    {
        const json* v = find(key);
        if (v == nullptr) return std::nullopt;
        if (!v->is_number()) throw ParseError(field(key) + ": expected a number");
        return v->get<double>();
    }

    int integer(const std::string& key, int fallback)
    {
        const json* v = find(key);
        if (v == nullptr) return fallback;
        if (!v->is_number_integer()) throw ParseError(field(key) + ": expected an integer");
        return v->get<int>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback)
    {
        const json* v = find(key);
        if (v == nullptr) return fallback;
        if (!v->is_number_unsigned()) {
            throw ParseError(field(key) + ": expected a non-negative integer");
        }
        return v->get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback)
    {
        const json* v = find(key);
        if (v == nullptr) return fallback;
        if (!v->is_boolean()) throw ParseError(field(key) + ": expected true or false");
        return v->get<bool>();
    }

    std::optional<std::string> string(const std::string& key)
    {
        const json* v = find(key);
        if (v == nullptr) return std::nullopt;
        if (!v->is_string()) throw ParseError(field(key) + ": expected a string");
        return v->get<std::string>();
    }

    std::optional<Section> child(const std::string& key)
    {
        const json* v = find(key);
        if (v == nullptr) return std::nullopt;
        return Section(*v, field(key));
    }

    bool has(const std::string& key) const { return node_->contains(key); }

    void finish() const
    {
        for (const auto& item : node_->items()) {
            if (!used_.contains(item.key())) {
                throw ParseError(field(item.key()) + ": unknown field");
            }
        }
    }

    std::string field(const std::string& key) const
    {
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    const json* find(const std::string& key)
    {
        used_.insert(key);
        const auto it = node_->find(key);
        return it == node_->end() ? nullptr : &*it;
    }
    std::string where() const { return path_.empty() ? "<root>" : path_; }

    const json* node_;
    std::string path_;
    std::set<std::string> used_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

PiecewiseLinear read_curve(const std::filesystem::path& path)
{
    TwoColumnTable t = read_two_column_csv(path);
    try {
        return PiecewiseLinear(std::move(t.first), std::move(t.second));
    } catch (const ValidationError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

Interpolation parse_interpolation(const std::string& field, const std::string& name)
{
    if (name == "zoh" || name == "zero_order_hold") return Interpolation::ZeroOrderHold;
    if (name == "linear") return Interpolation::Linear;
    throw ParseError(field + ": expected 'zoh' or 'linear'");
}

Execution parse_execution(const std::string& name)
{
    if (name == "parallel") return Execution::Parallel;
    if (name == "serial") return Execution::Serial;
    throw ParseError("execution: expected 'parallel' or 'serial'");
}

void check_signal(const SignalSeries& s, const std::string& name, double duration, double lower,
                  bool strict)
{
    if (s.empty()) throw ValidationError(name + " signal is missing");
    if (s.first_time() > 0.0 || s.last_time() < duration) {
        std::ostringstream msg;
        msg << name << " signal span [" << s.first_time() << ", " << s.last_time()
            << "] must cover [0, " << duration << "]";
        throw ValidationError(msg.str());
    }
    for (const double v : s.values()) {
        if (!std::isfinite(v) || (strict ? !(v > lower) : !(v >= lower))) {
            throw ValidationError(name + " signal values must be " + (strict ? "> " : ">= ") +
                                  format_double(lower));
        }
    }
}

json curve_json(const PiecewiseLinear& c)
{
    json points = json::array();
    for (std::size_t i = 0; i < c.xs().size(); ++i) points.push_back({c.xs()[i], c.ys()[i]});
    return points;
}

void regenerate_signals(Scenario& s)
{
    SyntheticSignals sig =
        generate_synthetic_signals(s.seed, s.duration, *s.synthetic_profile, s.synthetic_options);
    s.wind = std::move(sig.wind);
    s.irradiance = std::move(sig.irradiance);
    s.demand = std::move(sig.demand);
}

}  // namespace

void Scenario::validate() const
{
    if (schema_version != kScenarioSchemaVersion) {
        throw ValidationError("schema_version must be " + std::to_string(kScenarioSchemaVersion));
    }
    if (!(duration > 0.0)) throw ValidationError("duration > 0");
    if (!(dt > 0.0)) throw ValidationError("dt > 0");

    farm.turbine.validate();
    farm.layout.validate();
    farm.control.validate(farm.turbine);
    solar.validate();
    battery.validate();
    supervisor.validate(battery.z_min, battery.z_max, dt);

    check_signal(wind, "wind", duration, 0.0, true);
    check_signal(irradiance, "irradiance", duration, 0.0, false);
    check_signal(demand, "demand", duration, 0.0, false);

    if (!(initial.tip_speed_ratio > 0.0 &&
          initial.tip_speed_ratio <= farm.control.lambda_barrier)) {
        throw ValidationError("0 < initial tip_speed_ratio <= lambda_barrier");
    }
    if (!(initial.solar.p_s >= 0.0)) throw ValidationError("initial solar power >= 0");
    const BatteryState& b = initial.battery;
    if (!(b.z >= battery.z_min && b.z <= battery.z_max)) {
        throw ValidationError("z_min <= initial soc <= z_max");
    }
    if (!(std::abs(b.i_c) <= battery.i_c_max)) throw ValidationError("|initial cell current| <= i_c_max");
    const double beta = battery.soc_rate_per_amp();
    if (!(beta * b.i_c + battery.c_z1_min * (b.z - battery.z_min) >= 0.0 &&
          -beta * b.i_c + battery.c_z1_max * (battery.z_max - b.z) >= 0.0)) {
        throw ValidationError("initial battery state must satisfy the first-order SOC barriers");
    }
}

Scenario reference_plant()
{
    Scenario s;
    s.farm.turbine = default_turbine_params();
    s.farm.control = default_wind_controller(s.farm.turbine);
    s.farm.layout = FarmLayout::rectangular(8, 4, 7.0 * 2.0 * s.farm.turbine.rotor_radius, 0.04);
    s.solar = SolarParams{};
    s.battery = default_battery_params();
    s.supervisor = SupervisorParams{};
    s.supervisor.battery_power_rating = 40.0e6;
    s.initial.battery = BatteryState{0.0, 0.5, 0.0, 0.0};
    return s;
}

Scenario default_scenario(std::uint64_t seed, SignalProfile profile, double duration)
{
    Scenario s = reference_plant();
    s.duration = duration;
    s.seed = seed;
    s.synthetic_profile = profile;
    regenerate_signals(s);
    s.validate();
    return s;
}

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir,
                        const std::string& source_name)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
        std::ostringstream msg;
        msg << source_name << ":" << line << ": JSON syntax error: " << e.what();
        throw ParseError(msg.str());
    }

    Scenario s = reference_plant();
    Section top(root, "");
    s.schema_version = top.integer("schema_version", kScenarioSchemaVersion);
    s.duration = top.number("duration", s.duration);
    s.dt = top.number("dt", s.dt);
    s.seed = top.unsigned_integer("seed", s.seed);
    if (auto e = top.string("execution")) s.execution = parse_execution(*e);

    // Wind farm.
    if (auto wf = top.child("wind_farm")) {
        const int rows = wf->integer("rows", s.farm.layout.n_rows);
        const int cols = wf->integer("cols", s.farm.layout.n_cols);
        const double k_w = wf->number("k_w", s.farm.layout.k_w);
        const double u_min = wf->number("u_min", s.farm.layout.u_min);
        std::optional<double> dx = wf->maybe_number("dx");
        const std::optional<double> spacing = wf->maybe_number("spacing_diameters");
        s.initial.tip_speed_ratio = wf->number("initial_tip_speed_ratio", s.initial.tip_speed_ratio);

        TurbineParams tp = s.farm.turbine;
        PiecewiseLinear cp = tp.cp_curve;
        PiecewiseLinear ct = tp.ct_curve;
        if (auto t = wf->child("turbine")) {
            tp.rotor_radius = t->number("rotor_radius", tp.rotor_radius);
            tp.rotor_inertia = t->number("rotor_inertia", tp.rotor_inertia);
            tp.air_density = t->number("air_density", tp.air_density);
            tp.rated_power = t->number("rated_power", tp.rated_power);
            if (auto p = t->string("cp_curve")) cp = read_curve(resolve(base_dir, *p));
            if (auto p = t->string("ct_curve")) ct = read_curve(resolve(base_dir, *p));
            t->finish();
        }
        if (!(tp.rotor_radius > 0.0)) throw ValidationError("rotor_radius > 0");
        s.farm.turbine = make_turbine_params(cp, ct, tp.rotor_radius, tp.rotor_inertia,
                                             tp.air_density, tp.rated_power);
        if (!dx) dx = spacing.value_or(7.0) * 2.0 * s.farm.turbine.rotor_radius;
        if (rows < 1 || cols < 1) throw ValidationError("wind_farm rows and cols >= 1");
        s.farm.layout = FarmLayout::rectangular(rows, cols, *dx, k_w);
        s.farm.layout.u_min = u_min;

        s.farm.control = default_wind_controller(s.farm.turbine);
        if (auto c = wf->child("controller")) {
            s.farm.control.gain = c->number("gain", s.farm.control.gain);
            s.farm.control.barrier_slope = c->number("c_w", s.farm.control.barrier_slope);
            s.farm.control.lambda_barrier =
                c->number("lambda_barrier", s.farm.control.lambda_barrier);
            s.farm.control.torque_max = c->number("torque_max", s.farm.control.torque_max);
            s.farm.control.omega_floor = c->number("omega_floor", s.farm.control.omega_floor);
            c->finish();
        }
        wf->finish();
    }

    // Solar.
    if (auto so = top.child("solar")) {
        s.solar.area = so->number("area", s.solar.area);
        s.solar.efficiency = so->number("efficiency", s.solar.efficiency);
        s.solar.tau = so->number("tau", s.solar.tau);
        s.solar.kp = so->number("kp", s.solar.kp);
        s.solar.ki = so->number("ki", s.solar.ki);
        s.solar.integration_step = so->number("integration_step", s.solar.integration_step);
        s.initial.solar.p_s = so->number("initial_power", s.initial.solar.p_s);
        so->finish();
    }

    // Battery.
    double power_mw = s.supervisor.battery_power_rating / 1.0e6;
    if (auto b = top.child("battery")) {
        BatteryParams& bp = s.battery;
        const double energy_mwh = b->number("energy_mwh", 160.0);
        power_mw = b->number("power_mw", power_mw);
        const double v_nominal = b->number("v_nominal", 3.3);
        bp.q_cell = b->number("q_cell", bp.q_cell);
        bp.r0 = b->number("r0", bp.r0);
        bp.r1 = b->number("r1", bp.r1);
        bp.c1 = b->number("c1", bp.c1);
        bp.eta_b = b->number("eta_b", bp.eta_b);
        bp.g_hyst = b->number("g_hyst", bp.g_hyst);
        bp.m_hyst = b->number("m_hyst", bp.m_hyst);
        bp.z_min = b->number("z_min", bp.z_min);
        bp.z_max = b->number("z_max", bp.z_max);
        bp.k_ic = b->number("k_ic", bp.k_ic);
        bp.r_e = b->number("r_e", bp.r_e);
        bp.c_ic = b->number("c_ic", bp.c_ic);
        bp.c_z1_min = b->number("c_z1_min", bp.c_z1_min);
        bp.c_z2_min = b->number("c_z2_min", bp.c_z2_min);
        bp.c_z1_max = b->number("c_z1_max", bp.c_z1_max);
        bp.c_z2_max = b->number("c_z2_max", bp.c_z2_max);
        bp.soc_ns_factor = b->boolean("soc_ns_factor", bp.soc_ns_factor);
        bp.control_dt = b->number("control_dt", bp.control_dt);
        if (auto p = b->string("ocv")) bp.ocv = read_curve(resolve(base_dir, *p));
        s.initial.battery.z = b->number("initial_soc", s.initial.battery.z);
        if (!(energy_mwh > 0.0 && power_mw > 0.0)) {
            throw ValidationError("battery energy_mwh and power_mw > 0");
        }
        size_battery(bp, energy_mwh * 1.0e6, v_nominal, power_mw / energy_mwh);
        b->finish();
    }
    s.supervisor.battery_power_rating = power_mw * 1.0e6;

    // Supervisor.
    if (auto sv = top.child("supervisor")) {
        SupervisorParams& p = s.supervisor;
        p.soc_high_threshold = sv->number("soc_high_threshold", p.soc_high_threshold);
        p.soc_low_threshold = sv->number("soc_low_threshold", p.soc_low_threshold);
        p.update_period = sv->number("update_period", p.update_period);
        p.saturation_margin = sv->number("saturation_margin", p.saturation_margin);
        p.integral_gain = sv->number("integral_gain", p.integral_gain);
        p.derate_width = sv->number("derate_width", p.derate_width);
        p.charge_from_surplus = sv->boolean("charge_from_surplus", p.charge_from_surplus);
        sv->finish();
    }

    // Signals.
    auto sig = top.child("signals");
    if (!sig) throw ParseError("signals: required section is missing");
    if (auto syn = sig->child("synthetic")) {
        s.seed = syn->unsigned_integer("seed", s.seed);
        s.synthetic_profile = parse_profile(syn->string("profile").value_or("ramping"));
        SyntheticSignalOptions& o = s.synthetic_options;
        o.sample_interval = syn->number("sample_interval", o.sample_interval);
        o.start_hour = syn->number("start_hour", o.start_hour);
        o.plant_rating = syn->number("plant_rating", o.plant_rating);
        o.demand_mean_fraction = syn->number("demand_mean_fraction", o.demand_mean_fraction);
        o.demand_band_fraction = syn->number("demand_band_fraction", o.demand_band_fraction);
        syn->finish();
        if (sig->has("wind") || sig->has("irradiance") || sig->has("demand")) {
            throw ParseError("signals: give either 'synthetic' or CSV paths, not both");
        }
        if (!(s.duration >= 0.0)) throw ValidationError("duration > 0");
        regenerate_signals(s);
    } else {
        const Interpolation mode =
            parse_interpolation(sig->field("interpolation"),
                                sig->string("interpolation").value_or("zoh"));
        const auto need = [&](const char* key) {
            auto p = sig->string(key);
            if (!p) throw ParseError(sig->field(key) + ": required CSV path is missing");
            return read_signal_csv(resolve(base_dir, *p), mode);
        };
        s.wind = need("wind");
        s.irradiance = need("irradiance");
        s.demand = need("demand");
    }
    sig->finish();
    top.finish();

    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.parent_path(), path.string());
}

void override_timing(Scenario& scenario, std::optional<double> dt, std::optional<double> duration)
{
    if (dt) scenario.dt = *dt;
    if (duration) {
        scenario.duration = *duration;
        if (scenario.synthetic_profile) regenerate_signals(scenario);
    }
    scenario.validate();
}

std::string describe_scenario(const Scenario& s)
{
    const auto& tp = s.farm.turbine;
    const auto& wc = s.farm.control;
    const auto& bp = s.battery;
    const auto& sv = s.supervisor;
    json j;
    j["schema_version"] = s.schema_version;
    j["duration"] = s.duration;
    j["dt"] = s.dt;
    j["seed"] = s.seed;
    j["execution"] = s.execution == Execution::Parallel ? "parallel" : "serial";
    j["signals"] = {
        {"source", s.synthetic_profile ? "synthetic:" + profile_name(*s.synthetic_profile) : "csv"},
        {"wind_samples", s.wind.size()},
        {"irradiance_samples", s.irradiance.size()},
        {"demand_samples", s.demand.size()},
        {"interpolation", s.wind.mode() == Interpolation::Linear ? "linear" : "zoh"}};
    j["wind_farm"] = {
        {"rows", s.farm.layout.n_rows},
        {"cols", s.farm.layout.n_cols},
        {"dx", s.farm.layout.dx},
        {"k_w", s.farm.layout.k_w},
        {"u_min", s.farm.layout.u_min},
        {"initial_tip_speed_ratio", s.initial.tip_speed_ratio},
        {"turbine",
         {{"rotor_radius", tp.rotor_radius},
          {"rotor_inertia", tp.rotor_inertia},
          {"air_density", tp.air_density},
          {"rated_power", tp.rated_power},
          {"lambda_opt", tp.lambda_opt},
          {"cp_max", tp.cp_max},
          {"cp_curve", curve_json(tp.cp_curve)},
          {"ct_curve", curve_json(tp.ct_curve)}}},
        {"controller",
         {{"gain", wc.gain},
          {"c_w", wc.barrier_slope},
          {"lambda_barrier", wc.lambda_barrier},
          {"torque_max", wc.torque_max},
          {"omega_floor", wc.omega_floor}}}};
    j["solar"] = {{"area", s.solar.area},     {"efficiency", s.solar.efficiency},
                  {"tau", s.solar.tau},       {"kp", s.solar.kp},
                  {"ki", s.solar.ki},         {"integration_step", s.solar.integration_step},
                  {"initial_power", s.initial.solar.p_s}};
    j["battery"] = {{"n_s", bp.n_s},           {"n_p", bp.n_p},
                    {"q_cell", bp.q_cell},     {"i_c_max", bp.i_c_max},
                    {"r0", bp.r0},             {"r1", bp.r1},
                    {"c1", bp.c1},             {"eta_b", bp.eta_b},
                    {"g_hyst", bp.g_hyst},     {"m_hyst", bp.m_hyst},
                    {"z_min", bp.z_min},       {"z_max", bp.z_max},
                    {"k_ic", bp.k_ic},         {"r_e", bp.r_e},
                    {"c_ic", bp.c_ic},         {"c_z1_min", bp.c_z1_min},
                    {"c_z2_min", bp.c_z2_min}, {"c_z1_max", bp.c_z1_max},
                    {"c_z2_max", bp.c_z2_max}, {"soc_ns_factor", bp.soc_ns_factor},
                    {"control_dt", bp.control_dt},
                    {"initial_soc", s.initial.battery.z},
                    {"ocv", curve_json(bp.ocv)}};
    j["supervisor"] = {{"soc_high_threshold", sv.soc_high_threshold},
                       {"soc_low_threshold", sv.soc_low_threshold},
                       {"battery_power_rating", sv.battery_power_rating},
                       {"update_period", sv.update_period},
                       {"saturation_margin", sv.saturation_margin},
                       {"integral_gain", sv.integral_gain},
                       {"derate_width", sv.derate_width},
                       {"charge_from_surplus", sv.charge_from_surplus}};
    return j.dump(2);
}

}  // namespace hybridsim
