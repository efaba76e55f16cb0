#include "hybridsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hybridsim/errors.hpp"

namespace hybridsim {

namespace {

constexpr double kTsrTolerance = 1e-6;
constexpr std::size_t kMaxMessages = 10;

std::string at_time(double t, const std::string& what)
{
    return "t=" + format_double(t) + " s: " + what;
}

double farm_output(const WindFarm& farm, const FarmState& state, const WindField& field,
                   std::vector<double>& tsr)
{
    double total = 0.0;
    tsr.resize(state.turbines.size());
    for (std::size_t j = 0; j < state.turbines.size(); ++j) {
        total += aero_power(farm.turbine, state.turbines[j].omega_r, field.wind[j]);
        tsr[j] = tip_speed_ratio(farm.turbine, state.turbines[j].omega_r, field.wind[j]);
    }
    return total;
}

}  // namespace

std::size_t expected_row_count(double duration, double dt)
{
    return static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
}

RunRecord run_scenario(const Scenario& scenario)
{
    const Scenario& s = scenario;
    const std::size_t n_rows = expected_row_count(s.duration, s.dt);
    const std::size_t n_turb = s.farm.layout.size();

    RunRecord rec;
    rec.n_turbines = n_turb;
    rec.lambda_barrier = s.farm.control.lambda_barrier;
    rec.rows.reserve(n_rows);

    Supervisor supervisor(s.supervisor, s.dt);
    double t = 0.0;
    try {
        FarmState farm = initialize_farm(s.farm, s.wind.sample(0.0), s.initial.tip_speed_ratio);
        SolarState solar = s.initial.solar;
        BatteryState battery = s.initial.battery;

        RunRow row;
        row.tip_speed_ratio.resize(n_turb);
        {
            const WindField field = resolve_wind_field(s.wind.sample(0.0), s.farm, farm.turbines);
            row.wind_power = farm_output(s.farm, farm, field, row.tip_speed_ratio);
            row.solar_power = std::clamp(solar.p_s, 0.0,
                                         solar_available(s.solar, s.irradiance.sample(0.0)));
            row.battery_power = -battery_outputs(s.battery, battery).p_total;
            row.iss_gain = iss_gain(s.battery, battery);
        }

        DispatchCommand cmd;
        double next_update = 0.0;
        double cell_charge = 0.0;
        for (std::size_t k = 0; k < n_rows; ++k) {
            t = static_cast<double>(k) * s.dt;
            row.time = t;
            row.demand = s.demand.sample(t);
            row.wind_speed = s.wind.sample(t);
            row.irradiance = s.irradiance.sample(t);
            row.wind_available = farm_available_power(
                s.farm.turbine, resolve_wind_field(row.wind_speed, s.farm, farm.turbines).wind);
            row.solar_available = solar_available(s.solar, row.irradiance);
            row.total_power = row.wind_power + row.solar_power + row.battery_power;
            row.soc = battery.z;
            row.cell_current = battery.i_c;
            row.cell_charge = cell_charge;

            if (t >= next_update - 1e-9 * s.supervisor.update_period) {
                SupervisorInputs in;
                in.demand = row.demand;
                in.wind_available = row.wind_available;
                in.solar_available = row.solar_available;
                in.wind_measured = row.wind_power;
                in.solar_measured = row.solar_power;
                in.battery_measured = row.battery_power;
                in.soc = battery.z;
                cmd = supervisor.supervise(in);
                next_update += s.supervisor.update_period;
            }
            row.wind_setpoint = cmd.p_wind_sp;
            row.solar_setpoint = cmd.p_solar_sp;
            row.battery_setpoint = cmd.p_batt_sp;
            rec.rows.push_back(row);
            if (k + 1 == n_rows) break;

            // Advance every subsystem over [t, t + dt] with held signals and commands.
            FarmStepResult fr = farm_step(s.farm, farm, row.wind_speed, cmd.p_wind_sp, s.dt,
                                          s.execution);
            const SolarStepResult sr =
                solar_step(s.solar, solar, cmd.p_solar_sp, row.irradiance, s.dt);
            const BatteryStepResult br = battery_step(s.battery, battery, cmd.p_batt_sp, s.dt);

            RunRow next;
            next.tip_speed_ratio = fr.tip_speed_ratio;
            for (std::size_t j = 0; j < n_turb; ++j) {
                const double before = tip_speed_ratio(s.farm.turbine, farm.turbines[j].omega_r,
                                                      fr.effective_wind[j]);
                const double bound = std::max(before, rec.lambda_barrier) * (1.0 + kTsrTolerance);
                if (fr.tip_speed_ratio[j] > bound) ++next.tsr_violations;
            }
            next.wind_power = fr.total_power;
            next.solar_power = sr.output;
            next.battery_power = br.delivered_power;
            next.iss_gain = br.min_iss_gain;
            next.disturbance_peak = br.disturbance_peak;
            next.wind_qp_events = fr.infeasible_events;
            next.battery_qp_events = br.infeasible_events;
            cell_charge += br.charge_throughput;

            const double t_next = static_cast<double>(k + 1) * s.dt;
            if (fr.infeasible_events > 0) {
                rec.events.push_back({t_next, "wind_qp_infeasible",
                                      std::to_string(fr.infeasible_events) + " turbine(s)"});
            }
            if (br.infeasible_events > 0) {
                rec.events.push_back({t_next, "battery_qp_infeasible",
                                      std::to_string(br.infeasible_events) + " update(s)"});
            }
            if (next.tsr_violations > 0) {
                rec.events.push_back({t_next, "tsr_violation",
                                      std::to_string(next.tsr_violations) + " turbine(s)"});
            }

            farm = std::move(fr.state);
            solar = sr.state;
            battery = br.state;
            row = std::move(next);
        }
        rec.final_farm = std::move(farm);
        rec.final_solar = solar;
        rec.final_battery = battery;
    } catch (const SimError& e) {
        throw SimError(e.kind(), at_time(t, e.what()));
    }
    return rec;
}

InvariantReport check_invariants(const Scenario& scenario, const RunRecord& record)
{
    InvariantReport rep;
    const BatteryParams& bp = scenario.battery;
    const auto note = [&](double t, const std::string& what) {
        if (rep.messages.size() < kMaxMessages) rep.messages.push_back(at_time(t, what));
    };

    for (std::size_t k = 0; k < record.rows.size(); ++k) {
        const RunRow& r = record.rows[k];
        if (k > 0 && !(r.time > record.rows[k - 1].time)) {
            ++rep.time_violations;
            note(r.time, "time not increasing");
        }
        if (r.soc < bp.z_min - 1e-4 || r.soc > bp.z_max + 1e-4) {
            ++rep.soc_violations;
            note(r.time, "soc " + format_double(r.soc) + " outside limits");
        }
        if (std::abs(r.cell_current) > bp.i_c_max * (1.0 + 1e-6)) {
            ++rep.current_violations;
            note(r.time, "cell current " + format_double(r.cell_current) + " beyond limit");
        }
        if (r.tsr_violations > 0) {
            rep.tsr_violations += r.tsr_violations;
            note(r.time, "tip-speed ratio crossed the barrier");
        }
        if (r.solar_power < 0.0 || r.solar_power > r.solar_available * (1.0 + 1e-12)) {
            // Output is clamped against the availability at the start of the
            // step, which is the previous row's.
            const double avail_prev = k > 0 ? record.rows[k - 1].solar_available : r.solar_available;
            if (r.solar_power < 0.0 || r.solar_power > avail_prev * (1.0 + 1e-12)) {
                ++rep.solar_violations;
                note(r.time, "solar output outside [0, available]");
            }
        }
    }

    if (record.rows.size() >= 2) {
        const RunRow& first = record.rows.front();
        const RunRow& last = record.rows.back();
        const double dz = last.soc - first.soc;
        const double predicted = bp.soc_rate_per_amp() * (last.cell_charge - first.cell_charge);
        const double scale = std::max({std::abs(dz), std::abs(predicted), 1e-12});
        rep.energy_relative_error = std::abs(dz - predicted) / scale;
        // Below ~1e-9 of SOC the difference is round-off in z itself.
        rep.energy_ok = rep.energy_relative_error <= 1e-6 || std::abs(dz - predicted) < 1e-12;
        if (!rep.energy_ok) {
            std::ostringstream msg;
            msg << "soc change " << dz << " vs integrated current " << predicted;
            note(last.time, msg.str());
        }
    }
    return rep;
}

}  // namespace hybridsim
