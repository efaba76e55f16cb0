#include <doctest.h>

#include <cmath>
#include <random>

#include "hybridsim/battery.hpp"

using namespace hybridsim;

namespace {

BatteryParams flat_ocv(double volts)
{
    BatteryParams p = default_battery_params();
    p.ocv = PiecewiseLinear({0.0, 1.0}, {volts, volts + 1e-9});
    return p;
}

}  // namespace

TEST_CASE("pack sizing from energy and nominal voltage")
{
    const BatteryParams p = default_battery_params();
    CHECK(p.n_s == 1557.0);
    CHECK(p.n_p == 1557.0);
    CHECK(p.i_c_max == 5.0);
    CHECK(p.charge_capacity() == 3600.0 * 1557.0 * 20.0);
    BatteryParams tiny = p;
    size_battery(tiny, 1.0, 3.3, 1.0);
    CHECK(tiny.n_s == 1.0);
    CHECK_THROWS_AS(size_battery(tiny, 0.0, 3.3, 1.0), ValidationError);
}

TEST_CASE("terminal voltage and power")
{
    BatteryParams p = flat_ocv(3.3);
    p.r0 = 0.01;
    const BatteryState rest{0.0, 0.5, 0.0, 0.0};
    const BatteryOutputs o0 = battery_outputs(p, rest);
    CHECK(o0.v_cell == doctest::Approx(3.3));
    CHECK(o0.p_total == 0.0);

    const BatteryState loaded{0.02, 0.5, 0.01, 5.0};
    const BatteryOutputs o = battery_outputs(p, loaded);
    CHECK(o.v_cell == doctest::Approx(3.24).epsilon(1e-9));
    CHECK(o.p_total == doctest::Approx(p.cells() * 3.24 * 5.0).epsilon(1e-9));
}

TEST_CASE("derivatives at zero current")
{
    const BatteryParams p = default_battery_params();
    const BatteryState s{0.3, 0.4, 0.02, 0.0};
    const BatteryState d = battery_derivatives(p, s, 0.0);
    CHECK(d.z == 0.0);
    CHECK(d.h == 0.0);
    CHECK(d.u1 == doctest::Approx(-0.3 / (p.r1 * p.c1)));
    CHECK(d.i_c == 0.0);
}

TEST_CASE("hysteresis under constant current follows the first-order closed form")
{
    const BatteryParams p = default_battery_params();
    const double i = 4.0;
    const double rate = p.g_hyst * p.soc_rate_per_amp() * i;
    BatteryState s{0.0, 0.3, 0.0, i};
    const double h = 1.0;
    double t = 0.0;
    const auto rhs = [&](const std::array<double, 4>& x) {
        const BatteryState d = battery_derivatives(p, {x[0], x[1], x[2], x[3]}, 0.0);
        return std::array<double, 4>{d.u1, d.z, d.h, d.i_c};
    };
    std::array<double, 4> x{s.u1, s.z, s.h, s.i_c};
    for (int k = 0; k < 2000; ++k) {
        x = integrate_step(x, rhs, h);
        t += h;
        const double expected = -p.m_hyst * (1.0 - std::exp(-rate * t));
        REQUIRE(x[2] == doctest::Approx(expected).epsilon(1e-9).scale(1e-12));
    }
    // Saturates toward -M for charging current.
    CHECK(x[2] < 0.0);
    CHECK(x[2] > -p.m_hyst);
}

TEST_CASE("nominal current law")
{
    BatteryParams p = flat_ocv(3.3);
    p.k_ic = 2.0;
    const BatteryState rest{0.0, 0.5, 0.0, 0.0};
    CHECK(current_control_nominal(p, rest, 0.0) == 0.0);
    // Per-cell error of 1 W.
    CHECK(current_control_nominal(p, rest, -p.cells()) == doctest::Approx(-2.0 / 3.3));

    p.r_e = -1.0;
    const BatteryState hot{0.0, 0.5, 0.0, 5.0};
    CHECK_THROWS_AS(current_control_nominal(p, hot, 0.0), DenominatorNonpositive);
}

TEST_CASE("error contraction rate exceeds one half")
{
    const BatteryParams p = default_battery_params();
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> z(p.z_min, p.z_max);
    std::uniform_real_distribution<double> i(-p.i_c_max, p.i_c_max);
    for (int k = 0; k < 1000; ++k) {
        const BatteryState s{0.0, z(rng), 0.0, i(rng)};
        CHECK(iss_gain(p, s) > 0.5);
    }
}

TEST_CASE("barrier rows")
{
    const BatteryParams p = default_battery_params();
    const BatteryState mid{0.0, 0.5 * (p.z_min + p.z_max), 0.0, 0.0};
    for (const Halfplane& r : battery_cbf_rows(p, mid)) CHECK(r.a * 0.0 <= r.b);

    const BatteryState empty{0.0, p.z_min, 0.0, 0.0};
    const auto rows = battery_cbf_rows(p, empty);
    CHECK(rows[2].a < 0.0);
    CHECK(rows[2].b == doctest::Approx(0.0).scale(1e-18));
    const Interval iv = intersect_halfplanes(std::vector<Halfplane>{rows[2]});
    CHECK(iv.lo == doctest::Approx(0.0).scale(1e-12));

    const BatteryState full_current{0.0, 0.5, 0.0, p.i_c_max};
    const auto rows2 = battery_cbf_rows(p, full_current);
    CHECK(rows2[1].a > 0.0);
    CHECK(rows2[1].b == 0.0);
}

TEST_CASE("rest with zero setpoint stays at rest")
{
    const BatteryParams p = default_battery_params();
    BatteryState s{0.0, 0.6, 0.0, 0.0};
    for (int k = 0; k < 50; ++k) {
        const BatteryStepResult r = battery_step(p, s, 0.0, 0.5);
        CHECK(r.state.i_c == 0.0);
        CHECK(r.state.z == 0.6);
        CHECK(r.delivered_power == 0.0);
        s = r.state;
    }
}

TEST_CASE("tracks a feasible discharge setpoint")
{
    const BatteryParams p = default_battery_params();
    BatteryState s{0.0, 0.6, 0.0, 0.0};
    BatteryStepResult r;
    for (int k = 0; k < 20; ++k) {
        r = battery_step(p, s, 2.0e7, 0.5);
        s = r.state;
    }
    CHECK(r.delivered_power == doctest::Approx(2.0e7).epsilon(1e-4));
    CHECK(s.i_c < 0.0);
}

TEST_CASE("charge bookkeeping matches the SOC change")
{
    const BatteryParams p = default_battery_params();
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> sp(-4.0e7, 4.0e7);
    BatteryState s{0.0, 0.5, 0.0, 0.0};
    for (int k = 0; k < 500; ++k) {
        const BatteryStepResult r = battery_step(p, s, sp(rng), 0.5);
        const double dz = r.state.z - s.z;
        CHECK(std::abs(dz - p.soc_rate_per_amp() * r.charge_throughput) <= 1e-14);
        s = r.state;
    }
}

TEST_CASE("current and SOC limits are invariant")
{
    const BatteryParams p = default_battery_params();
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> sp(-8.0e7, 8.0e7);
    std::uniform_int_distribution<int> hold(1, 400);
    BatteryState s{0.0, 0.5, 0.0, 0.0};
    int steps = 0;
    while (steps < 40000) {
        const double setpoint = sp(rng);
        const int n = hold(rng);
        for (int k = 0; k < n; ++k, ++steps) {
            const BatteryStepResult r = battery_step(p, s, setpoint, 0.5);
            REQUIRE(std::abs(r.state.i_c) <= p.i_c_max * (1.0 + 1e-6));
            REQUIRE(r.state.z >= p.z_min - 1e-4);
            REQUIRE(r.state.z <= p.z_max + 1e-4);
            REQUIRE(r.min_iss_gain > 0.5);
            s = r.state;
        }
    }
}

TEST_CASE("parameter validation")
{
    BatteryParams p = default_battery_params();
    CHECK_NOTHROW(p.validate());
    BatteryParams crossed = p;
    crossed.z_min = 0.9;
    crossed.z_max = 0.1;
    CHECK_THROWS_AS(crossed.validate(), ValidationError);
    BatteryParams bad_ocv = p;
    bad_ocv.ocv = PiecewiseLinear({0.0, 0.5, 1.0}, {3.0, 3.5, 3.4});
    CHECK_THROWS_AS(bad_ocv.validate(), ValidationError);
    CHECK_THROWS_AS(battery_step(p, BatteryState{}, 0.0, 0.0), ValidationError);
}
