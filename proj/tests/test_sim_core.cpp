#include <doctest.h>

#include <algorithm>
#include <array>
#include <random>
#include <vector>

#include "hybridsim/sim_core.hpp"
#include "oracles.hpp"

using namespace hybridsim;

namespace {

std::vector<Halfplane> to_halfplanes(const std::vector<oracle::Row>& rows)
{
    std::vector<Halfplane> out;
    for (const auto& r : rows) out.push_back({r.a, r.b});
    return out;
}

}  // namespace

TEST_CASE("intersect_halfplanes examples")
{
    const Interval all = intersect_halfplanes({});
    CHECK(all.lo == -kInf);
    CHECK(all.hi == kInf);

    const std::vector<Halfplane> box = {{1.0, 3.0}, {-1.0, 0.0}};
    const Interval i = intersect_halfplanes(box);
    CHECK(i.lo == 0.0);
    CHECK(i.hi == 3.0);

    const std::vector<Halfplane> contradiction = {{2.0, 4.0}, {-1.0, -3.0}};
    CHECK(intersect_halfplanes(contradiction).empty());
}

TEST_CASE("zero-coefficient rows")
{
    const std::vector<Halfplane> vacuous = {{0.0, 0.0}, {1.0, 2.0}};
    const Interval v = intersect_halfplanes(vacuous);
    CHECK_FALSE(v.empty());
    CHECK(v.hi == 2.0);
    CHECK(v.lo == -kInf);

    const std::vector<Halfplane> impossible = {{0.0, -1e-12}, {1.0, 2.0}};
    CHECK(intersect_halfplanes(impossible).empty());
}

TEST_CASE("a single-point feasible set survives division round-off")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-9.0, 9.0);
    std::uniform_real_distribution<double> coef(0.1, 3.0);
    for (int k = 0; k < 5000; ++k) {
        const double anchor = u(rng);
        const double a1 = coef(rng);
        const double a2 = -coef(rng);
        const std::vector<Halfplane> rows = {{a1, a1 * anchor}, {a2, a2 * anchor}};
        const Interval iv = intersect_halfplanes(rows);
        REQUIRE_FALSE(iv.empty());
        CHECK(std::abs(project_to_interval(0.0, iv) - anchor) <= 1e-14 * (1.0 + std::abs(anchor)));
    }
    const std::vector<Halfplane> gap = {{1.0, 1.0}, {-1.0, -1.0 - 1e-9}};
    CHECK(intersect_halfplanes(gap).empty());
}

TEST_CASE("intersect_halfplanes is order independent")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        auto rows = to_halfplanes(oracle::random_qp(rng).rows);
        const Interval ref = intersect_halfplanes(rows);
        for (int p = 0; p < 5; ++p) {
            std::shuffle(rows.begin(), rows.end(), rng);
            const Interval got = intersect_halfplanes(rows);
            CHECK(got.lo == ref.lo);
            CHECK(got.hi == ref.hi);
        }
    }
}

TEST_CASE("project_to_interval examples and errors")
{
    CHECK(project_to_interval(5.0, {0.0, 3.0}) == 3.0);
    CHECK(project_to_interval(1.5, {0.0, 3.0}) == 1.5);
    CHECK(project_to_interval(-2.0, {0.0, 3.0}) == 0.0);
    CHECK(project_to_interval(7.0, Interval::everything()) == 7.0);
    CHECK_THROWS_AS(project_to_interval(1.0, Interval::empty_set()), EmptyFeasibleSet);
    CHECK_THROWS_AS(project_to_interval(1.0, {2.0, 1.0}), EmptyFeasibleSet);
}

TEST_CASE("projection lands in the interval and is identity inside")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int k = 0; k < 2000; ++k) {
        double lo = u(rng);
        double hi = u(rng);
        if (lo > hi) std::swap(lo, hi);
        const double s = u(rng);
        const double p = project_to_interval(s, {lo, hi});
        CHECK(p >= lo);
        CHECK(p <= hi);
        if (s >= lo && s <= hi) CHECK(p == s);
    }
}

TEST_CASE("scalar QP matches grid-search oracle")
{
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 100; ++k) {
        const auto inst = oracle::random_qp(rng);
        const auto ref = oracle::grid_qp(inst.rows, inst.u_star);
        REQUIRE(ref.has_value());
        const auto rows = to_halfplanes(inst.rows);
        const double got = project_to_interval(inst.u_star, intersect_halfplanes(rows));
        CHECK(std::abs(got - *ref) <= 1e-9);
    }
}

TEST_CASE("RK4 examples")
{
    const auto zero = [](const std::array<double, 1>&) { return std::array<double, 1>{0.0}; };
    CHECK(integrate_step(std::array<double, 1>{7.0}, zero, 1.0)[0] == 7.0);

    const auto decay = [](const std::array<double, 1>& x) { return std::array<double, 1>{-x[0]}; };
    const double one = integrate_step(std::array<double, 1>{1.0}, decay, 0.1)[0];
    CHECK(std::abs(one - 0.9048375) <= 1e-6);
    CHECK(std::abs(one - oracle::kExpMinusTenth) <= 1e-7);

    std::array<double, 1> x{1.0};
    for (int k = 0; k < 100; ++k) x = integrate_step(x, decay, 0.01);
    CHECK(std::abs(x[0] - std::exp(-1.0)) <= 1e-8);
}

TEST_CASE("RK4 works on std::vector state")
{
    const auto f = [](const std::vector<double>& x) { return std::vector<double>{x[1], -x[0]}; };
    const auto y = integrate_step(std::vector<double>{1.0, 0.0}, f, 0.01);
    CHECK(y[0] == doctest::Approx(std::cos(0.01)).epsilon(1e-12));
    CHECK(y[1] == doctest::Approx(-std::sin(0.01)).epsilon(1e-10));
}

TEST_CASE("RK4 local error is fifth order on linear dynamics")
{
    const double alpha = 0.7;
    const double w = 2.3;
    const auto f = [&](const std::vector<double>& x) {
        return std::vector<double>{-alpha * x[0] + w * x[1], -w * x[0] - alpha * x[1]};
    };
    const std::vector<double> x0 = {1.0, -0.5};
    double prev = 0.0;
    for (const double dt : {0.2, 0.1, 0.05, 0.025}) {
        const auto got = integrate_step(x0, f, dt);
        const auto exact = oracle::damped_rotation(alpha, w, dt, x0);
        const double err = std::hypot(got[0] - exact[0], got[1] - exact[1]);
        if (prev > 0.0) CHECK(prev / err >= 16.0 * 0.9);
        prev = err;
    }
}

TEST_CASE("RK4 rejects non-finite derivatives")
{
    const auto bad = [](const std::array<double, 1>& x) {
        return std::array<double, 1>{x[0] > 1.05 ? std::nan("") : 1.0};
    };
    CHECK_THROWS_AS(integrate_step(std::array<double, 1>{1.0}, bad, 0.2), NonFiniteDerivative);
    const auto inf = [](const std::array<double, 1>&) { return std::array<double, 1>{kInf}; };
    CHECK_THROWS_AS(integrate_step(std::array<double, 1>{1.0}, inf, 0.2), NonFiniteDerivative);
}

TEST_CASE("zero-order-hold sampling")
{
    const SignalSeries s({0.0, 10.0}, {5.0, 8.0});
    CHECK(sample_signal(s, 0.0) == 5.0);
    CHECK(sample_signal(s, 9.99) == 5.0);
    CHECK(sample_signal(s, 10.0) == 8.0);
    CHECK_THROWS_AS(sample_signal(s, -1e-9), OutOfRange);
    CHECK_THROWS_AS(sample_signal(s, 10.0 + 1e-9), OutOfRange);
}

TEST_CASE("sampling is right-continuous and piecewise constant")
{
    const SignalSeries s({0.0, 1.0, 2.5, 4.0}, {1.0, -2.0, 3.0, 0.5});
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double t = s.times()[k];
        CHECK(sample_signal(s, t) == s.values()[k]);
        if (k > 0) {
            CHECK(sample_signal(s, std::nextafter(t, -kInf)) == s.values()[k - 1]);
        }
        if (k + 1 < s.size()) {
            const double mid = 0.5 * (t + s.times()[k + 1]);
            CHECK(sample_signal(s, mid) == s.values()[k]);
        }
    }
}

TEST_CASE("linear interpolation mode")
{
    const SignalSeries s({0.0, 10.0}, {5.0, 8.0}, Interpolation::Linear);
    CHECK(s.sample(5.0) == doctest::Approx(6.5));
    CHECK(s.sample(10.0) == 8.0);
    CHECK(sample_signal(s, 5.0) == 5.0);
}

TEST_CASE("signal series validation")
{
    CHECK_THROWS_AS(SignalSeries({}, {}), ValidationError);
    CHECK_THROWS_AS(SignalSeries({0.0, 0.0}, {1.0, 2.0}), ValidationError);
    CHECK_THROWS_AS(SignalSeries({1.0, 0.0}, {1.0, 2.0}), ValidationError);
    CHECK_THROWS_AS(SignalSeries({0.0, 1.0}, {1.0}), ValidationError);
    CHECK_THROWS_AS(SignalSeries({0.0, 1.0}, {1.0, std::nan("")}), ValidationError);
    const SignalSeries single({3.0}, {4.0});
    CHECK(single.sample(3.0) == 4.0);
}

TEST_CASE("piecewise-linear table")
{
    const PiecewiseLinear c({0.0, 1.0, 3.0}, {0.0, 2.0, 1.0});
    CHECK(c(-1.0) == 0.0);
    CHECK(c(0.5) == doctest::Approx(1.0));
    CHECK(c(2.0) == doctest::Approx(1.5));
    CHECK(c(5.0) == 1.0);
    CHECK(c.slope(0.5) == doctest::Approx(2.0));
    CHECK(c.slope(1.0) == doctest::Approx(-0.5));
    CHECK(c.slope(4.0) == 0.0);
    CHECK(c.slope(-1.0) == 0.0);
    CHECK(c.min_value() == 0.0);
    CHECK(c.max_value() == 2.0);
    CHECK_THROWS_AS(PiecewiseLinear({0.0}, {1.0}), ValidationError);
    CHECK_THROWS_AS(PiecewiseLinear({0.0, 0.0}, {1.0, 2.0}), ValidationError);
}
