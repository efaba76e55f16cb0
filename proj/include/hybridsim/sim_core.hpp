#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hybridsim/errors.hpp"

namespace hybridsim {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Linear constraint a*u <= b on a scalar decision u.
struct Halfplane {
    double a = 0.0;
    double b = 0.0;

    bool satisfied_by(double u, double slack = 0.0) const { return a * u <= b + slack; }
};

// Closed interval [lo, hi]; lo > hi encodes the empty set.
struct Interval {
    double lo = -kInf;
    double hi = kInf;

    static Interval everything() { return {}; }
    static Interval empty_set() { return {kInf, -kInf}; }

    bool empty() const { return !(lo <= hi); }
    bool contains(double u) const { return lo <= u && u <= hi; }
};

// Exact feasible set {u : a_i u <= b_i for all i}. Infeasibility is returned
// as an empty interval, never thrown. Bounds that cross by a few ulps are
// merged into a single point.
Interval intersect_halfplanes(std::span<const Halfplane> constraints);

// Minimizer of (u - u_star)^2 / 2 over a nonempty interval.
// Throws EmptyFeasibleSet when the interval is empty.
double project_to_interval(double u_star, const Interval& feasible);

// One explicit classical Runge-Kutta step. State is any random-access
// container of doubles (std::array, std::vector); derivative(state) returns
// the same type. Inputs to the dynamics are held constant across the step.
template <typename State, typename Derivative>
State integrate_step(const State& x, Derivative&& derivative, double dt)
{
    const auto check = [](const State& d) {
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (!std::isfinite(d[i])) {
                throw NonFiniteDerivative("derivative component " + std::to_string(i) +
                                          " is not finite");
            }
        }
    };

    State tmp = x;
    const State k1 = derivative(x);
    check(k1);
    for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    const State k2 = derivative(tmp);
    check(k2);
    for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    const State k3 = derivative(tmp);
    check(k3);
    for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + dt * k3[i];
    const State k4 = derivative(tmp);
    check(k4);

    State out = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

enum class Interpolation { ZeroOrderHold, Linear };

// Timestamped scalar signal (wind speed, irradiance, demand).
class SignalSeries {
public:
    SignalSeries() = default;
    SignalSeries(std::vector<double> times, std::vector<double> values,
                 Interpolation mode = Interpolation::ZeroOrderHold);

    double sample(double t) const;

    double first_time() const { return times_.front(); }
    double last_time() const { return times_.back(); }
    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }
    Interpolation mode() const { return mode_; }
    void set_mode(Interpolation mode) { mode_ = mode; }

private:
    std::vector<double> times_;
    std::vector<double> values_;
    Interpolation mode_ = Interpolation::ZeroOrderHold;
};

// Zero-order-hold sample; equivalent to SignalSeries::sample in ZOH mode.
double sample_signal(const SignalSeries& series, double t);

// Piecewise-linear table y(x) with clamped extrapolation. Backs the C_p/C_T
// curves and the OCV table.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<double> xs, std::vector<double> ys);

    double operator()(double x) const;
    // Slope of the segment containing x (right segment at a breakpoint); zero
    // outside the table.
    double slope(double x) const;

    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }
    double min_value() const;
    double max_value() const;

private:
    std::size_t segment(double x) const;

    std::vector<double> xs_;
    std::vector<double> ys_;
};

}  // namespace hybridsim
