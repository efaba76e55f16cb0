#include "hybridsim/sim_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hybridsim {

Interval intersect_halfplanes(std::span<const Halfplane> constraints)
{
    Interval out = Interval::everything();
    for (const Halfplane& c : constraints) {
        if (c.a > 0.0) {
            out.hi = std::min(out.hi, c.b / c.a);
        } else if (c.a < 0.0) {
            out.lo = std::max(out.lo, c.b / c.a);
        } else if (c.b < 0.0) {
            return Interval::empty_set();
        }
    }
    // Bounds crossed only by division round-off describe a single point.
    if (out.lo > out.hi &&
        out.lo - out.hi <= 4.0 * std::numeric_limits<double>::epsilon() *
                               std::max(std::abs(out.lo), std::abs(out.hi))) {
        out.lo = out.hi = 0.5 * (out.lo + out.hi);
    }
    // An empty result keeps its crossed bounds so callers can see which
    // lower and upper limits conflict.
    return out;
}

double project_to_interval(double u_star, const Interval& feasible)
{
    if (feasible.empty()) {
        std::ostringstream msg;
        msg << "cannot project " << u_star << " onto empty interval";
        throw EmptyFeasibleSet(msg.str());
    }
    return std::clamp(u_star, feasible.lo, feasible.hi);
}

SignalSeries::SignalSeries(std::vector<double> times, std::vector<double> values,
                           Interpolation mode)
    : times_(std::move(times)), values_(std::move(values)), mode_(mode)
{
    if (times_.empty()) throw ValidationError("signal needs at least one sample");
    if (times_.size() != values_.size()) {
        throw ValidationError("signal timestamps and values differ in length");
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i]) || !std::isfinite(values_[i])) {
            std::ostringstream msg;
            msg << "signal sample " << i << " is not finite";
            throw ValidationError(msg.str());
        }
        if (i > 0 && !(times_[i] > times_[i - 1])) {
            std::ostringstream msg;
            msg << "signal timestamps not strictly increasing at index " << i;
            throw ValidationError(msg.str());
        }
    }
}

double SignalSeries::sample(double t) const
{
    if (times_.empty()) throw OutOfRange("sampling an empty signal");
    if (t < times_.front() || t > times_.back() || std::isnan(t)) {
        std::ostringstream msg;
        msg << "t=" << t << " outside signal span [" << times_.front() << ", "
            << times_.back() << "]";
        throw OutOfRange(msg.str());
    }
    // Latest sample with timestamp <= t.
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
    if (mode_ == Interpolation::ZeroOrderHold || k + 1 == times_.size()) return values_[k];
    const double w = (t - times_[k]) / (times_[k + 1] - times_[k]);
    return values_[k] + w * (values_[k + 1] - values_[k]);
}

double sample_signal(const SignalSeries& series, double t)
{
    if (series.mode() == Interpolation::ZeroOrderHold) return series.sample(t);
    SignalSeries zoh = series;
    zoh.set_mode(Interpolation::ZeroOrderHold);
    return zoh.sample(t);
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys))
{
    if (xs_.size() < 2) throw ValidationError("piecewise-linear table needs >= 2 points");
    if (xs_.size() != ys_.size()) throw ValidationError("table columns differ in length");
    for (std::size_t i = 1; i < xs_.size(); ++i) {
        if (!(xs_[i] > xs_[i - 1])) {
            throw ValidationError("table abscissae must be strictly increasing");
        }
    }
    for (std::size_t i = 0; i < xs_.size(); ++i) {
        if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i])) {
            throw ValidationError("table contains a non-finite entry");
        }
    }
}

std::size_t PiecewiseLinear::segment(double x) const
{
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const auto k = static_cast<std::size_t>(it - xs_.begin());
    return std::clamp<std::size_t>(k, 1, xs_.size() - 1) - 1;
}

double PiecewiseLinear::operator()(double x) const
{
    if (x <= xs_.front()) return ys_.front();
    if (x >= xs_.back()) return ys_.back();
    const std::size_t k = segment(x);
    const double w = (x - xs_[k]) / (xs_[k + 1] - xs_[k]);
    return ys_[k] + w * (ys_[k + 1] - ys_[k]);
}

double PiecewiseLinear::slope(double x) const
{
    if (x < xs_.front() || x >= xs_.back()) return 0.0;
    const std::size_t k = segment(x);
    return (ys_[k + 1] - ys_[k]) / (xs_[k + 1] - xs_[k]);
}

double PiecewiseLinear::min_value() const { return *std::min_element(ys_.begin(), ys_.end()); }
double PiecewiseLinear::max_value() const { return *std::max_element(ys_.begin(), ys_.end()); }

}  // namespace hybridsim
