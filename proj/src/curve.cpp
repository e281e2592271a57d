#include "lrsq/curve.hpp"

#include <algorithm>
#include <limits>

#include "lrsq/errors.hpp"

namespace lrsq {

PiecewiseConstantCurve::PiecewiseConstantCurve(std::vector<double> edges,
                                               std::vector<double> values)
    : edges_(std::move(edges)), values_(std::move(values)) {
    if (values_.empty()) throw ConfigError("curve needs at least one value");
    if (edges_.size() != values_.size())
        throw ConfigError("curve edge/value count mismatch");
    double prev = 0.0;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (!(edges_[i] > prev))
            throw ConfigError("curve breakpoints must be strictly increasing and positive");
        prev = edges_[i];
    }
}

PiecewiseConstantCurve PiecewiseConstantCurve::flat(double value) {
    return PiecewiseConstantCurve({std::numeric_limits<double>::max()}, {value});
}

std::size_t PiecewiseConstantCurve::segment_index(double t) const {
    auto it = std::upper_bound(edges_.begin(), edges_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - edges_.begin());
    return std::min(i, values_.size() - 1);
}

double PiecewiseConstantCurve::operator()(double t) const {
    return values_[segment_index(t)];
}

double PiecewiseConstantCurve::segment_start(double t) const {
    std::size_t i = segment_index(t);
    return i == 0 ? 0.0 : edges_[i - 1];
}

double PiecewiseConstantCurve::integral(double a, double b) const {
    if (b < a) return -integral(b, a);
    double acc = 0.0;
    double lo = a;
    std::size_t i = segment_index(a);
    while (lo < b) {
        double hi = (i < edges_.size()) ? std::min(edges_[i], b) : b;
        if (i == values_.size() - 1) hi = b;
        acc += values_[i] * (hi - lo);
        lo = hi;
        ++i;
    }
    return acc;
}

double PiecewiseConstantCurve::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double PiecewiseConstantCurve::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

bool PiecewiseConstantCurve::is_constant_on(double a, double b) const {
    const double v = values_[segment_index(a)];
    for (std::size_t i = segment_index(a); i <= segment_index(b); ++i)
        if (values_[i] != v) return false;
    return true;
}

}  // namespace lrsq
