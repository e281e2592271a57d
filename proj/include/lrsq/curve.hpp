#pragma once

#include <cstddef>
#include <vector>

namespace lrsq {

// Piecewise-constant, right-continuous function of time on [0, inf).
// values[i] applies on [edge[i-1], edge[i]) with edge[-1] := 0; beyond the
// last edge the final value extends indefinitely.
class PiecewiseConstantCurve {
public:
    PiecewiseConstantCurve() = default;
    PiecewiseConstantCurve(std::vector<double> edges, std::vector<double> values);

    static PiecewiseConstantCurve flat(double value);

    double operator()(double t) const;

    // Closed-form integral over [a, b], additive to machine precision.
    double integral(double a, double b) const;

    double min_value() const;
    double max_value() const;

    bool is_constant_on(double a, double b) const;

    std::size_t size() const { return values_.size(); }
    const std::vector<double>& edges() const { return edges_; }
    const std::vector<double>& values() const { return values_; }

    // Start of the segment containing t (0 for the first segment).
    double segment_start(double t) const;

private:
    std::size_t segment_index(double t) const;

    std::vector<double> edges_;
    std::vector<double> values_;
};

}  // namespace lrsq
