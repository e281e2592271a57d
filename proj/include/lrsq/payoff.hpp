#pragma once

#include <vector>

#include "lrsq/model.hpp"

namespace lrsq {

// Exercise gain G(t,x) = G1(t) x + G2(t) of the swaption in state-price-density
// units, together with the drift benefit H(t,x) = H1(t) x + H2(t) of waiting.
// Both pairs are piecewise smooth on [T0, Tn) with right-continuous
// convention at payment dates; G is continuous, H jumps at payment dates.
class PayoffTable {
public:
    static PayoffTable build(const ModelParams& params, const SwapSpec& spec);

    // Piecewise coefficient functions (notional-scaled).
    double g1(double t) const;
    double g2(double t) const;
    double g1hat(double t) const;
    double h1(double t) const;
    double h2(double t) const;
    double pi(double t) const;

    // Evaluation of a specific segment's smooth formula, valid on
    // [T_{m-1}, T_m]; lets callers take exact one-sided limits at T_m.
    double g1_on_segment(int m, double t) const;
    double g2_on_segment(int m, double t) const;
    double h1_on_segment(int m, double t) const;
    double h2_on_segment(int m, double t) const;

    double gain(double t, double x) const;
    double benefit(double t, double x) const;

    // Zero curves g(t), h(t): G(t, g(t)) = 0 and H(t, h(t)) = 0.
    double zero_g(double t) const;
    double zero_h(double t) const;

    // Analytic jumps of the time derivatives across payment date T_m,
    // left slope minus right slope, m = 1..n-1 (notional-scaled).
    double g1_slope_jump(int m) const;
    double g2_slope_jump(int m) const;

    const SwapSpec& spec() const { return spec_; }
    const ModelParams& params() const { return params_; }
    double scale() const { return spec_.notional; }

    // Discount coefficients c_i = exp(-int_0^{T_i} alpha), i = 1..n.
    const std::vector<double>& c() const { return c_; }

private:
    PayoffTable(ModelParams params, SwapSpec spec);

    int segment(double t) const;
    void check_domain(double t) const;

    ModelParams params_;
    SwapSpec spec_;
    std::vector<double> c_;  // c_[i] for payment i, 1-based (c_[0] unused)
};

// Shared terminal value of the payer and receiver exercise boundaries.
double terminal_boundary(const ModelParams& params, const SwapSpec& spec);

}  // namespace lrsq
