#pragma once

#include <vector>

#include "lrsq/curve.hpp"

namespace lrsq {

enum class Side { payer, receiver };

// Primitives of the one-factor linear-rational square-root model:
//   dX = kappa (theta - X) dt + sigma(t) sqrt(X) dB,
//   zeta_t = exp(-int_0^t alpha) (1 + X_t).
struct ModelParams {
    double kappa = 0.0;
    double theta = 0.0;
    PiecewiseConstantCurve alpha;
    PiecewiseConstantCurve sigma;
    double x0 = 0.0;

    ModelParams(double kappa_, double theta_, PiecewiseConstantCurve alpha_,
                PiecewiseConstantCurve sigma_, double x0_);

    // exp(-int_0^t alpha(s) ds)
    double discount(double t) const;
};

// Fixed-vs-floating swap: payment dates T_i = t0 + i*delta, i = 1..n.
struct SwapSpec {
    double t0 = 0.0;
    double delta = 0.0;
    int n = 0;
    double strike = 0.0;
    double notional = 1.0;
    Side side = Side::payer;

    SwapSpec(double t0_, double delta_, int n_, double strike_, double notional_ = 1.0,
             Side side_ = Side::payer);

    double payment_date(int i) const { return t0 + i * delta; }
    double maturity() const { return payment_date(n); }

    // Index m with T_{m-1} <= t < T_m (right-continuous; t = T_n maps to n).
    int segment(double t) const;
};

double state_price_density(const ModelParams& params, double t, double x);
double zcb_price(const ModelParams& params, double t, double T, double x);
double short_rate(const ModelParams& params, double t, double x);
double conditional_mean(const ModelParams& params, double t, double T, double x);

// Conditional variance of X_T given X_t = x (piecewise-constant sigma,
// evaluated in closed form). Used by grid-sizing heuristics and tests.
double conditional_variance(const ModelParams& params, double t, double T, double x);

double swap_value(const ModelParams& params, const SwapSpec& spec, double t, double x);
double swap_rate(const ModelParams& params, const SwapSpec& spec, double t, double x);
double invert_swap_rate(const ModelParams& params, const SwapSpec& spec, double t, double s);
bool strike_admissible(const ModelParams& params, double strike, Side side);

// Attainable swap-rate range (limits of f(t,.) at 0+ and infinity).
struct RateRange {
    double lo;
    double hi;
};
RateRange swap_rate_range(const ModelParams& params, const SwapSpec& spec, double t);

}  // namespace lrsq
