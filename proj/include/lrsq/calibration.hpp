#pragma once

#include <vector>

#include "lrsq/model.hpp"

namespace lrsq {

struct CurveQuote {
    double maturity = 0.0;
    double discount_factor = 0.0;
};

struct SwaptionQuote {
    double expiry = 0.0;  // option expiry, first reset of the underlying swap
    double tenor = 0.0;   // underlying swap length Tn - T0
    double strike = 0.0;
    Side side = Side::payer;
    double price = 0.0;
};

// Piecewise-constant alpha matching each zero-coupon quote exactly; each
// segment solves in closed form, so the bootstrap is triangular.
PiecewiseConstantCurve fit_alpha(double kappa, double theta, double x0,
                                 const std::vector<CurveQuote>& quotes);

// Piecewise-constant sigma with breakpoints at the quote expiries, fitted
// front to back so each European quote is matched by a scalar root-find.
// `delta` is the accrual period of the underlying swaps.
PiecewiseConstantCurve fit_sigma(const ModelParams& params,
                                 const std::vector<SwaptionQuote>& quotes, double delta,
                                 double price_tol = 1e-8);

}  // namespace lrsq
