#pragma once

#include "lrsq/model.hpp"

// Shared test fixtures: the benchmark parameter set used throughout the
// test suite (theta = 2.55, kappa = 0.03, alpha = theta*kappa = 0.0765,
// swap starting at 1y with four semiannual payments, K = 5%).
namespace fixtures {

inline lrsq::ModelParams params(double sigma = 0.5) {
    return lrsq::ModelParams(0.03, 2.55, lrsq::PiecewiseConstantCurve::flat(0.0765),
                             lrsq::PiecewiseConstantCurve::flat(sigma), 0.762);
}

inline lrsq::ModelParams params_piecewise_sigma() {
    return lrsq::ModelParams(0.03, 2.55, lrsq::PiecewiseConstantCurve::flat(0.0765),
                             lrsq::PiecewiseConstantCurve({1.0, 2.0, 3.5}, {0.4, 0.6, 0.5}),
                             0.762);
}

inline lrsq::SwapSpec payer_swap(double strike = 0.05, double notional = 1.0) {
    return lrsq::SwapSpec(1.0, 0.5, 4, strike, notional, lrsq::Side::payer);
}

inline lrsq::SwapSpec receiver_swap(double strike = 0.05, double notional = 1.0) {
    return lrsq::SwapSpec(1.0, 0.5, 4, strike, notional, lrsq::Side::receiver);
}

}  // namespace fixtures
