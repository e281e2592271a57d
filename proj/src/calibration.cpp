#include "lrsq/calibration.hpp"

#include <cmath>
#include <string>

#include "lrsq/bermudan.hpp"
#include "lrsq/errors.hpp"

namespace lrsq {

PiecewiseConstantCurve fit_alpha(double kappa, double theta, double x0,
                                 const std::vector<CurveQuote>& quotes) {
    if (quotes.empty()) throw ConfigError("fit_alpha: no quotes");
    double prev_T = 0.0;
    for (const auto& q : quotes) {
        if (!(q.maturity > prev_T))
            throw ConfigError("fit_alpha: maturities must be strictly increasing");
        if (!(q.discount_factor > 0.0))
            throw ConfigError("fit_alpha: discount factors must be positive");
        prev_T = q.maturity;
    }

    std::vector<double> edges, values;
    double running_integral = 0.0;
    double t_prev = 0.0;
    for (const auto& q : quotes) {
        // zcb(0,T) = e^{-int_0^T alpha} (1+theta+e^{-kappa T}(x0-theta))/(1+x0)
        const double rational =
            (1.0 + theta + std::exp(-kappa * q.maturity) * (x0 - theta)) / (1.0 + x0);
        if (!(rational > 0.0))
            throw InfeasibleCurveError("fit_alpha: rational factor nonpositive at T=" +
                                       std::to_string(q.maturity));
        const double target_integral = std::log(rational / q.discount_factor);
        if (!std::isfinite(target_integral))
            throw InfeasibleCurveError("fit_alpha: quote incompatible with the factor level");
        values.push_back((target_integral - running_integral) / (q.maturity - t_prev));
        edges.push_back(q.maturity);
        running_integral = target_integral;
        t_prev = q.maturity;
    }
    return PiecewiseConstantCurve(std::move(edges), std::move(values));
}

PiecewiseConstantCurve fit_sigma(const ModelParams& params,
                                 const std::vector<SwaptionQuote>& quotes, double delta,
                                 double price_tol) {
    if (quotes.empty()) throw ConfigError("fit_sigma: no quotes");
    double prev_expiry = 0.0;
    for (const auto& q : quotes) {
        if (!(q.expiry > prev_expiry))
            throw ConfigError("fit_sigma: expiries must be strictly increasing");
        if (q.price < 0.0) throw ConfigError("fit_sigma: negative quote price");
        prev_expiry = q.expiry;
    }

    std::vector<double> edges, values;
    const double sig_lo = 1e-6, sig_hi = 5.0;
    for (std::size_t qi = 0; qi < quotes.size(); ++qi) {
        const auto& q = quotes[qi];
        const int n_pay = static_cast<int>(std::lround(q.tenor / delta));
        if (std::abs(n_pay * delta - q.tenor) > 1e-9)
            throw ConfigError("fit_sigma: tenor is not a whole number of accrual periods");
        SwapSpec spec(q.expiry, delta, n_pay, q.strike, 1.0, q.side);

        auto price_with = [&](double seg_sigma) {
            std::vector<double> e = edges, v = values;
            e.push_back(q.expiry);
            v.push_back(seg_sigma);
            ModelParams trial(params.kappa, params.theta, params.alpha,
                              PiecewiseConstantCurve(std::move(e), std::move(v)), params.x0);
            return european_price(trial, spec, 0.0, params.x0);
        };

        double lo = sig_lo, hi = sig_hi;
        double f_lo = price_with(lo) - q.price;
        double f_hi = price_with(hi) - q.price;
        if (!(f_lo <= 0.0) || !(f_hi >= 0.0))
            throw UnattainableQuoteError(
                "fit_sigma: quote at expiry " + std::to_string(q.expiry) +
                " outside the attainable price range");
        double mid = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            double cand = hi - f_hi * (hi - lo) / (f_hi - f_lo);
            if (!(cand > lo) || !(cand < hi)) cand = 0.5 * (lo + hi);
            const double fc = price_with(cand) - q.price;
            mid = cand;
            if (std::abs(fc) < price_tol && hi - lo < 1e-7) break;
            if (fc < 0.0) {
                lo = cand;
                f_lo = fc;
            } else {
                hi = cand;
                f_hi = fc;
            }
            if (hi - lo < 1e-12) break;
        }
        edges.push_back(q.expiry);
        values.push_back(mid);
    }
    return PiecewiseConstantCurve(std::move(edges), std::move(values));
}

}  // namespace lrsq
