#include "lrsq/model.hpp"

#include <algorithm>
#include <cmath>

#include "lrsq/errors.hpp"
#include "lrsq/root.hpp"

namespace lrsq {

ModelParams::ModelParams(double kappa_, double theta_, PiecewiseConstantCurve alpha_,
                         PiecewiseConstantCurve sigma_, double x0_)
    : kappa(kappa_), theta(theta_), alpha(std::move(alpha_)), sigma(std::move(sigma_)), x0(x0_) {
    if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
    if (!(theta > 0.0)) throw ConfigError("theta must be positive");
    if (!(x0 > 0.0)) throw ConfigError("x0 must be positive");
    if (sigma.min_value() < 0.0) throw ConfigError("sigma(t) must be nonnegative");
}

double ModelParams::discount(double t) const { return std::exp(-alpha.integral(0.0, t)); }

SwapSpec::SwapSpec(double t0_, double delta_, int n_, double strike_, double notional_, Side side_)
    : t0(t0_), delta(delta_), n(n_), strike(strike_), notional(notional_), side(side_) {
    if (!(t0 > 0.0)) throw ConfigError("first reset date must be positive");
    if (!(delta > 0.0)) throw ConfigError("accrual period must be positive");
    if (n < 1) throw ConfigError("swap needs at least one payment");
    if (!(notional > 0.0)) throw ConfigError("notional must be positive");
}

int SwapSpec::segment(double t) const {
    int m = 1 + static_cast<int>(std::floor((t - t0) / delta + 1e-12));
    return std::clamp(m, 1, n);
}

double state_price_density(const ModelParams& params, double t, double x) {
    if (t < 0.0) throw DomainError("state_price_density: t < 0");
    if (!(x > 0.0)) throw DomainError("state_price_density: factor must be positive");
    return params.discount(t) * (1.0 + x);
}

double zcb_price(const ModelParams& params, double t, double T, double x) {
    if (T < t) throw DomainError("zcb_price: maturity before valuation date");
    if (t < 0.0) throw DomainError("zcb_price: t < 0");
    if (!(x > 0.0)) throw DomainError("zcb_price: factor must be positive");
    const double df = std::exp(-params.alpha.integral(t, T));
    const double num = 1.0 + params.theta + std::exp(-params.kappa * (T - t)) * (x - params.theta);
    return df * num / (1.0 + x);
}

double short_rate(const ModelParams& params, double t, double x) {
    if (t < 0.0) throw DomainError("short_rate: t < 0");
    if (!(x > 0.0)) throw DomainError("short_rate: factor must be positive");
    return params.alpha(t) - params.kappa * (params.theta - x) / (1.0 + x);
}

double conditional_mean(const ModelParams& params, double t, double T, double x) {
    if (T < t) throw DomainError("conditional_mean: T < t");
    return params.theta + std::exp(-params.kappa * (T - t)) * (x - params.theta);
}

double conditional_variance(const ModelParams& params, double t, double T, double x) {
    if (T < t) throw DomainError("conditional_variance: T < t");
    const double k = params.kappa;
    const auto& edges = params.sigma.edges();
    double acc = 0.0;
    double lo = t;
    while (lo < T) {
        auto it = std::upper_bound(edges.begin(), edges.end(), lo);
        const double hi = (it == edges.end()) ? T : std::min(*it, T);
        const double s2 = params.sigma(lo) * params.sigma(lo);
        // int_lo^hi e^{-2k(T-s)} sigma^2 (theta + e^{-k(s-t)}(x-theta)) ds
        const double i_theta =
            (std::exp(-2.0 * k * (T - hi)) - std::exp(-2.0 * k * (T - lo))) / (2.0 * k);
        const double i_x = (std::exp(-2.0 * k * (T - hi) - k * (hi - t)) -
                            std::exp(-2.0 * k * (T - lo) - k * (lo - t))) /
                           k;
        acc += s2 * (params.theta * i_theta + (x - params.theta) * i_x);
        lo = hi;
    }
    return acc;
}

namespace {

// Sum of fixed-leg annuity and remaining discount factors for t in [T0, Tn).
struct SwapLegs {
    double floating;  // 1 - P(t, Tn)
    double annuity;   // (T_m - t) P(t,T_m) + delta * sum_{j>m} P(t,T_j)
};

SwapLegs running_swap_legs(const ModelParams& params, const SwapSpec& spec, double t, double x) {
    const int m = spec.segment(t);
    double annuity = (spec.payment_date(m) - t) * zcb_price(params, t, spec.payment_date(m), x);
    for (int j = m + 1; j <= spec.n; ++j)
        annuity += spec.delta * zcb_price(params, t, spec.payment_date(j), x);
    return {1.0 - zcb_price(params, t, spec.maturity(), x), annuity};
}

}  // namespace

double swap_value(const ModelParams& params, const SwapSpec& spec, double t, double x) {
    if (t > spec.maturity()) throw DomainError("swap_value: t beyond last payment date");
    if (!(x > 0.0)) throw DomainError("swap_value: factor must be positive");
    double payer_value;
    if (t >= spec.maturity()) {
        payer_value = 0.0;
    } else if (t <= spec.t0) {
        double v = zcb_price(params, t, spec.t0, x) - zcb_price(params, t, spec.maturity(), x);
        for (int j = 1; j <= spec.n; ++j)
            v -= spec.delta * spec.strike * zcb_price(params, t, spec.payment_date(j), x);
        payer_value = v;
    } else {
        const SwapLegs legs = running_swap_legs(params, spec, t, x);
        payer_value = legs.floating - spec.strike * legs.annuity;
    }
    const double sign = (spec.side == Side::payer) ? 1.0 : -1.0;
    return sign * spec.notional * payer_value;
}

double swap_rate(const ModelParams& params, const SwapSpec& spec, double t, double x) {
    if (t >= spec.maturity()) {
        // f(Tn-, x) collapses to the short rate; accept a terminal query.
        if (t - spec.maturity() < 1e-9) return short_rate(params, spec.maturity(), x);
        throw DomainError("swap_rate: t beyond last payment date");
    }
    if (!(x > 0.0)) throw DomainError("swap_rate: factor must be positive");
    if (spec.maturity() - t < 1e-9) return short_rate(params, spec.maturity(), x);
    if (t < spec.t0) {
        // Forward par rate of the full swap.
        double annuity = 0.0;
        for (int j = 1; j <= spec.n; ++j)
            annuity += spec.delta * zcb_price(params, t, spec.payment_date(j), x);
        return (zcb_price(params, t, spec.t0, x) - zcb_price(params, t, spec.maturity(), x)) / annuity;
    }
    const SwapLegs legs = running_swap_legs(params, spec, t, x);
    return legs.floating / legs.annuity;
}

RateRange swap_rate_range(const ModelParams& params, const SwapSpec& spec, double t) {
    // Evaluate the two monotone limits by pushing the factor to the ends of
    // its range; the rational structure keeps both evaluations stable.
    const double tiny = 1e-13;
    const double huge = 1e13;
    return {swap_rate(params, spec, t, tiny), swap_rate(params, spec, t, huge)};
}

double invert_swap_rate(const ModelParams& params, const SwapSpec& spec, double t, double s) {
    const RateRange range = swap_rate_range(params, spec, t);
    if (!(s > range.lo) || !(s < range.hi))
        throw UnattainableRateError("invert_swap_rate: rate outside attainable range", range.lo,
                                    range.hi);

    double lo = 1e-10;
    double hi = 1.0;
    while (swap_rate(params, spec, t, hi) < s) {
        hi *= 2.0;
        if (hi > 1e14)
            throw UnattainableRateError("invert_swap_rate: bracket expansion failed", range.lo,
                                        range.hi);
    }
    auto fn = [&](double y) { return swap_rate(params, spec, t, y) - s; };
    return brent_root(fn, lo, hi, fn(lo), fn(hi), 1e-13 * (1.0 + hi), 300);
}

bool strike_admissible(const ModelParams& params, double strike, Side side) {
    if (side == Side::payer) return strike <= params.alpha.min_value() + params.kappa;
    return strike >= params.alpha.max_value() - params.kappa * params.theta;
}

}  // namespace lrsq
