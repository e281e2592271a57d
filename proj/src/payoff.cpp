#include "lrsq/payoff.hpp"

#include <algorithm>
#include <cmath>

#include "lrsq/errors.hpp"

namespace lrsq {

PayoffTable::PayoffTable(ModelParams params, SwapSpec spec)
    : params_(std::move(params)), spec_(std::move(spec)) {
    c_.resize(spec_.n + 1, 0.0);
    for (int i = 1; i <= spec_.n; ++i) c_[i] = params_.discount(spec_.payment_date(i));
}

PayoffTable PayoffTable::build(const ModelParams& params, const SwapSpec& spec) {
    if (!strike_admissible(params, spec.strike, spec.side)) {
        throw ConfigError(
            spec.side == Side::payer
                ? "inadmissible strike: payer strike must not exceed inf alpha(t) + kappa"
                : "inadmissible strike: receiver strike must not fall below sup alpha(t) - "
                  "kappa*theta");
    }
    return PayoffTable(params, spec);
}

int PayoffTable::segment(double t) const { return spec_.segment(t); }

void PayoffTable::check_domain(double t) const {
    if (t < spec_.t0 - 1e-12 || t > spec_.maturity() + 1e-12)
        throw DomainError("payoff functions are defined on [T0, Tn]");
}

double PayoffTable::g1_on_segment(int m, double t) const {
    const double k = params_.kappa;
    const double K = spec_.strike;
    const double Tm = spec_.payment_date(m);
    double v = params_.discount(t) - c_[spec_.n] * std::exp(-k * (spec_.maturity() - t)) -
               c_[m] * (Tm - t) * K * std::exp(-k * (Tm - t));
    for (int j = m + 1; j <= spec_.n; ++j)
        v -= spec_.delta * K * c_[j] * std::exp(-k * (spec_.payment_date(j) - t));
    return spec_.notional * v;
}

double PayoffTable::g2_on_segment(int m, double t) const {
    const double K = spec_.strike;
    double vhat = params_.discount(t) - c_[spec_.n] - c_[m] * (spec_.payment_date(m) - t) * K;
    for (int j = m + 1; j <= spec_.n; ++j) vhat -= spec_.delta * K * c_[j];
    const double g1hat_v = spec_.notional * vhat;
    const double g1_v = g1_on_segment(m, t);
    return params_.theta * (g1hat_v - g1_v) + g1hat_v;
}

double PayoffTable::h1_on_segment(int m, double t) const {
    const double k = params_.kappa;
    const double Tm = spec_.payment_date(m);
    const double v = -(k + params_.alpha(t)) * params_.discount(t) +
                     c_[m] * spec_.strike * std::exp(-k * (Tm - t));
    return spec_.notional * v;
}

double PayoffTable::h2_on_segment(int m, double t) const {
    const double alpha_t = params_.alpha(t);
    const double v = (1.0 + params_.theta) * (c_[m] * spec_.strike - alpha_t * params_.discount(t));
    return -params_.theta * h1_on_segment(m, t) + spec_.notional * v;
}

double PayoffTable::g1(double t) const {
    check_domain(t);
    return g1_on_segment(segment(t), t);
}

double PayoffTable::g1hat(double t) const {
    check_domain(t);
    const int m = segment(t);
    const double K = spec_.strike;
    double v = params_.discount(t) - c_[spec_.n] - c_[m] * (spec_.payment_date(m) - t) * K;
    for (int j = m + 1; j <= spec_.n; ++j) v -= spec_.delta * K * c_[j];
    return spec_.notional * v;
}

double PayoffTable::g2(double t) const {
    check_domain(t);
    return g2_on_segment(segment(t), t);
}

double PayoffTable::h1(double t) const {
    check_domain(t);
    return h1_on_segment(segment(t), t);
}

double PayoffTable::h2(double t) const {
    check_domain(t);
    return h2_on_segment(segment(t), t);
}

double PayoffTable::pi(double t) const { return -h1(t) / params_.kappa; }

double PayoffTable::gain(double t, double x) const {
    check_domain(t);
    if (!(x > 0.0)) throw DomainError("gain: factor must be positive");
    if (t >= spec_.maturity() - 1e-12) return 0.0;
    return g1(t) * x + g2(t);
}

double PayoffTable::benefit(double t, double x) const {
    check_domain(t);
    if (!(x > 0.0)) throw DomainError("benefit: factor must be positive");
    return h1(t) * x + h2(t);
}

double PayoffTable::zero_g(double t) const { return -g2(t) / g1(t); }

double PayoffTable::zero_h(double t) const { return -h2(t) / h1(t); }

double PayoffTable::g1_slope_jump(int m) const {
    if (m < 1 || m >= spec_.n) throw DomainError("slope jump defined for interior payment dates");
    const double K = spec_.strike;
    return spec_.notional * (c_[m] * K - c_[m + 1] * K * std::exp(-params_.kappa * spec_.delta));
}

double PayoffTable::g2_slope_jump(int m) const {
    if (m < 1 || m >= spec_.n) throw DomainError("slope jump defined for interior payment dates");
    const double K = spec_.strike;
    const double th = params_.theta;
    return spec_.notional * (c_[m] * K - (1.0 + th) * c_[m + 1] * K +
                             th * c_[m + 1] * K * std::exp(-params_.kappa * spec_.delta));
}

double terminal_boundary(const ModelParams& params, const SwapSpec& spec) {
    const double a = params.alpha(spec.maturity());
    const double num = params.theta * params.kappa - a + spec.strike;
    const double den = a + params.kappa - spec.strike;
    return std::max(0.0, num / den);
}

}  // namespace lrsq
