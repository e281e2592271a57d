#include "lrsq/special_functions.hpp"

#include <cmath>
#include <limits>

#include "lrsq/errors.hpp"

namespace lrsq {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 800;

// Lower regularized gamma by power series, valid for x < a + 1.
double gser(double a, double x) {
    if (x <= 0.0) return 0.0;
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma by Lentz continued fraction, valid for x >= a + 1.
double gcf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw DomainError("gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gser(a, x) : 1.0 - gcf(a, x);
}

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw DomainError("gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gser(a, x) : gcf(a, x);
}

namespace {

// Central chi-squared density with d degrees of freedom at y.
double central_chisq_log_pdf(double y, double d) {
    const double h = 0.5 * d;
    return (h - 1.0) * std::log(y) - 0.5 * y - h * std::log(2.0) - std::lgamma(h);
}

// Modified Bessel route: f = 0.5 (y/lambda)^{(nu-2)/4} e^{-(sqrt y - sqrt lambda)^2/2}
//                            * e^{-sqrt(lambda y)} I_{nu/2-1}(sqrt(lambda y)) ... assembled
// with the scaled asymptotic series for I so nothing overflows.
double pdf_bessel_asymptotic(double y, double nu, double lambda) {
    const double z = std::sqrt(lambda * y);
    const double a = 0.5 * nu - 1.0;
    const double mu4 = 4.0 * a * a;
    double term = 1.0;
    double series = 1.0;
    for (int k = 1; k <= 12; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu4 - odd * odd) / (8.0 * z * k);
        series += term;
        if (std::abs(term) < 1e-17 * std::abs(series)) break;
    }
    const double sq_diff = std::sqrt(y) - std::sqrt(lambda);
    const double log_f = -0.5 * sq_diff * sq_diff + 0.25 * (nu - 2.0) * (std::log(y) - std::log(lambda)) -
                         std::log(2.0) - 0.5 * std::log(2.0 * M_PI * z);
    return std::exp(log_f) * series;
}

}  // namespace

double noncentral_chisq_pdf(double y, double nu, double lambda) {
    if (nu <= 0.0 || lambda < 0.0) throw DomainError("noncentral_chisq_pdf: bad parameters");
    if (y < 0.0) return 0.0;
    if (y == 0.0)
        return nu < 2.0 ? std::numeric_limits<double>::infinity()
                        : (nu == 2.0 ? 0.5 * std::exp(-0.5 * lambda) : 0.0);
    if (lambda == 0.0) return std::exp(central_chisq_log_pdf(y, nu));

    const double z = std::sqrt(lambda * y);
    if (z > 60.0) return pdf_bessel_asymptotic(y, nu, lambda);

    // Poisson mixture from the dominant index outward.
    const double half_l = 0.5 * lambda;
    const int k0 = static_cast<int>(std::max(0.0, std::floor(0.5 * z - 0.25 * nu)));
    const double log_w0 = -half_l + k0 * std::log(half_l) - std::lgamma(k0 + 1.0);
    const double log_f0 = central_chisq_log_pdf(y, nu + 2.0 * k0);
    const double t0 = std::exp(log_w0 + log_f0);
    if (t0 == 0.0 && k0 == 0) return 0.0;

    double sum = t0;
    // upward
    double t = t0;
    for (int k = k0 + 1; k <= k0 + kMaxIter; ++k) {
        t *= half_l / k * (0.5 * y) / (0.5 * nu + k - 1.0);
        sum += t;
        if (t < sum * 1e-17) break;
    }
    // downward
    t = t0;
    for (int k = k0; k >= 1; --k) {
        t *= k / half_l * (0.5 * nu + k - 1.0) / (0.5 * y);
        sum += t;
        if (t < sum * 1e-17) break;
    }
    return sum;
}

double noncentral_chisq_sf(double y, double nu, double lambda) {
    if (nu <= 0.0 || lambda < 0.0) throw DomainError("noncentral_chisq_sf: bad parameters");
    if (y <= 0.0) return 1.0;
    if (lambda == 0.0) return gamma_q(0.5 * nu, 0.5 * y);

    const double half_l = 0.5 * lambda;
    const int k0 = static_cast<int>(std::floor(half_l));
    double w0 = std::exp(-half_l + k0 * std::log(half_l) - std::lgamma(k0 + 1.0));
    const double q0 = gamma_q(0.5 * nu + k0, 0.5 * y);

    // increments d_k = Q(a+k+1) - Q(a+k) = (y/2)^{a+k} e^{-y/2} / Gamma(a+k+1)
    const double a = 0.5 * nu;
    double sum = w0 * q0;

    // upward from the Poisson mode; the sweep length scales with the Poisson
    // spread, which can reach tens of thousands for near-degenerate steps
    {
        const int k_cap = k0 + std::max(4 * kMaxIter, static_cast<int>(18.0 * std::sqrt(half_l)) + 200);
        double w = w0;
        double q = q0;
        double d = std::exp((a + k0) * std::log(0.5 * y) - 0.5 * y - std::lgamma(a + k0 + 1.0));
        for (int k = k0 + 1; k <= k_cap; ++k) {
            q += d;
            w *= half_l / k;
            const double term = w * q;
            sum += term;
            if (term < sum * 1e-17 && k > k0 + 4) break;
            d *= 0.5 * y / (a + k);
        }
    }
    // downward from the Poisson mode
    {
        double w = w0;
        double q = q0;
        double d = std::exp((a + k0 - 1.0) * std::log(0.5 * y) - 0.5 * y - std::lgamma(a + k0));
        for (int k = k0 - 1; k >= 0; --k) {
            w *= (k + 1.0) / half_l;
            q = std::max(0.0, q - d);
            const double term = w * q;
            sum += term;
            if (term < sum * 1e-17 && k < k0 - 4) break;
            d *= (a + k) / (0.5 * y);
        }
    }
    return std::min(1.0, sum);
}

double noncentral_chisq_cdf(double y, double nu, double lambda) {
    return 1.0 - noncentral_chisq_sf(y, nu, lambda);
}

double noncentral_chisq_partial_mean(double y, double nu, double lambda) {
    // y f_{nu,l}(y) = nu f_{nu+2,l}(y) + lambda f_{nu+4,l}(y), integrated upward.
    return nu * noncentral_chisq_sf(y, nu + 2.0, lambda) +
           lambda * noncentral_chisq_sf(y, nu + 4.0, lambda);
}

}  // namespace lrsq
