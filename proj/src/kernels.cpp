#include "lrsq/kernels.hpp"

#include <cmath>

#include "lrsq/errors.hpp"
#include "lrsq/special_functions.hpp"

namespace lrsq {

namespace {

double assemble_L(double h1, double h2, double z, double sf, double partial_upper) {
    return -(h1 * partial_upper + (h2 + h1 * z) * sf);
}

double assemble_Ltilde(double h1, double h2, double z, double cdf, double partial_lower) {
    return h1 * partial_lower - (h1 * z + h2) * cdf;
}

}  // namespace

double kernel_L(const PayoffTable& table, const Distribution& dist, double x, double z) {
    const double u = dist.u();
    return assemble_L(table.h1(u), table.h2(u), z, dist.tail_prob(z, x),
                      dist.tail_expectation(z, x));
}

double kernel_Ltilde(const PayoffTable& table, const Distribution& dist, double x, double z) {
    const double u = dist.u();
    return assemble_Ltilde(table.h1(u), table.h2(u), z, dist.lower_tail_prob(z, x),
                           dist.lower_partial(z, x));
}

double kernel_L(const PayoffTable& table, const ModelParams& params, double t, double u,
                double x, double z, const QuadConfig& cfg) {
    return kernel_L(table, Distribution::make(params, t, u, cfg), x, z);
}

double kernel_Ltilde(const PayoffTable& table, const ModelParams& params, double t, double u,
                     double x, double z, const QuadConfig& cfg) {
    return kernel_Ltilde(table, Distribution::make(params, t, u, cfg), x, z);
}

KernelSlice::KernelSlice(const PayoffTable& table, const ModelParams& params, double t,
                         double u, double z, const QuadConfig& cfg)
    : KernelSlice(table.h1(u), table.h2(u), params, t, u, z, cfg) {}

KernelSlice::KernelSlice(double h1, double h2, const ModelParams& params, double t, double u,
                         double z, const QuadConfig& cfg)
    : t_(t), u_(u), z_(z), h1_(h1), h2_(h2), dist_(Distribution::make(params, t, u, cfg)) {
    if (dist_.closed_form() && z > 0.0) {
        fast_ = true;
        theta_ = params.theta;
        const double sigma = params.sigma(t);
        decay_ = std::exp(-params.kappa * (u - t));
        c0_ = 2.0 * params.kappa / (sigma * sigma * (1.0 - decay_));
        nu_ = 4.0 * params.kappa * params.theta / (sigma * sigma);
        half_y_ = c0_ * z;  // half of the chi-squared threshold 2 c0 z

        const double a = 0.5 * nu_;
        ladder_.reserve(256);
        ladder_.push_back(gamma_q(a, half_y_));
        log_incr_next_ = a * std::log(half_y_) - half_y_ - std::lgamma(a + 1.0);
        next_index_ = 0;
    }
}

void KernelSlice::extend_ladder(std::size_t need) const {
    const double a = 0.5 * nu_;
    const double log_y = std::log(half_y_);
    while (ladder_.size() < need + 1) {
        // gamma_q(a+j+1, y) = gamma_q(a+j, y) + y^{a+j} e^{-y} / Gamma(a+j+1)
        const double d = std::exp(log_incr_next_);
        ladder_.push_back(std::min(1.0, ladder_.back() + d));
        next_index_ += 1;
        log_incr_next_ += log_y - std::log(a + static_cast<double>(next_index_));
    }
}

KernelSlice::Tails KernelSlice::tails(double x) const {
    const double rho = c0_ * x * decay_;  // Poisson intensity lambda_nc / 2
    const double mean = theta_ * (1.0 - decay_) + x * decay_;
    const std::size_t k0 = static_cast<std::size_t>(std::max(0.0, std::floor(rho)));
    const std::size_t k_hi_guess =
        k0 + static_cast<std::size_t>(14.0 * std::sqrt(rho + 4.0)) + 40;
    extend_ladder(k_hi_guess + 2);

    const double log_w0 = -rho + (k0 > 0 ? k0 * std::log(rho) : 0.0) - std::lgamma(k0 + 1.0);
    const double w0 = std::exp(log_w0);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;

    double w = w0;
    std::size_t k = k0;
    while (true) {  // upward sweep
        if (k + 2 >= ladder_.size()) extend_ladder(k + 34);
        s0 += w * ladder_[k];
        s1 += w * ladder_[k + 1];
        s2 += w * ladder_[k + 2];
        if (w < 1e-17 * w0 && k > k0 + 4) break;
        ++k;
        w *= rho / static_cast<double>(k);
        if (k > k0 + 100000) break;
    }
    w = w0;
    for (std::size_t j = k0; j-- > 0;) {  // downward sweep
        w *= static_cast<double>(j + 1) / rho;
        s0 += w * ladder_[j];
        s1 += w * ladder_[j + 1];
        s2 += w * ladder_[j + 2];
        if (w < 1e-17 * w0 && j + 4 < k0) break;
    }

    Tails t;
    t.sf = std::min(1.0, s0);
    const double lambda_nc = 2.0 * rho;
    const double part_mean = (nu_ * s1 + lambda_nc * s2) / (2.0 * c0_);
    t.partial_upper = std::max(0.0, part_mean - z_ * s0);
    t.mean = mean;
    return t;
}

double KernelSlice::L(double x) const {
    if (!fast_) return kernel_L_from_dist(x);
    const Tails t = tails(x);
    return assemble_L(h1_, h2_, z_, t.sf, t.partial_upper);
}

double KernelSlice::Ltilde(double x) const {
    if (!fast_) return kernel_Ltilde_from_dist(x);
    const Tails t = tails(x);
    const double partial_lower = std::max(0.0, (z_ - t.mean) + t.partial_upper);
    return assemble_Ltilde(h1_, h2_, z_, 1.0 - t.sf, partial_lower);
}

double KernelSlice::kernel_L_from_dist(double x) const {
    return assemble_L(h1_, h2_, z_, dist_.tail_prob(z_, x), dist_.tail_expectation(z_, x));
}

double KernelSlice::kernel_Ltilde_from_dist(double x) const {
    return assemble_Ltilde(h1_, h2_, z_, dist_.lower_tail_prob(z_, x),
                           dist_.lower_partial(z_, x));
}

}  // namespace lrsq
