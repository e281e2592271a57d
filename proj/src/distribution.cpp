#include "lrsq/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>

#include "lrsq/errors.hpp"
#include "lrsq/special_functions.hpp"

namespace lrsq {

namespace {

// Integrand F(lambda) = exp(varphi + x phi + shift) / s^k on the contour
// s = mu + i lambda; the integral computed is int_0^inf Re[F e^{-i lambda z}].
struct LineIntegrand {
    const TransformContext* ctx;
    double x;
    double mu;
    double shift;
    int k;

    cplx F(double lam) const {
        const cplx s(mu, lam);
        RiccatiPair r = ctx->riccati(s);
        cplx e = std::exp(r.varphi + x * r.phi + shift);
        for (int i = 0; i < k; ++i) e /= s;
        return e;
    }

    void derivs(double lam, cplx& f, cplx& f1, cplx& f2) const {
        const cplx s(mu, lam);
        RiccatiDerivs d = ctx->riccati_derivs(s);
        cplx e = std::exp(d.varphi + x * d.phi + shift);
        for (int i = 0; i < k; ++i) e /= s;
        f = e;
        const cplx psi_w = d.varphi_w + x * d.phi_w;
        const cplx psi_ww = d.varphi_ww + x * d.phi_ww;
        const cplx g = (k == 0) ? psi_w : psi_w - static_cast<double>(k) / s;
        const cplx curv = (k == 0) ? psi_ww : psi_ww + static_cast<double>(k) / (s * s);
        f1 = f * cplx(0.0, 1.0) * g;
        f2 = -f * (g * g + curv);
    }
};

struct OscResult {
    double value = 0.0;
    double err = 0.0;
    double lambda_end = 0.0;
    long evals = 0;
    bool converged = false;
};

double adaptive_simpson(const std::function<double(double)>& g, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth, int force,
                        long& evals) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = g(lm), frm = g(rm);
    evals += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || (force <= 0 && std::abs(delta) <= 15.0 * tol))
        return left + right + delta / 15.0;
    return adaptive_simpson(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, force - 1, evals) +
           adaptive_simpson(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, force - 1, evals);
}

// force_levels guards against stroboscopic sampling of oscillatory
// integrands: the first refinements are unconditional so that a phase-locked
// coarse estimate cannot masquerade as converged.
double simpson_panel(const std::function<double(double)>& g, double a, double b, double tol,
                     long& evals, int force_levels) {
    const double fa = g(a), fm = g(0.5 * (a + b)), fb = g(b);
    evals += 3;
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(g, a, b, fa, fm, fb, whole, tol, 26, force_levels, evals);
}

OscResult integrate_line(const LineIntegrand& f, double z, const QuadConfig& cfg) {
    OscResult out;
    auto g = [&](double lam) { return (f.F(lam) * std::polar(1.0, -lam * z)).real(); };

    cplx F0, F10, F20;
    f.derivs(0.0, F0, F10, F20);
    out.evals += 1;
    const double mag0 = std::abs(F0);
    if (mag0 == 0.0) {  // uniformly damped to zero (deep tail); nothing to sum
        out.converged = true;
        return out;
    }

    const double scale = std::abs(F10) / mag0;
    double len = std::clamp(0.3 / std::max(scale, 0.05), 1e-3, 4.0);
    // Panel cap: an irrational multiple of the oscillation period, so panel
    // endpoints and Simpson nodes never phase-lock with the oscillation.
    const double period_cap =
        (z > 1e-14) ? 2.0 * M_PI * 3.7321 / z : std::numeric_limits<double>::infinity();
    len = std::min(len, period_cap);

    double lam = 0.0;
    double prev_mag = mag0;
    double prev_lam = 0.0;
    double last_panel = std::numeric_limits<double>::infinity();

    while (true) {
        if (std::getenv("LRSQ_OSC_DEBUG"))
            std::fprintf(stderr, "panel lam=%g len=%g value=%g evals=%ld\n", lam, len, out.value,
                         out.evals);
        const double tol_now = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(out.value));
        const int force = (z > 1e-14 && len * z > 2.0) ? 3 : 1;
        const double panel = simpson_panel(g, lam, lam + len, tol_now / 30.0, out.evals, force);
        out.value += panel;
        lam += len;
        last_panel = std::abs(panel);

        cplx F, F1, F2;
        f.derivs(lam, F, F1, F2);
        out.evals += 1;
        const double mag = std::abs(F);
        const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(out.value));

        if (z > 1e-14 && lam * z > 25.0) {
            // Tail by repeated integration by parts against e^{-i lam z}; the
            // residual after the F'' term is |F'''|/z^4, measured by a central
            // difference so pre-asymptotic transform structure cannot fool it.
            const cplx iz(0.0, z);
            const cplx tail =
                std::polar(1.0, -lam * z) * (F / iz + F1 / (iz * iz) + F2 / (iz * iz * iz));
            const double dl = 1e-3 * lam;
            cplx Fp, F1p, F2p, Fm, F1m, F2m;
            f.derivs(lam + dl, Fp, F1p, F2p);
            f.derivs(lam - dl, Fm, F1m, F2m);
            out.evals += 2;
            const double f3 = std::abs(F2p - F2m) / (2.0 * dl);
            const double err_tail = 4.0 * f3 / (z * z * z * z) +
                                    std::abs(F2) / (z * z * z) * 1e-3;
            if (err_tail < 0.5 * tol) {
                out.value += tail.real();
                out.err = err_tail;
                out.converged = true;
                break;
            }
        }
        if (mag > 0.0 && prev_mag > mag && lam > 4.0 * len) {
            const double p = std::log(prev_mag / mag) / std::log(lam / prev_lam);
            if (p > 1.1) {
                const double env_tail = mag * lam / (p - 1.0);
                if (env_tail * 30.0 < tol && last_panel < tol) {
                    out.err = env_tail;
                    out.converged = true;
                    break;
                }
            }
        }
        prev_mag = mag;
        prev_lam = lam;
        if (lam > cfg.max_lambda) {
            out.err = std::max(mag * lam, last_panel);
            break;
        }
        len = std::min(len * 1.6, period_cap);
    }
    out.lambda_end = lam;
    return out;
}

double scale_of(const TransformContext& ctx, double x) {
    return std::max({1.0, ctx.theta(), x});
}

}  // namespace

double fourier_pdf(const TransformContext& ctx, double xhat, double x, const QuadConfig& cfg) {
    if (ctx.u() <= ctx.t())
        throw DegenerateDistributionError("pdf: point mass at u = t");
    if (ctx.degenerate())
        throw DegenerateDistributionError("pdf: sigma vanishes on [t,u], law is a point mass");
    if (xhat < 0.0) return 0.0;
    if (xhat == 0.0) {
        if (ctx.nu_origin() > 2.0) return 0.0;
        if (ctx.nu_origin() < 2.0) return std::numeric_limits<double>::infinity();
        xhat = 1e-9 * scale_of(ctx, x);
    }
    LineIntegrand f{&ctx, x, 0.0, 0.0, 0};
    const OscResult r = integrate_line(f, xhat, cfg);
    return r.value / M_PI;
}

namespace {

// P(X_u <= z) for z below the damped-inversion comfort zone: integrate the
// density on geometric panels plus a power-law head below x_floor.
double small_z_lower_mass(const TransformContext& ctx, double z, double x,
                          const QuadConfig& cfg) {
    const double x_floor = 1e-7 * scale_of(ctx, x);
    const double expo = std::isfinite(ctx.nu_origin()) ? 0.5 * ctx.nu_origin() : 1.0;
    auto pdf = [&](double s) { return fourier_pdf(ctx, s, x, cfg); };
    if (z <= x_floor) return pdf(z > 0.0 ? z : x_floor) * std::max(z, 0.0) / expo;
    double acc = pdf(x_floor) * x_floor / expo;
    double lo = x_floor;
    const int n_panels = 10;
    const double ratio = std::pow(z / x_floor, 1.0 / n_panels);
    for (int i = 0; i < n_panels; ++i) {
        const double hi = (i == n_panels - 1) ? z : lo * ratio;
        // 8-interval composite Simpson per geometric panel
        const int n = 8;
        const double h = (hi - lo) / n;
        double s = pdf(lo) + pdf(hi);
        for (int j = 1; j < n; ++j) s += pdf(lo + j * h) * ((j % 2) ? 4.0 : 2.0);
        acc += s * h / 3.0;
        lo = hi;
    }
    return acc;
}

}  // namespace

double fourier_tail_prob(const TransformContext& ctx, double z, double x, const QuadConfig& cfg) {
    if (z <= 0.0) return 1.0;  // the factor is nonnegative
    if (ctx.degenerate() || ctx.u() <= ctx.t())
        return ctx.conditional_mean(x) >= z ? 1.0 : 0.0;

    const double z_tiny = 1e-3 * scale_of(ctx, x);
    if (z < z_tiny) return std::clamp(1.0 - small_z_lower_mass(ctx, z, x, cfg), 0.0, 1.0);
    const double mu = 0.5 * ctx.w_max();
    LineIntegrand f{&ctx, x, mu, -mu * z, 1};
    const OscResult r = integrate_line(f, z, cfg);
    return std::clamp(r.value / M_PI, 0.0, 1.0);
}

double fourier_tail_expectation(const TransformContext& ctx, double z, double x,
                                std::optional<double> mu_opt, const QuadConfig& cfg) {
    if (z < 0.0) throw DomainError("tail_expectation: z must be nonnegative");
    if (ctx.degenerate() || ctx.u() <= ctx.t())
        return std::max(ctx.conditional_mean(x) - z, 0.0);
    const double mu = mu_opt.value_or(0.5 * ctx.w_max());
    if (!(mu > 0.0) || mu >= ctx.w_max())
        throw TransformExplosionError("tail_expectation: damping must lie in (0, w_max)");
    LineIntegrand f{&ctx, x, mu, -mu * z, 2};
    const OscResult r = integrate_line(f, z, cfg);
    return std::max(r.value / M_PI, 0.0);
}

double fourier_lower_tail_prob(const TransformContext& ctx, double z, double x,
                               const QuadConfig& cfg) {
    if (z <= 0.0) return 0.0;
    if (ctx.degenerate() || ctx.u() <= ctx.t())
        return ctx.conditional_mean(x) <= z ? 1.0 : 0.0;
    if (z < 1e-3 * scale_of(ctx, x))
        return std::clamp(small_z_lower_mass(ctx, z, x, cfg), 0.0, 1.0);
    const double m = ctx.conditional_mean(x);
    if (z >= m) return std::clamp(1.0 - fourier_tail_prob(ctx, z, x, cfg), 0.0, 1.0);

    // Contour on the negative real side; keep the damped peak under control.
    double mu_put = std::min(0.5 * ctx.w_max(), 3.0 / (m - z));
    for (int tries = 0; tries < 60; ++tries) {
        LineIntegrand f{&ctx, x, -mu_put, mu_put * z, 1};
        const cplx peak = f.F(0.0);
        if (std::abs(peak) < 1e9) break;
        mu_put *= 0.5;
    }
    LineIntegrand f{&ctx, x, -mu_put, mu_put * z, 1};
    const OscResult r = integrate_line(f, z, cfg);
    return std::clamp(-r.value / M_PI, 0.0, 1.0);
}

double fourier_lower_partial(const TransformContext& ctx, double z, double x,
                             const QuadConfig& cfg) {
    if (z <= 0.0) return 0.0;
    if (ctx.degenerate() || ctx.u() <= ctx.t())
        return std::max(z - ctx.conditional_mean(x), 0.0);
    const double m = ctx.conditional_mean(x);
    if (z >= m)
        return (z - m) + fourier_tail_expectation(ctx, z, x, std::nullopt, cfg);

    double mu_put = std::min(0.5 * ctx.w_max(), 3.0 / (m - z));
    for (int tries = 0; tries < 60; ++tries) {
        LineIntegrand f{&ctx, x, -mu_put, mu_put * z, 2};
        if (std::abs(f.F(0.0)) < 1e9) break;
        mu_put *= 0.5;
    }
    LineIntegrand f{&ctx, x, -mu_put, mu_put * z, 2};
    const OscResult r = integrate_line(f, z, cfg);
    return std::max(r.value / M_PI, 0.0);
}

double DensityGrid::mass() const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < abscissae.size(); ++i)
        acc += 0.5 * (values[i] + values[i + 1]) * (abscissae[i + 1] - abscissae[i]);
    return acc;
}

double DensityGrid::mean() const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < abscissae.size(); ++i)
        acc += 0.5 * (abscissae[i] * values[i] + abscissae[i + 1] * values[i + 1]) *
               (abscissae[i + 1] - abscissae[i]);
    return acc;
}

DensityGrid make_density_grid(const ModelParams& params, double t, double u, double x,
                              int n_nodes, double x_max, const QuadConfig& cfg) {
    if (n_nodes < 16) throw DomainError("density grid needs at least 16 nodes");
    TransformContext ctx(params, t, u);
    if (ctx.degenerate() || u <= t)
        throw DegenerateDistributionError("density grid: law is a point mass");

    DensityGrid grid;
    grid.t = t;
    grid.u = u;
    grid.x = x;
    grid.config = cfg;

    // Geometric spacing resolves the possible integrable singularity at the
    // origin (shaped by sigma just before u); uniform spacing covers the bulk.
    const int n_geo = n_nodes / 2;
    const double x_lo = 1e-8 * x_max;
    const double x_mid = std::min(0.5, 0.25 * x_max);
    grid.abscissae.push_back(0.0);
    const double ratio = std::pow(x_mid / x_lo, 1.0 / (n_geo - 1));
    for (int i = 0; i < n_geo; ++i) grid.abscissae.push_back(x_lo * std::pow(ratio, i));
    const int n_uni = n_nodes - n_geo;
    const double h = (x_max - x_mid) / n_uni;
    for (int i = 1; i <= n_uni; ++i) grid.abscissae.push_back(x_mid + h * i);

    grid.values.resize(grid.abscissae.size());
    for (std::size_t i = 0; i < grid.abscissae.size(); ++i) {
        const double xhat = grid.abscissae[i];
        // Origin node stores zero: the density either vanishes there or has an
        // integrable singularity that the geometric nodes already resolve.
        double p = (xhat == 0.0) ? 0.0 : fourier_pdf(ctx, xhat, x, cfg);
        if (p < 0.0) {
            if (p < -1e-8) throw TruncationError("density grid: negative value beyond tolerance");
            grid.clamped_count += 1;
            grid.clamped_mass += -p;
            p = 0.0;
        }
        grid.values[i] = p;
    }
    return grid;
}

CirTransition::CirTransition(double kappa, double theta, double sigma, double t, double u) {
    if (!(sigma > 0.0) || !(u > t)) throw DomainError("CirTransition: need sigma > 0, u > t");
    decay_ = std::exp(-kappa * (u - t));
    c0_ = 2.0 * kappa / (sigma * sigma * (1.0 - decay_));
    nu_ = 4.0 * kappa * theta / (sigma * sigma);
}

double CirTransition::pdf(double xhat, double x) const {
    if (xhat < 0.0) return 0.0;
    return 2.0 * c0_ * noncentral_chisq_pdf(2.0 * c0_ * xhat, nu_, noncentrality(x));
}

double CirTransition::sf(double z, double x) const {
    if (z <= 0.0) return 1.0;
    return noncentral_chisq_sf(2.0 * c0_ * z, nu_, noncentrality(x));
}

double CirTransition::cdf(double z, double x) const { return 1.0 - sf(z, x); }

double CirTransition::mean(double x) const { return (nu_ + noncentrality(x)) / (2.0 * c0_); }

double CirTransition::partial_upper(double z, double x) const {
    if (z <= 0.0) return mean(x) - z;
    const double y = 2.0 * c0_ * z;
    const double part = noncentral_chisq_partial_mean(y, nu_, noncentrality(x)) / (2.0 * c0_);
    return std::max(0.0, part - z * sf(z, x));
}

double CirTransition::partial_lower(double z, double x) const {
    return std::max(0.0, (z - mean(x)) + partial_upper(z, x));
}

double ncx2_transition_pdf(const ModelParams& params, double t, double u, double xhat, double x) {
    if (!params.sigma.is_constant_on(t, std::max(t, u - 1e-12)))
        throw UnsupportedConfigError(
            "ncx2 transition density requires constant sigma on [t, u]");
    const double sigma = params.sigma(t);
    if (sigma == 0.0 || u <= t)
        throw DegenerateDistributionError("ncx2 transition density: law is a point mass");
    return CirTransition(params.kappa, params.theta, sigma, t, u).pdf(xhat, x);
}

Distribution Distribution::make(const ModelParams& params, double t, double u,
                                const QuadConfig& cfg) {
    TransformContext ctx(params, t, u);
    if (u <= t || ctx.degenerate())
        return Distribution(Kind::degenerate, std::move(ctx), std::nullopt, t, u, cfg);
    if (params.sigma.is_constant_on(t, u - 1e-12)) {
        CirTransition cir(params.kappa, params.theta, params.sigma(t), t, u);
        return Distribution(Kind::cir, std::move(ctx), cir, t, u, cfg);
    }
    return Distribution(Kind::fourier, std::move(ctx), std::nullopt, t, u, cfg);
}

Distribution Distribution::make_fourier(const ModelParams& params, double t, double u,
                                        const QuadConfig& cfg) {
    TransformContext ctx(params, t, u);
    if (u <= t || ctx.degenerate())
        return Distribution(Kind::degenerate, std::move(ctx), std::nullopt, t, u, cfg);
    return Distribution(Kind::fourier, std::move(ctx), std::nullopt, t, u, cfg);
}

double Distribution::mean(double x) const { return ctx_.conditional_mean(x); }

double Distribution::tail_prob(double z, double x) const {
    switch (kind_) {
        case Kind::degenerate: return mean(x) >= z ? 1.0 : 0.0;
        case Kind::cir: return cir_->sf(z, x);
        case Kind::fourier: return fourier_tail_prob(ctx_, z, x, cfg_);
    }
    return 0.0;
}

double Distribution::lower_tail_prob(double z, double x) const {
    switch (kind_) {
        case Kind::degenerate: return mean(x) <= z ? 1.0 : 0.0;
        case Kind::cir: return cir_->cdf(z, x);
        case Kind::fourier: return fourier_lower_tail_prob(ctx_, z, x, cfg_);
    }
    return 0.0;
}

double Distribution::tail_expectation(double z, double x) const {
    switch (kind_) {
        case Kind::degenerate: return std::max(mean(x) - z, 0.0);
        case Kind::cir: return cir_->partial_upper(z, x);
        case Kind::fourier: return fourier_tail_expectation(ctx_, z, x, std::nullopt, cfg_);
    }
    return 0.0;
}

double Distribution::lower_partial(double z, double x) const {
    switch (kind_) {
        case Kind::degenerate: return std::max(z - mean(x), 0.0);
        case Kind::cir: return cir_->partial_lower(z, x);
        case Kind::fourier: return fourier_lower_partial(ctx_, z, x, cfg_);
    }
    return 0.0;
}

double Distribution::pdf(double xhat, double x) const {
    switch (kind_) {
        case Kind::degenerate:
            throw DegenerateDistributionError("pdf: law is a point mass");
        case Kind::cir: return cir_->pdf(xhat, x);
        case Kind::fourier: return fourier_pdf(ctx_, xhat, x, cfg_);
    }
    return 0.0;
}

double expect_piecewise_linear(const Distribution& dist, double x,
                               const std::vector<double>& nodes,
                               const std::vector<double>& values, double tail_slope) {
    if (nodes.size() != values.size() || nodes.size() < 2)
        throw DomainError("expect_piecewise_linear: need matching nodes and values");
    const std::size_t m = nodes.size();
    double acc = values.front();  // flat extension below the first node
    double prev_slope = 0.0;
    for (std::size_t j = 0; j + 1 < m; ++j) {
        const double slope = (values[j + 1] - values[j]) / (nodes[j + 1] - nodes[j]);
        if (slope != prev_slope) acc += (slope - prev_slope) * dist.tail_expectation(nodes[j], x);
        prev_slope = slope;
    }
    if (tail_slope != prev_slope)
        acc += (tail_slope - prev_slope) * dist.tail_expectation(nodes.back(), x);
    return acc;
}

}  // namespace lrsq
