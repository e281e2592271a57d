#pragma once

#include <optional>
#include <vector>

#include "lrsq/model.hpp"
#include "lrsq/transform.hpp"

namespace lrsq {

// Tolerances for the Fourier/Laplace inversion integrals.
struct QuadConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    double max_lambda = 2e8;  // hard truncation guard for the frequency line
};

// Sampled transition density p(xhat; u, x, t) on [0, x_max].
struct DensityGrid {
    double t = 0.0, u = 0.0, x = 0.0;
    QuadConfig config;
    std::vector<double> abscissae;
    std::vector<double> values;
    int clamped_count = 0;      // negative inversion noise clipped to zero
    double clamped_mass = 0.0;  // total mass removed by clipping

    double mass() const;  // trapezoid quadrature of the samples
    double mean() const;
};

// Direct Fourier-inversion operations (any sigma curve).
double fourier_pdf(const TransformContext& ctx, double xhat, double x,
                   const QuadConfig& cfg = {});
double fourier_tail_prob(const TransformContext& ctx, double z, double x,
                         const QuadConfig& cfg = {});
double fourier_tail_expectation(const TransformContext& ctx, double z, double x,
                                std::optional<double> mu = std::nullopt,
                                const QuadConfig& cfg = {});
double fourier_lower_tail_prob(const TransformContext& ctx, double z, double x,
                               const QuadConfig& cfg = {});
double fourier_lower_partial(const TransformContext& ctx, double z, double x,
                             const QuadConfig& cfg = {});

DensityGrid make_density_grid(const ModelParams& params, double t, double u, double x,
                              int n_nodes, double x_max, const QuadConfig& cfg = {});

// Constant-sigma transition in closed form (scaled noncentral chi-squared).
class CirTransition {
public:
    CirTransition(double kappa, double theta, double sigma, double t, double u);

    double pdf(double xhat, double x) const;
    double sf(double z, double x) const;   // P(X_u >= z)
    double cdf(double z, double x) const;  // P(X_u <= z)
    double partial_upper(double z, double x) const;  // E[(X_u - z)^+]
    double partial_lower(double z, double x) const;  // E[(z - X_u)^+]
    double mean(double x) const;

    double c0() const { return c0_; }
    double nu() const { return nu_; }
    double noncentrality(double x) const { return 2.0 * c0_ * x * decay_; }

private:
    double c0_, nu_, decay_;
};

// Spec-level closed-form transition density; requires sigma constant on [t,u].
double ncx2_transition_pdf(const ModelParams& params, double t, double u, double xhat, double x);

// Law of X_u given X_t = x, dispatching between the degenerate, closed-form
// and Fourier routes. All evaluations are pure and thread-safe.
class Distribution {
public:
    static Distribution make(const ModelParams& params, double t, double u,
                             const QuadConfig& cfg = {});

    // Forces the Fourier-inversion route even when the closed form applies;
    // used to cross-validate the two routes against each other.
    static Distribution make_fourier(const ModelParams& params, double t, double u,
                                     const QuadConfig& cfg = {});

    double t() const { return t_; }
    double u() const { return u_; }
    bool degenerate() const { return kind_ == Kind::degenerate; }
    bool closed_form() const { return kind_ == Kind::cir; }
    const TransformContext& context() const { return ctx_; }

    double mean(double x) const;
    double tail_prob(double z, double x) const;         // P(X_u >= z)
    double lower_tail_prob(double z, double x) const;   // P(X_u <= z)
    double tail_expectation(double z, double x) const;  // E[(X_u - z)^+]
    double lower_partial(double z, double x) const;     // E[(z - X_u)^+]
    double pdf(double xhat, double x) const;

private:
    enum class Kind { degenerate, cir, fourier };

    Distribution(Kind kind, TransformContext ctx, std::optional<CirTransition> cir,
                 double t, double u, QuadConfig cfg)
        : kind_(kind), ctx_(std::move(ctx)), cir_(std::move(cir)), t_(t), u_(u), cfg_(cfg) {}

    Kind kind_;
    TransformContext ctx_;
    std::optional<CirTransition> cir_;
    double t_, u_;
    QuadConfig cfg_;
};

// E[ W(X_u) | X_t = x ] for a piecewise-linear W given by nodes/values,
// extended flat below the first node and with slope tail_slope beyond the
// last. Evaluated exactly as a static replication in calls E[(X-z)^+], so
// the truncation tail carries no quadrature error.
double expect_piecewise_linear(const Distribution& dist, double x,
                               const std::vector<double>& nodes,
                               const std::vector<double>& values, double tail_slope);

}  // namespace lrsq
