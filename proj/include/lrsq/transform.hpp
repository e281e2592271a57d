#pragma once

#include <complex>
#include <vector>

#include "lrsq/model.hpp"

namespace lrsq {

using cplx = std::complex<double>;

struct RiccatiPair {
    cplx varphi;
    cplx phi;
};

struct RiccatiDerivs {
    cplx varphi, phi;        // values
    cplx varphi_w, phi_w;    // first derivatives in the transform argument
    cplx varphi_ww, phi_ww;  // second derivatives
};

// Exponential-affine transform of the factor law:
//   E_{t,x}[ e^{w X_u} ] = exp( varphi(w,u,t) + x phi(w,u,t) ),
//   phi    = e^{-kappa(u-t)} w / (1 - (w/2) Lt(t)),
//   varphi = kappa theta int_t^u e^{-kappa(u-v)} w / (1 - (w/2) Lt(v)) dv,
// where Lt(v) = int_v^u e^{-kappa(u-s)} sigma^2(s) ds is the exponentially
// weighted variance load remaining after v; Lt(t) equals the forward load
// Lambda(u) = int_t^u e^{-kappa(u-s)} sigma^2(s) ds. This is the solution of
// the backward Riccati system with terminal data (0, w); see transform.cpp.
// For piecewise-constant sigma every integral reduces to logarithms of
// complex affine ratios, evaluated piece by piece; no quadrature is involved.
class TransformContext {
public:
    TransformContext(const ModelParams& params, double t, double u);

    double t() const { return t_; }
    double u() const { return u_; }
    double kappa() const { return kappa_; }
    double theta() const { return theta_; }

    // Lambda(v) for v in [t, u]; zero at v = t, continuous, nonnegative.
    double lambda_at(double v) const;
    double lambda_end() const { return lambda_end_; }

    // Real transform arguments must stay below this explosion threshold
    // (infinite when sigma vanishes on the whole interval).
    double w_max() const { return w_max_; }

    bool degenerate() const { return lambda_sup_ == 0.0; }

    // Singularity exponent of the transition density at the origin: the
    // density behaves like xhat^{nu/2 - 1} with nu = 4 kappa theta / sigma(u-)^2
    // (paths ending near zero are shaped by the volatility just before u).
    double nu_origin() const { return nu_origin_; }

    RiccatiPair riccati(cplx w) const;
    RiccatiDerivs riccati_derivs(cplx w) const;
    cplx char_fn(cplx w, double x) const;

    double conditional_mean(double x) const;

private:
    struct Piece {
        double a, b;        // time bounds within [t, u]
        double sigma2;      // sigma^2 on the piece
        double lambda_b;    // backward load Lt at the right end
        double y_a, y_b;    // e^{-kappa (u - a)}, e^{-kappa (u - b)}
    };

    void check_real_argument(cplx w) const;

    double t_, u_, kappa_, theta_;
    double lambda_end_ = 0.0;
    double lambda_sup_ = 0.0;
    double w_max_ = 0.0;
    double nu_origin_ = 0.0;
    std::vector<Piece> pieces_;
};

}  // namespace lrsq
