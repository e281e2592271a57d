#include "lrsq/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lrsq/errors.hpp"

namespace lrsq {

// The transform solves the backward Riccati system
//   phi'   = kappa phi - (sigma^2(v)/2) phi^2,  phi(u)   = w,
//   varphi'= -kappa theta phi,                  varphi(u)= 0,
// whose solution is, with Lt(v) = int_v^u e^{-kappa(u-s)} sigma^2(s) ds,
//   phi(v)    = e^{-kappa(u-v)} w / (1 - (w/2) Lt(v)),
//   varphi(t) = kappa theta int_t^u e^{-kappa(u-v)} w / (1 - (w/2) Lt(v)) dv.
// For piecewise-constant sigma the v-integral reduces per piece to the
// logarithm of a complex affine ratio; no quadrature is involved.

TransformContext::TransformContext(const ModelParams& params, double t, double u)
    : t_(t), u_(u), kappa_(params.kappa), theta_(params.theta) {
    if (u < t) throw DomainError("transform: u < t");

    const auto& edges = params.sigma.edges();
    double lo = t;
    std::vector<Piece> forward;
    while (lo < u_) {
        auto it = std::upper_bound(edges.begin(), edges.end(), lo);
        const double hi = (it == edges.end()) ? u_ : std::min(*it, u_);
        Piece p;
        p.a = lo;
        p.b = hi;
        p.sigma2 = params.sigma(lo) * params.sigma(lo);
        p.y_a = std::exp(-kappa_ * (u_ - lo));
        p.y_b = std::exp(-kappa_ * (u_ - hi));
        forward.push_back(p);
        lo = hi;
    }
    // accumulate Lt backward from u; Lt decreases toward zero at v = u
    double lam = 0.0;
    for (auto rit = forward.rbegin(); rit != forward.rend(); ++rit) {
        rit->lambda_b = lam;
        lam += rit->sigma2 / kappa_ * (rit->y_b - rit->y_a);
    }
    pieces_ = std::move(forward);
    lambda_end_ = lam;  // Lt(t) = Lambda(u), the full exponentially weighted load
    lambda_sup_ = lam;
    w_max_ = (lam > 0.0) ? 2.0 / lam : std::numeric_limits<double>::infinity();

    const double sig_end = pieces_.empty() ? params.sigma(t_) : std::sqrt(pieces_.back().sigma2);
    nu_origin_ = (sig_end > 0.0) ? 4.0 * kappa_ * theta_ / (sig_end * sig_end)
                                 : std::numeric_limits<double>::infinity();
}

double TransformContext::lambda_at(double v) const {
    // Forward load Lambda(v) = int_t^v e^{-kappa(v-s)} sigma^2(s) ds.
    if (v < t_ - 1e-12 || v > u_ + 1e-12) throw DomainError("lambda_at: v outside [t, u]");
    double lam = 0.0;
    for (const auto& p : pieces_) {
        if (v <= p.a) break;
        const double end = std::min(v, p.b);
        const double y = std::exp(-kappa_ * (end - p.a));
        lam = lam * y + p.sigma2 / kappa_ * (1.0 - y);
    }
    return lam;
}

void TransformContext::check_real_argument(cplx w) const {
    if (w.imag() == 0.0 && w.real() >= w_max_)
        throw TransformExplosionError("transform argument at or beyond explosion threshold");
}

RiccatiPair TransformContext::riccati(cplx w) const {
    const RiccatiDerivs d = riccati_derivs(w);
    return {d.varphi, d.phi};
}

RiccatiDerivs TransformContext::riccati_derivs(cplx w) const {
    check_real_argument(w);
    RiccatiDerivs out{};
    const double tau = u_ - t_;
    const cplx denom_u = 1.0 - 0.5 * w * lambda_end_;
    const double decay_u = std::exp(-kappa_ * tau);
    out.phi = decay_u * w / denom_u;
    out.phi_w = decay_u / (denom_u * denom_u);
    out.phi_ww = decay_u * lambda_end_ / (denom_u * denom_u * denom_u);

    cplx acc0 = 0.0, acc1 = 0.0, acc2 = 0.0;
    for (const auto& p : pieces_) {
        // With y = e^{-kappa(u-v)} on the piece, Lt(v) = P + Q y is affine:
        const double P = p.lambda_b + (p.sigma2 / kappa_) * p.y_b;
        const double Q = -p.sigma2 / kappa_;
        const cplx A = 1.0 - 0.5 * w * P;
        const cplx B = -0.5 * w * Q;
        const double span = p.y_b - p.y_a;

        cplx i0, i1, i2;  // int dy/(A+By), /(A+By)^2, and int (P+Qy)/(A+By)^3
        if (std::abs(B) * span < 1e-9 * std::abs(A)) {
            // Nearly constant denominator: first-order expansion in B/A.
            const cplx r = B / A;
            const double s2 = p.y_b * p.y_b - p.y_a * p.y_a;
            const double s3 = p.y_b * p.y_b * p.y_b - p.y_a * p.y_a * p.y_a;
            i0 = (span - 0.5 * r * s2) / A;
            i1 = (span - r * s2) / (A * A);
            i2 = (P * span + 0.5 * Q * s2 - r * (1.5 * P * s2 + Q * s3)) / (A * A * A);
        } else {
            const cplx za = A + B * p.y_a;
            const cplx zb = A + B * p.y_b;
            // The image of [y_a, y_b] under A + B y is a straight segment that
            // cannot wind around the origin, so the principal log of the
            // endpoint ratio is the continuous antiderivative difference.
            i0 = std::log(zb / za) / B;
            i1 = (1.0 / za - 1.0 / zb) / B;
            const cplx j3 = 0.5 * (1.0 / (za * za) - 1.0 / (zb * zb)) / B;
            i2 = (Q / B) * i1 + (P - Q * A / B) * j3;
        }
        acc0 += i0;
        acc1 += i1;
        acc2 += i2;
    }
    out.varphi = theta_ * w * acc0;
    out.varphi_w = theta_ * acc1;
    out.varphi_ww = theta_ * acc2;
    return out;
}

cplx TransformContext::char_fn(cplx w, double x) const {
    const RiccatiPair r = riccati(w);
    return std::exp(r.varphi + x * r.phi);
}

double TransformContext::conditional_mean(double x) const {
    return theta_ + std::exp(-kappa_ * (u_ - t_)) * (x - theta_);
}

}  // namespace lrsq
