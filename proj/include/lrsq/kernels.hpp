#pragma once

#include <vector>

#include "lrsq/distribution.hpp"
#include "lrsq/payoff.hpp"

namespace lrsq {

// Early-exercise premium kernels,
//   L(t,u,x,z)      = -E_{t,x}[ H(u, X_u) 1{X_u >= z} ],
//   Ltilde(t,u,x,z) = -E_{t,x}[ H(u, X_u) 1{X_u <= z} ],
// assembled from tail probabilities and tail expectations of the factor law.
double kernel_L(const PayoffTable& table, const Distribution& dist, double x, double z);
double kernel_Ltilde(const PayoffTable& table, const Distribution& dist, double x, double z);

double kernel_L(const PayoffTable& table, const ModelParams& params, double t, double u,
                double x, double z, const QuadConfig& cfg = {});
double kernel_Ltilde(const PayoffTable& table, const ModelParams& params, double t, double u,
                     double x, double z, const QuadConfig& cfg = {});

// One (t, u, z) kernel evaluation cached for repeated x queries, as needed by
// the backward recursion where only the trial boundary level moves. For
// constant sigma the incomplete-gamma ladder of the noncentral chi-squared
// survival function is precomputed once; the per-x cost is then a single
// Poisson-weight sweep.
class KernelSlice {
public:
    KernelSlice(const PayoffTable& table, const ModelParams& params, double t, double u,
                double z, const QuadConfig& cfg = {});

    // Variant with explicit benefit coefficients H1, H2 at u; the backward
    // recursion evaluates them on the segment interior to its quadrature
    // interval so payment-date jumps land on the correct side.
    KernelSlice(double h1, double h2, const ModelParams& params, double t, double u, double z,
                const QuadConfig& cfg = {});

    double L(double x) const;
    double Ltilde(double x) const;

    double u() const { return u_; }
    double z() const { return z_; }

private:
    struct Tails {
        double sf;             // P(X >= z)
        double partial_upper;  // E[(X - z)^+]
        double mean;
    };
    Tails tails(double x) const;
    void extend_ladder(std::size_t need) const;
    double kernel_L_from_dist(double x) const;
    double kernel_Ltilde_from_dist(double x) const;

    double t_, u_, z_;
    double h1_, h2_;
    Distribution dist_;

    // constant-sigma fast path
    bool fast_ = false;
    double c0_ = 0.0, nu_ = 0.0, decay_ = 0.0, theta_ = 0.0;
    double half_y_ = 0.0;                  // half the chi-squared threshold, c0 z
    mutable std::vector<double> ladder_;   // gamma_q(nu/2 + j, c0 z), j = 0..
    mutable double log_incr_next_ = 0.0;   // log increment producing the next rung
    mutable std::size_t next_index_ = 0;
};

}  // namespace lrsq
