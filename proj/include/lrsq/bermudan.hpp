#pragma once

#include <vector>

#include "lrsq/distribution.hpp"
#include "lrsq/payoff.hpp"

namespace lrsq {

// Truncated uniform state lattice with a finite exercise-date set
// {t_0 = T0 < ... < t_m = Tn}.
struct LatticeSpec {
    std::vector<double> exercise_dates;
    double x_max = 0.0;
    int n_x = 0;

    static LatticeSpec make(const ModelParams& params, const SwapSpec& spec,
                            std::vector<double> exercise_dates, int n_x, double x_max = 0.0);

    // Convenience date sets.
    static std::vector<double> payment_dates(const SwapSpec& spec);  // {T0, T1, ..., Tn}
    static std::vector<double> periodic_dates(const SwapSpec& spec, double step);

    double h_x() const { return x_max / n_x; }
    std::vector<double> nodes() const;
};

// Row-stochastic transition density matrix between consecutive exercise dates.
struct TransitionMatrix {
    double t_from = 0.0, t_to = 0.0;
    int n = 0;                   // nodes per side (n_x + 1)
    std::vector<double> p;       // row-major density values, renormalized
    double max_row_defect = 0.0;     // worst interior |1 - mass| before renormalization
    double max_low_row_defect = 0.0; // same for the near-origin rows (head-matched)
    int degenerate_rows = 0;         // rows replaced by a point mass (unresolved kernels)

    double at(int from, int to) const { return p[static_cast<std::size_t>(from) * n + to]; }
};

// One matrix per step; with constant sigma and equal spacing the same matrix
// is shared, so matrices are stored uniquely with an index per step.
struct TransitionSet {
    std::vector<TransitionMatrix> unique;
    std::vector<int> step_index;  // size = exercise_dates.size() - 1

    const TransitionMatrix& step(std::size_t j) const { return unique[step_index[j]]; }
};

TransitionSet transition_matrices(const ModelParams& params, const LatticeSpec& lattice,
                                  const QuadConfig& cfg = {});

// Single transition matrix on the lattice from an explicit factor law;
// lets the closed-form and Fourier routes be compared entry by entry.
TransitionMatrix build_transition_matrix(const ModelParams& params, const LatticeSpec& lattice,
                                         const Distribution& dist);

// Backward induction values on the lattice in state-price-density units.
struct BermudanGrid {
    std::vector<double> nodes;
    std::vector<double> value;         // V^B(T0, x_i) (payer: max; receiver: min)
    std::vector<double> continuation;  // E[V^B(t_1, X_{t_1}) | x_i]
};

BermudanGrid bermudan_value(const ModelParams& params, const SwapSpec& spec,
                            const LatticeSpec& lattice, const TransitionSet& matrices);

double bermudan_price(const ModelParams& params, const SwapSpec& spec,
                      const LatticeSpec& lattice, const TransitionSet& matrices,
                      const BermudanGrid& grid, double t, double x,
                      const QuadConfig& cfg = {});
double bermudan_price(const ModelParams& params, const SwapSpec& spec,
                      const LatticeSpec& lattice, double t, double x,
                      const QuadConfig& cfg = {});

// Single-exercise price in closed transform form (positive part of the affine
// payoff priced off the kink).
double european_price(const ModelParams& params, const SwapSpec& spec, double t, double x,
                      const QuadConfig& cfg = {});

}  // namespace lrsq
