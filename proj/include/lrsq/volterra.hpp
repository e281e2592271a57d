#pragma once

#include <vector>

#include "lrsq/kernels.hpp"

namespace lrsq {

struct SolverConfig {
    int n_steps = 128;        // time steps on [T0, Tn]; grid also contains payment dates
    double root_tol = 1e-8;   // absolute tolerance on the boundary level (factor units)
    QuadConfig quad;
    double x_upper_mult = 10.0;  // bracket ceiling max(50 theta, mult * previous boundary)
};

// Optimal exercise boundary on the solver grid, with its swap-rate image.
struct BoundarySolution {
    Side side = Side::payer;
    std::vector<double> grid;        // t_0 = T0 < ... < t_N = Tn
    std::vector<double> values;      // b(t_k) (payer) or btilde(t_k) (receiver)
    std::vector<double> rate_curve;  // R(t_k) = f(t_k, b(t_k))

    // diagnostics
    long root_iterations = 0;
    double max_match_residual = 0.0;  // value-match residual in factor units
};

// Grid on [T0, Tn]: uniform n_steps plus every payment date, deduplicated.
std::vector<double> solver_grid(const SwapSpec& spec, int n_steps);

BoundarySolution solve_boundary(const SolverConfig& config, const PayoffTable& table,
                                const ModelParams& params, const SwapSpec& spec, Side side);

// Value of the stopping problem in state-price-density units at t in [T0, Tn]
// (payer V >= 0; receiver Vtilde <= 0).
double value_function(const SolverConfig& config, const PayoffTable& table,
                      const ModelParams& params, const SwapSpec& spec,
                      const BoundarySolution& bnd, double t, double x);

// Same, evaluated on many factor levels with the kernel slices shared.
std::vector<double> value_function_batch(const SolverConfig& config, const PayoffTable& table,
                                         const ModelParams& params, const SwapSpec& spec,
                                         const BoundarySolution& bnd, double t,
                                         const std::vector<double>& xs);

// Swaption price at time t (includes the pre-expiry expectation for t < T0).
double american_price(const SolverConfig& config, const ModelParams& params,
                      const SwapSpec& spec, double t, double x);
double american_price(const SolverConfig& config, const PayoffTable& table,
                      const ModelParams& params, const SwapSpec& spec,
                      const BoundarySolution& bnd, double t, double x);

// R(t_k) = f(t_k, b(t_k)) for an existing boundary.
std::vector<double> exercise_boundary_swaprate(const BoundarySolution& bnd,
                                               const ModelParams& params, const SwapSpec& spec);

}  // namespace lrsq
