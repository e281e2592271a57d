#pragma once

#include <cstdint>
#include <cstddef>
#include <span>
#include <vector>

#include "lrsq/model.hpp"

namespace lrsq {

// Monte Carlo paths of the square-root factor, full-truncation scheme with
// exact mean reversion over each step:
//   X_{j+1} = theta + (X_j^+ - theta) e^{-kappa dt} + sigma(t_j) sqrt(X_j^+ dt) Z_j.
// Each path draws from its own counter-derived substream, so results do not
// depend on how paths are partitioned across workers.
struct PathEnsemble {
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::vector<double> data;  // path-major, (n_steps + 1) values per path

    double time(std::size_t j) const { return t0 + static_cast<double>(j) * dt; }
    double value(std::size_t path, std::size_t j) const {
        return data[path * (n_steps + 1) + j];
    }
    std::span<const double> path(std::size_t p) const {
        return {data.data() + p * (n_steps + 1), n_steps + 1};
    }
};

PathEnsemble simulate_paths(const ModelParams& params, double t, double horizon,
                            std::size_t n_paths, std::size_t n_steps, std::uint64_t seed);
PathEnsemble simulate_paths(const ModelParams& params, double t, double horizon,
                            std::size_t n_paths, std::size_t n_steps, std::uint64_t seed,
                            double x_start);

// Terminal values only; avoids storing full paths for large ensembles.
std::vector<double> simulate_terminal(const ModelParams& params, double t, double horizon,
                                      std::size_t n_paths, std::size_t n_steps,
                                      std::uint64_t seed, double x_start);

}  // namespace lrsq
