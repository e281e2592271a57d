#include "lrsq/simulate.hpp"

#include <cmath>

#include "lrsq/errors.hpp"

namespace lrsq {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

inline std::uint64_t avalanche(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        return avalanche(z);
    }
    double uniform() {  // (0, 1)
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }
};

// Box-Muller on a per-path counter stream: platform-independent draws. The
// stream offset is avalanched twice so distinct paths land at well-separated
// phases of the generator orbit rather than adjacent ones.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t path)
        : rng_{avalanche(avalanche(seed ^ 0x5851f42d4c957f2dULL) +
                         (path + 1) * 0x9e3779b97f4a7c15ULL)} {
        rng_.next();
        rng_.next();
    }
    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = rng_.uniform();
        const double u2 = rng_.uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(kTwoPi * u2);
        have_spare_ = true;
        return r * std::cos(kTwoPi * u2);
    }

private:
    SplitMix64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace

PathEnsemble simulate_paths(const ModelParams& params, double t, double horizon,
                            std::size_t n_paths, std::size_t n_steps, std::uint64_t seed,
                            double x_start) {
    if (n_paths < 1 || n_steps < 1) throw DomainError("simulate_paths: need paths and steps");
    if (horizon < t) throw DomainError("simulate_paths: horizon before start");

    PathEnsemble ens;
    ens.t0 = t;
    ens.n_paths = n_paths;
    ens.n_steps = n_steps;
    ens.dt = (horizon - t) / static_cast<double>(n_steps);
    ens.data.resize(n_paths * (n_steps + 1));

    const double decay = std::exp(-params.kappa * ens.dt);
    const double sqrt_dt = std::sqrt(ens.dt);

    for (std::size_t p = 0; p < n_paths; ++p) {
        NormalStream normals(seed, p);
        double* path = ens.data.data() + p * (n_steps + 1);
        double x = x_start;
        path[0] = std::max(x, 0.0);
        for (std::size_t j = 0; j < n_steps; ++j) {
            const double xp = std::max(x, 0.0);
            const double vol = params.sigma(ens.time(j));
            x = params.theta + (xp - params.theta) * decay +
                vol * std::sqrt(xp) * sqrt_dt * normals.next();
            path[j + 1] = std::max(x, 0.0);
        }
    }
    return ens;
}

PathEnsemble simulate_paths(const ModelParams& params, double t, double horizon,
                            std::size_t n_paths, std::size_t n_steps, std::uint64_t seed) {
    return simulate_paths(params, t, horizon, n_paths, n_steps, seed, params.x0);
}

std::vector<double> simulate_terminal(const ModelParams& params, double t, double horizon,
                                      std::size_t n_paths, std::size_t n_steps,
                                      std::uint64_t seed, double x_start) {
    if (n_paths < 1 || n_steps < 1) throw DomainError("simulate_terminal: need paths and steps");
    const double dt = (horizon - t) / static_cast<double>(n_steps);
    const double decay = std::exp(-params.kappa * dt);
    const double sqrt_dt = std::sqrt(dt);

    std::vector<double> out(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) {
        NormalStream normals(seed, p);
        double x = x_start;
        for (std::size_t j = 0; j < n_steps; ++j) {
            const double xp = std::max(x, 0.0);
            const double vol = params.sigma(t + static_cast<double>(j) * dt);
            x = params.theta + (xp - params.theta) * decay +
                vol * std::sqrt(xp) * sqrt_dt * normals.next();
        }
        out[p] = std::max(x, 0.0);
    }
    return out;
}

}  // namespace lrsq
