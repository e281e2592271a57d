#include "lrsq/volterra.hpp"

#include <algorithm>
#include <cmath>

#include "lrsq/errors.hpp"
#include "lrsq/root.hpp"

namespace lrsq {

namespace {

// Benefit coefficients for the quadrature interval (t_l, u]: the drift mass
// on the interval belongs to the payment segment containing its interior, so
// intervals ending exactly at a payment date take the left limit there.
KernelSlice make_interval_slice(const PayoffTable& table, const ModelParams& params, double t,
                                double lo, double u, double z, const QuadConfig& cfg) {
    const int seg = table.spec().segment(0.5 * (lo + u));
    return KernelSlice(table.h1_on_segment(seg, u), table.h2_on_segment(seg, u), params, t, u, z,
                       cfg);
}

// Merge the payment dates into a uniform grid, snapping near-coincident nodes.
std::vector<double> merge_grid(const SwapSpec& spec, int n_steps) {
    const double t0 = spec.t0;
    const double tn = spec.maturity();
    const double h = (tn - t0) / n_steps;
    std::vector<double> grid;
    grid.reserve(n_steps + spec.n + 1);
    for (int k = 0; k <= n_steps; ++k) grid.push_back(t0 + k * h);
    for (int m = 1; m < spec.n; ++m) grid.push_back(spec.payment_date(m));
    std::sort(grid.begin(), grid.end());
    std::vector<double> out;
    out.push_back(grid.front());
    for (double t : grid)
        if (t - out.back() > 1e-9 * (tn - t0)) out.push_back(t);
    out.back() = tn;
    // snap nodes that fall within roundoff of a payment date
    for (double& t : out)
        for (int m = 1; m <= spec.n; ++m)
            if (std::abs(t - spec.payment_date(m)) < 1e-12 * tn) t = spec.payment_date(m);
    return out;
}

struct StepEquation {
    const std::vector<KernelSlice>* slices;  // slices for l = k..N-1
    const std::vector<double>* widths;       // h_l including the first interval
    const PayoffTable* table;
    double t;
    Side side;

    double residual(double y, long& evals) const {
        double premium = 0.0;
        for (std::size_t i = 0; i < slices->size(); ++i) {
            const auto& s = (*slices)[i];
            premium += (*widths)[i] * (side == Side::payer ? s.L(y) : s.Ltilde(y));
        }
        evals += 1;
        return table->gain(t, y) - premium;
    }
};

struct RootResult {
    double y;
    double residual;
    long evals = 0;
};

RootResult solve_bracketed(const StepEquation& eq, double a, double fa, double b, double fb,
                           double y_tol) {
    RootResult out{0.5 * (a + b), 0.0, 0};
    auto fn = [&](double y) {
        const double r = eq.residual(y, out.evals);
        out.residual = r;
        return r;
    };
    out.y = brent_root(fn, a, b, fa, fb, y_tol, 120);
    return out;
}

}  // namespace

std::vector<double> solver_grid(const SwapSpec& spec, int n_steps) {
    if (n_steps < 2 * spec.n)
        throw ConfigError("solver grid needs at least two steps per payment period");
    return merge_grid(spec, n_steps);
}

BoundarySolution solve_boundary(const SolverConfig& config, const PayoffTable& table,
                                const ModelParams& params, const SwapSpec& spec, Side side) {
    if (!strike_admissible(params, spec.strike, side))
        throw ConfigError("solve_boundary: strike outside the admissible range");

    BoundarySolution bnd;
    bnd.side = side;
    bnd.grid = solver_grid(spec, config.n_steps);
    const std::size_t n = bnd.grid.size();
    bnd.values.assign(n, 0.0);
    bnd.values.back() = terminal_boundary(params, spec);

    std::vector<double> widths(n - 1);

    for (std::size_t k = n - 1; k-- > 0;) {
        const double t = bnd.grid[k];

        std::vector<KernelSlice> slices;
        slices.reserve(n - 1 - k);
        for (std::size_t l = k; l + 1 < n; ++l) {
            slices.push_back(make_interval_slice(table, params, t, bnd.grid[l],
                                                 bnd.grid[l + 1], bnd.values[l + 1],
                                                 config.quad));
            widths[l - k] = bnd.grid[l + 1] - bnd.grid[l];
        }
        std::vector<double> w(widths.begin(), widths.begin() + (n - 1 - k));
        StepEquation eq{&slices, &w, &table, t, side};

        const double zg = table.zero_g(t);
        const double zh = table.zero_h(t);
        const double warm = bnd.values[k + 1];
        double lo, hi;
        if (side == Side::payer) {
            lo = std::max({zg, zh, 0.0}) + 1e-12;
            hi = std::max(50.0 * params.theta, config.x_upper_mult * warm);
        } else {
            lo = 1e-12;
            hi = std::min(zg, zh) - 1e-12;
        }
        if (!(hi > lo))
            throw SolverFailureError("solve_boundary: empty bracket", static_cast<int>(k), 0.0,
                                     0.0);

        // Probe outward from the warm start for a sign change.
        std::vector<double> probes;
        const double w0 = std::clamp(warm, lo, hi);
        for (double f : {1.0, 0.98, 1.02, 0.93, 1.07, 0.85, 1.18, 0.7, 1.5, 0.45, 2.5, 0.15, 6.0})
            probes.push_back(std::clamp(w0 * f, lo, hi));
        probes.push_back(lo);
        probes.push_back(hi);
        std::sort(probes.begin(), probes.end());
        probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

        std::vector<double> res(probes.size());
        for (std::size_t i = 0; i < probes.size(); ++i)
            res[i] = eq.residual(probes[i], bnd.root_iterations);

        // pick the sign change nearest the warm start
        std::size_t bracket = probes.size();
        double best_dist = 1e300;
        for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
            if ((res[i] < 0.0) != (res[i + 1] < 0.0)) {
                const double dist = std::abs(0.5 * (probes[i] + probes[i + 1]) - w0);
                if (dist < best_dist) {
                    best_dist = dist;
                    bracket = i;
                }
            }
        }
        double root, match;
        if (bracket < probes.size()) {
            RootResult r = solve_bracketed(eq, probes[bracket], res[bracket],
                                           probes[bracket + 1], res[bracket + 1],
                                           config.root_tol);
            bnd.root_iterations += r.evals;
            root = r.y;
            match = r.residual;
        } else {
            // No sign change: the discrete residual plateaus near zero in the
            // stopping region. Accept the flattest probe if it matches value
            // to within the quadrature noise, otherwise report failure.
            std::size_t best = 0;
            for (std::size_t i = 1; i < probes.size(); ++i)
                if (std::abs(res[i]) < std::abs(res[best])) best = i;
            const double scale = std::abs(table.g1(t));
            if (std::abs(res[best]) > 1e-3 * scale)
                throw SolverFailureError("solve_boundary: root not bracketed",
                                         static_cast<int>(k), res.front(), res.back());
            root = probes[best];
            match = res[best];
        }
        bnd.values[k] = root;
        bnd.max_match_residual = std::max(
            bnd.max_match_residual, std::abs(match) / std::max(1e-300, std::abs(table.g1(t))));

        // Structural bounds from the continuation/stopping ordering.
        if (side == Side::payer && root < std::max({zg, zh, 0.0}) - 1e-9)
            throw SolverFailureError("solve_boundary: payer boundary below its lower bound",
                                     static_cast<int>(k), root, 0.0);
        if (side == Side::receiver && root > std::min(zg, zh) + 1e-9)
            throw SolverFailureError("solve_boundary: receiver boundary above its upper bound",
                                     static_cast<int>(k), root, 0.0);
    }
    bnd.rate_curve = exercise_boundary_swaprate(bnd, params, spec);
    return bnd;
}

std::vector<double> value_function_batch(const SolverConfig& config, const PayoffTable& table,
                                         const ModelParams& params, const SwapSpec& spec,
                                         const BoundarySolution& bnd, double t,
                                         const std::vector<double>& xs) {
    if (t < spec.t0 - 1e-12 || t > spec.maturity() + 1e-12)
        throw DomainError("value_function: t outside [T0, Tn]");
    std::vector<double> out(xs.size(), 0.0);
    if (t >= spec.maturity() - 1e-12) return out;

    std::vector<KernelSlice> slices;
    std::vector<double> widths;
    for (std::size_t l = 0; l + 1 < bnd.grid.size(); ++l) {
        if (bnd.grid[l + 1] <= t + 1e-14) continue;
        const double lo = std::max(t, bnd.grid[l]);
        slices.push_back(make_interval_slice(table, params, t, lo, bnd.grid[l + 1],
                                             bnd.values[l + 1], config.quad));
        widths.push_back(bnd.grid[l + 1] - lo);
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double v = 0.0;
        for (std::size_t l = 0; l < slices.size(); ++l)
            v += widths[l] * (bnd.side == Side::payer ? slices[l].L(xs[i])
                                                      : slices[l].Ltilde(xs[i]));
        // The exact value dominates the exercise payoff; clipping removes the
        // right-point rule's O(h) defect deep in the stopping region.
        const double g = table.gain(t, xs[i]);
        out[i] = (bnd.side == Side::payer) ? std::max(v, std::max(g, 0.0))
                                           : std::min(v, std::min(g, 0.0));
    }
    return out;
}

double value_function(const SolverConfig& config, const PayoffTable& table,
                      const ModelParams& params, const SwapSpec& spec,
                      const BoundarySolution& bnd, double t, double x) {
    return value_function_batch(config, table, params, spec, bnd, t, {x}).front();
}

namespace {

// Piecewise-linear sampling of the time-T0 value function for the
// pre-expiry expectation. The exercise region is exactly affine in the
// factor, so only the continuation region needs nodes.
void t0_value_nodes(const SolverConfig& config, const PayoffTable& table,
                    const ModelParams& params, const SwapSpec& spec,
                    const BoundarySolution& bnd, std::vector<double>& nodes,
                    std::vector<double>& values, double& tail_slope) {
    const double t0 = spec.t0;
    const double b0 = bnd.values.front();
    if (bnd.side == Side::payer) {
        const int n_cont = 400;
        const double x_lo = std::max(1e-6, b0 / n_cont);
        nodes.clear();
        for (int i = 0; i < n_cont; ++i)
            nodes.push_back(x_lo + (b0 - x_lo) * i / static_cast<double>(n_cont));
        nodes.push_back(b0);
        values = value_function_batch(config, table, params, spec, bnd, t0, nodes);
        values.back() = table.gain(t0, b0);  // value match is exact on the boundary
        tail_slope = table.g1(t0);           // stopping region: V = G, affine
    } else {
        // Affine payoff below the boundary, sampled continuation above.
        const double x_hi = params.theta + 10.0 * (params.theta + params.x0);
        const int n_near = 500, n_far = 250;
        nodes.clear();
        nodes.push_back(std::max(1e-8, 1e-4 * b0));
        nodes.push_back(b0);
        const double mid = std::min(b0 + 3.0, 0.5 * (b0 + x_hi));
        for (int i = 1; i <= n_near; ++i)
            nodes.push_back(b0 + (mid - b0) * i / static_cast<double>(n_near));
        for (int i = 1; i <= n_far; ++i)
            nodes.push_back(mid + (x_hi - mid) * i / static_cast<double>(n_far));
        std::vector<double> cont_nodes(nodes.begin() + 2, nodes.end());
        std::vector<double> cont_vals =
            value_function_batch(config, table, params, spec, bnd, t0, cont_nodes);
        values.clear();
        values.push_back(table.gain(t0, nodes[0]));
        values.push_back(table.gain(t0, b0));
        values.insert(values.end(), cont_vals.begin(), cont_vals.end());
        tail_slope = 0.0;  // receiver value fades out for large factor levels
    }
}

}  // namespace

double american_price(const SolverConfig& config, const PayoffTable& table,
                      const ModelParams& params, const SwapSpec& spec,
                      const BoundarySolution& bnd, double t, double x) {
    if (t < 0.0) throw DomainError("american_price: t < 0");
    if (!(x > 0.0)) throw DomainError("american_price: factor must be positive");
    const double sign = (spec.side == Side::payer) ? 1.0 : -1.0;
    if (bnd.side != spec.side) throw DomainError("american_price: boundary side mismatch");

    if (t >= spec.t0 - 1e-12) {
        const double v = value_function(config, table, params, spec, bnd, std::max(t, spec.t0), x);
        return sign * v / (params.discount(t) * (1.0 + x));
    }
    std::vector<double> nodes, values;
    double tail_slope = 0.0;
    t0_value_nodes(config, table, params, spec, bnd, nodes, values, tail_slope);
    Distribution dist = Distribution::make(params, t, spec.t0, config.quad);
    const double expect = expect_piecewise_linear(dist, x, nodes, values, tail_slope);
    return sign * expect / (params.discount(t) * (1.0 + x));
}

double american_price(const SolverConfig& config, const ModelParams& params,
                      const SwapSpec& spec, double t, double x) {
    PayoffTable table = PayoffTable::build(params, spec);
    BoundarySolution bnd = solve_boundary(config, table, params, spec, spec.side);
    return american_price(config, table, params, spec, bnd, t, x);
}

std::vector<double> exercise_boundary_swaprate(const BoundarySolution& bnd,
                                               const ModelParams& params,
                                               const SwapSpec& spec) {
    std::vector<double> out(bnd.grid.size());
    for (std::size_t k = 0; k < bnd.grid.size(); ++k)
        out[k] = swap_rate(params, spec, bnd.grid[k], std::max(bnd.values[k], 1e-12));
    return out;
}

}  // namespace lrsq
