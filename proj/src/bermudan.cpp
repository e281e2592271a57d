#include "lrsq/bermudan.hpp"

#include <algorithm>
#include <cmath>

#include "lrsq/errors.hpp"

namespace lrsq {

LatticeSpec LatticeSpec::make(const ModelParams& params, const SwapSpec& spec,
                              std::vector<double> exercise_dates, int n_x, double x_max) {
    if (exercise_dates.size() < 2) throw ConfigError("lattice needs at least two exercise dates");
    for (std::size_t i = 0; i + 1 < exercise_dates.size(); ++i)
        if (!(exercise_dates[i] < exercise_dates[i + 1]))
            throw ConfigError("exercise dates must be strictly increasing");
    if (std::abs(exercise_dates.front() - spec.t0) > 1e-12 ||
        std::abs(exercise_dates.back() - spec.maturity()) > 1e-12)
        throw ConfigError("exercise dates must start at T0 and end at Tn");
    exercise_dates.front() = spec.t0;
    exercise_dates.back() = spec.maturity();
    if (n_x < 8) throw ConfigError("lattice needs at least 8 state nodes");

    const double quantile_proxy = params.theta + 10.0 * (params.theta + params.x0);
    if (x_max <= 0.0) x_max = quantile_proxy;
    if (x_max < quantile_proxy)
        throw ConfigError("lattice truncation below the state quantile proxy");
    LatticeSpec out;
    out.exercise_dates = std::move(exercise_dates);
    out.x_max = x_max;
    out.n_x = n_x;
    return out;
}

std::vector<double> LatticeSpec::payment_dates(const SwapSpec& spec) {
    std::vector<double> dates;
    for (int i = 0; i <= spec.n; ++i) dates.push_back(spec.payment_date(i));
    return dates;
}

std::vector<double> LatticeSpec::periodic_dates(const SwapSpec& spec, double step) {
    if (!(step > 0.0)) throw ConfigError("exercise step must be positive");
    std::vector<double> dates;
    double t = spec.t0;
    while (t < spec.maturity() - 1e-9) {
        dates.push_back(t);
        t += step;
    }
    dates.push_back(spec.maturity());
    return dates;
}

std::vector<double> LatticeSpec::nodes() const {
    std::vector<double> xs(n_x + 1);
    for (int i = 0; i <= n_x; ++i) xs[i] = x_max * i / static_cast<double>(n_x);
    return xs;
}

TransitionMatrix build_transition_matrix(const ModelParams& params, const LatticeSpec& lattice,
                                         const Distribution& dist) {
    const std::vector<double> xs = lattice.nodes();
    const int n = static_cast<int>(xs.size());
    const double h = lattice.h_x();

    TransitionMatrix tm;
    tm.t_from = dist.t();
    tm.t_to = dist.u();
    tm.n = n;
    tm.p.assign(static_cast<std::size_t>(n) * n, 0.0);

    for (int row = 0; row < n; ++row) {
        double* pr = tm.p.data() + static_cast<std::size_t>(row) * n;
        const double x_from = std::max(xs[row], 1e-12);
        pr[0] = 0.0;
        for (int i = 1; i < n; ++i) {
            double v = dist.pdf(xs[i], x_from);
            if (!std::isfinite(v)) v = 0.0;
            pr[i] = v;
        }
        // Near the origin the density carries structure below the node
        // spacing (a power-law head on the scale of the variance load), which
        // pointwise sampling cannot represent. Rebuild the entries across
        // that head so each trapezoid cell holds the exact cell mass; beyond
        // it the sampled trapezoid is spectrally accurate on the smooth bump.
        const int head_cells = std::clamp(
            static_cast<int>(std::ceil(2.0 * dist.context().lambda_end() / h)) + 1, 1, n / 4);
        const double cdf_first = dist.lower_tail_prob(xs[1], x_from);
        if (cdf_first > 1e-6) {  // the first node hides real mass
            pr[0] = std::max(0.0, 2.0 * cdf_first / h - pr[1]);
            double cdf_lo = cdf_first;
            for (int i = 1; i < head_cells; ++i) {
                const double cdf_hi = dist.lower_tail_prob(xs[i + 1], x_from);
                const double cell = std::max(0.0, cdf_hi - cdf_lo);
                pr[i + 1] = std::max(0.0, 2.0 * cell / h - pr[i]);
                cdf_lo = cdf_hi;
            }
        }
        double mass = 0.0;
        for (int i = 0; i < n; ++i) {
            const double weight = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            mass += weight * pr[i] * h;
        }
        if (mass >= 0.2) {
            // Interior rows must conserve mass; the top band is an absorbing
            // buffer that always leaks upward, and rows near the origin hold
            // kernels narrower than the spacing. Both are renormalized with
            // the defect tracked only on the interior band.
            const bool interior = x_from >= 0.5 * params.theta && x_from <= 0.6 * lattice.x_max;
            if (interior && dist.tail_prob(lattice.x_max, x_from) > 1e-2)
                throw TruncationError(
                    "transition matrix: row mass escaping the truncation level; "
                    "enlarge x_max");
            for (int i = 0; i < n; ++i) pr[i] /= mass;
            if (interior)
                tm.max_row_defect = std::max(tm.max_row_defect, std::abs(1.0 - mass));
            else if (x_from < 0.5 * params.theta)
                tm.max_low_row_defect = std::max(tm.max_low_row_defect, std::abs(1.0 - mass));
        } else {
            // Kernel narrower than the grid spacing: place the mass at the
            // node nearest the conditional mean.
            const double m = dist.mean(x_from);
            int i_star = static_cast<int>(std::lround(m / h));
            i_star = std::clamp(i_star, 0, n - 1);
            std::fill(pr, pr + n, 0.0);
            const double weight = (i_star == 0 || i_star == n - 1) ? 0.5 : 1.0;
            pr[i_star] = 1.0 / (weight * h);
            tm.degenerate_rows += 1;
        }
    }
    return tm;
}

namespace {

double lattice_dot(const TransitionMatrix& tm, int row, const std::vector<double>& v, double h) {
    const double* pr = tm.p.data() + static_cast<std::size_t>(row) * tm.n;
    double acc = 0.0;
    for (int i = 0; i < tm.n; ++i) acc += pr[i] * v[i];
    // trapezoid end weights
    acc -= 0.5 * pr[0] * v[0];
    acc -= 0.5 * pr[tm.n - 1] * v[tm.n - 1];
    return acc * h;
}

}  // namespace

TransitionSet transition_matrices(const ModelParams& params, const LatticeSpec& lattice,
                                  const QuadConfig& cfg) {
    TransitionSet set;
    const auto& dates = lattice.exercise_dates;
    const std::size_t m = dates.size() - 1;
    set.step_index.assign(m, -1);

    const bool const_sigma =
        params.sigma.is_constant_on(dates.front(), dates.back() - 1e-12);
    for (std::size_t j = 0; j < m; ++j) {
        const double dt = dates[j + 1] - dates[j];
        int found = -1;
        if (const_sigma) {
            for (std::size_t i = 0; i < set.unique.size(); ++i) {
                if (std::abs((set.unique[i].t_to - set.unique[i].t_from) - dt) < 1e-12) {
                    found = static_cast<int>(i);
                    break;
                }
            }
        }
        if (found < 0) {
            Distribution dist = Distribution::make(params, dates[j], dates[j + 1], cfg);
            set.unique.push_back(build_transition_matrix(params, lattice, dist));
            found = static_cast<int>(set.unique.size()) - 1;
        }
        set.step_index[j] = found;
    }
    return set;
}

BermudanGrid bermudan_value(const ModelParams& params, const SwapSpec& spec,
                            const LatticeSpec& lattice, const TransitionSet& matrices) {
    if (!strike_admissible(params, spec.strike, spec.side))
        throw ConfigError("bermudan_value: strike outside the admissible range");
    PayoffTable table = PayoffTable::build(params, spec);
    const std::vector<double> xs = lattice.nodes();
    const int n = static_cast<int>(xs.size());
    const double h = lattice.h_x();
    const auto& dates = lattice.exercise_dates;
    const bool payer = spec.side == Side::payer;

    std::vector<double> v(n, 0.0);  // V at t_{j+1}, starts at V(Tn, .) = 0
    std::vector<double> cont(n, 0.0);
    for (std::size_t j = dates.size() - 1; j-- > 0;) {
        const TransitionMatrix& tm = matrices.step(j);
        const double t = dates[j];
        const double a1 = table.g1(t), a2 = table.g2(t);
        std::vector<double> next(n);
        for (int row = 0; row < n; ++row) {
            cont[row] = lattice_dot(tm, row, v, h);
            const double exercise = a1 * xs[row] + a2;
            next[row] = payer ? std::max(exercise, cont[row]) : std::min(exercise, cont[row]);
        }
        v.swap(next);
    }
    BermudanGrid grid;
    grid.nodes = xs;
    grid.value = std::move(v);
    grid.continuation = std::move(cont);
    return grid;
}

namespace {

// Piecewise-linear composite max(G, chord of continuation) with the kink
// points inserted, so the pre-expiry expectation integrates it exactly.
void composite_nodes(const PayoffTable& table, const SwapSpec& spec, bool payer,
                     const BermudanGrid& grid, std::vector<double>& nodes,
                     std::vector<double>& values, double& tail_slope) {
    const double t0 = spec.t0;
    const double a1 = table.g1(t0), a2 = table.g2(t0);
    auto pick = [payer](double e, double c) { return payer ? std::max(e, c) : std::min(e, c); };

    nodes.clear();
    values.clear();
    const auto& xs = grid.nodes;
    const auto& cont = grid.continuation;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double e0 = a1 * xs[i] + a2, e1 = a1 * xs[i + 1] + a2;
        nodes.push_back(xs[i]);
        values.push_back(pick(e0, cont[i]));
        // crossing of the exercise line with the continuation chord
        const double d0 = e0 - cont[i], d1 = e1 - cont[i + 1];
        if ((d0 < 0.0) != (d1 < 0.0)) {
            const double s = d0 / (d0 - d1);
            const double xc = xs[i] + s * (xs[i + 1] - xs[i]);
            const double vc = cont[i] + s * (cont[i + 1] - cont[i]);
            if (xc > xs[i] + 1e-14 && xc < xs[i + 1] - 1e-14) {
                nodes.push_back(xc);
                values.push_back(vc);  // lines meet: chord value equals exercise value
            }
        }
    }
    nodes.push_back(xs.back());
    values.push_back(pick(a1 * xs.back() + a2, cont.back()));
    tail_slope = payer ? a1 : 0.0;
}

}  // namespace

double bermudan_price(const ModelParams& params, const SwapSpec& spec,
                      const LatticeSpec& lattice, const TransitionSet& matrices,
                      const BermudanGrid& grid, double t, double x, const QuadConfig& cfg) {
    if (!(x > 0.0)) throw DomainError("bermudan_price: factor must be positive");
    if (t > spec.t0 + 1e-12)
        throw DomainError("bermudan_price: valuation only at or before the first exercise date");
    const double sign = (spec.side == Side::payer) ? 1.0 : -1.0;
    const double zeta = params.discount(t) * (1.0 + x);

    if (t >= spec.t0 - 1e-12) {
        // Interpolate the induction grid at the requested state.
        const auto& xs = grid.nodes;
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        if (it == xs.begin() || it == xs.end()) {
            // beyond the lattice: exercise value dominates
            PayoffTable table = PayoffTable::build(params, spec);
            return sign * (table.g1(spec.t0) * x + table.g2(spec.t0)) / zeta;
        }
        const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
        const double s = (x - xs[i]) / (xs[i + 1] - xs[i]);
        const double v = (1.0 - s) * grid.value[i] + s * grid.value[i + 1];
        return sign * v / zeta;
    }

    PayoffTable table = PayoffTable::build(params, spec);
    std::vector<double> nodes, values;
    double tail_slope = 0.0;
    composite_nodes(table, spec, spec.side == Side::payer, grid, nodes, values, tail_slope);
    Distribution dist = Distribution::make(params, t, spec.t0, cfg);
    return sign * expect_piecewise_linear(dist, x, nodes, values, tail_slope) / zeta;
}

double bermudan_price(const ModelParams& params, const SwapSpec& spec,
                      const LatticeSpec& lattice, double t, double x, const QuadConfig& cfg) {
    TransitionSet matrices = transition_matrices(params, lattice, cfg);
    BermudanGrid grid = bermudan_value(params, spec, lattice, matrices);
    return bermudan_price(params, spec, lattice, matrices, grid, t, x, cfg);
}

double european_price(const ModelParams& params, const SwapSpec& spec, double t, double x,
                      const QuadConfig& cfg) {
    if (t > spec.t0 + 1e-12) throw DomainError("european_price: valuation after expiry");
    if (!(x > 0.0)) throw DomainError("european_price: factor must be positive");
    PayoffTable table = PayoffTable::build(params, spec);
    const double t0 = spec.t0;
    const double a1 = table.g1(t0), a2 = table.g2(t0);
    const double zeta = params.discount(t) * (1.0 + x);
    Distribution dist = Distribution::make(params, t, t0, cfg);

    const double kink = -a2 / a1;  // zero of the affine payoff
    double call;  // E[(G(T0, X))^+] with G affine of positive slope
    if (kink <= 0.0) {
        call = a1 * dist.mean(x) + a2;
    } else {
        call = a1 * dist.tail_expectation(kink, x);
    }
    if (spec.side == Side::payer) return std::max(call, 0.0) / zeta;
    const double forward = a1 * dist.mean(x) + a2;
    return std::max(call - forward, 0.0) / zeta;
}

}  // namespace lrsq
