#include "lrsq/simulate.hpp"

#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace lrsq;

TEST_SUITE_BEGIN("simulate");

TEST_CASE("same seed reproduces the ensemble bit for bit") {
    auto p = fixtures::params();
    auto a = simulate_paths(p, 0.0, 1.0, 500, 50, 42u);
    auto b = simulate_paths(p, 0.0, 1.0, 500, 50, 42u);
    CHECK(a.data == b.data);
    auto c = simulate_paths(p, 0.0, 1.0, 500, 50, 43u);
    CHECK(a.data != c.data);

    // terminal-only run agrees with the stored ensemble
    auto term = simulate_terminal(p, 0.0, 1.0, 500, 50, 42u, p.x0);
    for (std::size_t i = 0; i < 500; ++i) CHECK(term[i] == a.value(i, 50));
}

TEST_CASE("paths stay nonnegative") {
    auto p = fixtures::params(0.9);
    auto ens = simulate_paths(p, 0.0, 3.0, 2000, 150, 7u, 0.05);
    for (double v : ens.data) CHECK(v >= 0.0);
}

TEST_CASE("vanishing sigma reproduces the mean-reversion flow exactly") {
    auto p = ModelParams(0.03, 2.55, PiecewiseConstantCurve::flat(0.0765),
                         PiecewiseConstantCurve::flat(0.0), 0.762);
    auto ens = simulate_paths(p, 0.0, 2.0, 3, 64, 1u);
    for (std::size_t j = 0; j <= 64; ++j) {
        const double tau = ens.time(j);
        const double exact = p.theta + std::exp(-p.kappa * tau) * (p.x0 - p.theta);
        CHECK(ens.value(0, j) == doctest::Approx(exact).epsilon(1e-14));
    }
}

TEST_CASE("terminal sample mean matches the conditional mean within 3 SE") {
    auto p = fixtures::params(0.5);
    const double horizon = 1.0;
    auto xs = simulate_terminal(p, 0.0, horizon, 200000, 300, 314159u, p.x0);
    auto ms = oracles::mean_se(xs.begin(), xs.end());
    const double target = conditional_mean(p, 0.0, horizon, p.x0);
    CHECK(std::abs(ms.mean - target) < 3.0 * ms.se);

    // piecewise sigma as well
    auto pp = fixtures::params_piecewise_sigma();
    auto ys = simulate_terminal(pp, 0.0, 2.5, 200000, 400, 2718u, pp.x0);
    auto ms2 = oracles::mean_se(ys.begin(), ys.end());
    CHECK(std::abs(ms2.mean - conditional_mean(pp, 0.0, 2.5, pp.x0)) < 3.0 * ms2.se);
}

TEST_CASE("terminal variance matches the closed form within 3 SE") {
    auto p = fixtures::params(0.5);
    auto xs = simulate_terminal(p, 0.0, 1.5, 200000, 300, 99u, p.x0);
    double m = 0.0, v = 0.0, k4 = 0.0;
    for (double x : xs) m += x;
    m /= xs.size();
    for (double x : xs) {
        v += (x - m) * (x - m);
        k4 += std::pow(x - m, 4);
    }
    v /= xs.size();
    k4 /= xs.size();
    const double se_var = std::sqrt((k4 - v * v) / xs.size());
    CHECK(std::abs(v - conditional_variance(p, 0.0, 1.5, p.x0)) < 3.0 * se_var + 2e-4);
}

TEST_SUITE_END();
