#include "lrsq/model.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "lrsq/errors.hpp"

using namespace lrsq;

TEST_SUITE_BEGIN("model");

TEST_CASE("piecewise curve: closed-form integrals are additive") {
    PiecewiseConstantCurve c({0.5, 1.25, 4.0}, {0.02, -0.01, 0.07});
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    for (int i = 0; i < 200; ++i) {
        double a = u(rng), b = u(rng), m = u(rng);
        CHECK(c.integral(a, m) + c.integral(m, b) == doctest::Approx(c.integral(a, b)).epsilon(1e-14));
    }
    CHECK(c(0.0) == 0.02);
    CHECK(c(0.5) == -0.01);  // right-continuous at breakpoints
    CHECK(c(5.0) == 0.07);   // extends beyond the last breakpoint
    CHECK_THROWS_AS(PiecewiseConstantCurve({1.0, 1.0}, {0.1, 0.2}), ConfigError);
}

TEST_CASE("state price density") {
    auto p = fixtures::params();
    CHECK(state_price_density(p, 0.0, 0.762) == doctest::Approx(1.762).epsilon(1e-14));
    CHECK(state_price_density(p, 1.0, 2.55) ==
          doctest::Approx(std::exp(-0.0765) * 3.55).epsilon(1e-14));
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ut(0.0, 10.0), ux(1e-6, 30.0);
    for (int i = 0; i < 1000; ++i) CHECK(state_price_density(p, ut(rng), ux(rng)) > 0.0);
    CHECK_THROWS_AS(state_price_density(p, 1.0, 0.0), DomainError);
}

TEST_CASE("zero coupon bond prices") {
    auto p = fixtures::params();
    CHECK(zcb_price(p, 1.3, 1.3, 0.4) == 1.0);
    CHECK(std::abs(zcb_price(p, 0.0, 1.0, 0.762) - 0.9541) < 1e-4);

    // Strictly decreasing in the factor: analytic x-derivative is negative.
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> ut(0.0, 3.0), ux(1e-4, 20.0), uh(0.01, 5.0);
    for (int i = 0; i < 1000; ++i) {
        double t = ut(rng), T = t + uh(rng), x = ux(rng);
        double e = std::exp(-p.kappa * (T - t));
        double deriv = std::exp(-p.alpha.integral(t, T)) * (1.0 + p.theta) * (e - 1.0) /
                       ((1.0 + x) * (1.0 + x));
        CHECK(deriv < 0.0);
        double y = x + 0.3;
        CHECK(zcb_price(p, t, T, y) < zcb_price(p, t, T, x));
    }
    CHECK_THROWS_AS(zcb_price(p, 2.0, 1.0, 0.5), DomainError);
}

TEST_CASE("short rate and its bounds") {
    auto p = fixtures::params();
    CHECK(short_rate(p, 0.7, p.theta) == doctest::Approx(0.0765).epsilon(1e-14));
    CHECK(short_rate(p, 0.0, 1e-12) == doctest::Approx(0.0765 - 0.03 * 2.55).epsilon(1e-9));
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> ut(0.0, 10.0), ux(1e-6, 40.0);
    for (int i = 0; i < 1000; ++i) {
        double t = ut(rng), x = ux(rng);
        double r = short_rate(p, t, x);
        CHECK(r >= p.alpha(t) - p.kappa * p.theta - 1e-15);
        CHECK(r <= p.alpha(t) + p.kappa + 1e-15);
    }
}

TEST_CASE("conditional mean") {
    auto p = fixtures::params();
    CHECK(conditional_mean(p, 0.2, 5.0, p.theta) == doctest::Approx(p.theta));
    CHECK(conditional_mean(p, 0.4, 0.4, 1.23) == doctest::Approx(1.23));
    CHECK(conditional_mean(p, 0.0, 3.0, 0.762) ==
          doctest::Approx(2.55 + std::exp(-0.09) * (0.762 - 2.55)).epsilon(1e-12));
    CHECK(std::abs(conditional_mean(p, 0.0, 3.0, 0.762) - 0.9159) < 1e-4);
}

TEST_CASE("swap value") {
    auto p = fixtures::params();
    auto sw = fixtures::payer_swap();
    CHECK(swap_value(p, sw, sw.maturity(), 1.0) == 0.0);

    // Par strike makes the swap worthless.
    for (double t : {0.3, 1.0, 1.2, 2.2}) {
        double x = 0.9;
        double par = swap_rate(p, sw, t, x);
        SwapSpec at_par(sw.t0, sw.delta, sw.n, par, 1.0, Side::payer);
        CHECK(std::abs(swap_value(p, at_par, t, x)) < 1e-12);
    }

    // The benchmark factor level was chosen at the money for K = 5%.
    CHECK(std::abs(swap_value(p, sw, 0.0, 0.762)) < 1e-4);

    // Receiver side is the negative of the payer side.
    auto rec = fixtures::receiver_swap();
    CHECK(swap_value(p, rec, 0.4, 1.1) == doctest::Approx(-swap_value(p, sw, 0.4, 1.1)));

    // Notional scales linearly.
    auto big = fixtures::payer_swap(0.05, 2.5e6);
    CHECK(swap_value(p, big, 0.4, 1.1) == doctest::Approx(2.5e6 * swap_value(p, sw, 0.4, 1.1)));

    CHECK_THROWS_AS(swap_value(p, sw, 3.5, 1.0), DomainError);
}

TEST_CASE("swap value is continuous across payment dates") {
    auto p = fixtures::params();
    auto sw = fixtures::payer_swap();
    const double eps = 1e-6;
    for (int m = 1; m < sw.n; ++m) {
        double tm = sw.payment_date(m);
        double left = swap_value(p, sw, tm - eps, 0.85);
        double right = swap_value(p, sw, tm + eps, 0.85);
        CHECK(std::abs(left - right) < 1e-4 * sw.notional);
    }
    // Also across the first reset date.
    CHECK(std::abs(swap_value(p, sw, 1.0 - eps, 0.85) - swap_value(p, sw, 1.0 + eps, 0.85)) <
          1e-4);
}

TEST_CASE("swap rate") {
    auto p = fixtures::params();
    auto sw = fixtures::payer_swap();
    CHECK(std::abs(swap_rate(p, sw, 0.0, 0.762) - 0.05) < 5e-4);

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ut(0.0, 2.99), ux(1e-4, 20.0);
    for (int i = 0; i < 500; ++i) {
        double t = ut(rng), x1 = ux(rng), x2 = x1 + 0.25;
        CHECK(swap_rate(p, sw, t, x1) < swap_rate(p, sw, t, x2));
    }

    // Near expiry the par rate of the residual stub tends to the short rate,
    // and at the terminal boundary level it lands on the strike.
    CHECK(std::abs(swap_rate(p, sw, sw.maturity() - 1e-10, 0.8850) - 0.05) < 1e-3);
}

TEST_CASE("swap rate inversion") {
    auto p = fixtures::params();
    auto sw = fixtures::payer_swap();
    CHECK(std::abs(invert_swap_rate(p, sw, 0.0, 0.05) - 0.762) < 0.002);

    std::mt19937 rng(23);
    std::uniform_real_distribution<double> ut(0.0, 2.9), ux(0.01, 15.0);
    for (int i = 0; i < 100; ++i) {
        double t = ut(rng), x = ux(rng);
        double s = swap_rate(p, sw, t, x);
        double back = invert_swap_rate(p, sw, t, s);
        CHECK(back == doctest::Approx(x).epsilon(1e-8));
    }

    auto range = swap_rate_range(p, sw, 0.0);
    CHECK_THROWS_AS(invert_swap_rate(p, sw, 0.0, range.lo - 1e-3), UnattainableRateError);
    CHECK_THROWS_AS(invert_swap_rate(p, sw, 0.0, range.hi + 1e-3), UnattainableRateError);
}

TEST_CASE("strike admissibility") {
    auto p = fixtures::params();
    CHECK(strike_admissible(p, 0.05, Side::payer));
    CHECK_FALSE(strike_admissible(p, 0.11, Side::payer));
    CHECK(strike_admissible(p, 0.05, Side::receiver));
    CHECK_FALSE(strike_admissible(p, -0.01, Side::receiver));
}

TEST_CASE("conditional variance matches the flat-sigma closed form") {
    auto p = fixtures::params(0.5);
    double t = 0.2, T = 1.7, x = 0.9;
    double k = p.kappa, s2 = 0.25;
    double e1 = std::exp(-k * (T - t)), e2 = std::exp(-2.0 * k * (T - t));
    double expected = s2 * (x * (e1 - e2) / k + p.theta * (1.0 - e1) * (1.0 - e1) / (2.0 * k));
    CHECK(conditional_variance(p, t, T, x) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_SUITE_END();
