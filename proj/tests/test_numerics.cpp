#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "fockcis/numerics.hpp"
#include "oracles.hpp"

using namespace fockcis;

TEST_CASE("log_sum_exp small exact cases") {
    LogReal r = log_sum_exp({LogReal::from_log(std::log(2.0)),
                             LogReal::from_log(std::log(3.0))});
    CHECK(r.sign == 1);
    CHECK(r.log_mag == doctest::Approx(std::log(5.0)).epsilon(1e-14));

    LogReal c = log_sum_exp(
        {LogReal::from_log(0.0, +1), LogReal::from_log(0.0, -1)});
    CHECK(c.sign == 0);
    CHECK(c.cancelled);

    CHECK(log_sum_exp({}).sign == 0);
    CHECK_FALSE(log_sum_exp({}).cancelled);
}

TEST_CASE("log_sum_exp huge magnitudes never overflow") {
    // oracle: log(n e^a) = a + log n
    std::vector<LogReal> terms(1000, LogReal::from_log(500.0, +1));
    LogReal r = log_sum_exp(terms);
    CHECK(r.sign == 1);
    CHECK(r.log_mag ==
          doctest::Approx(500.0 + std::log(1000.0)).epsilon(1e-13));
}

TEST_CASE("log_sum_exp permutation invariance") {
    oracles::Rng rng(42);
    std::vector<LogReal> terms;
    for (int i = 0; i < 60; ++i)
        terms.push_back(LogReal::from_log(rng.uniform(-40.0, 40.0),
                                          rng.uniform(0, 1) < 0.5 ? -1 : +1));
    LogReal a = log_sum_exp(terms);
    std::vector<LogReal> rev(terms.rbegin(), terms.rend());
    LogReal b = log_sum_exp(rev);
    if (a.sign == 0) {
        CHECK(b.sign == 0);
    } else {
        CHECK(a.sign == b.sign);
        CHECK(std::fabs(a.log_mag - b.log_mag) <=
              1e-13 * std::max(1.0, std::fabs(a.log_mag)));
    }
}

TEST_CASE("complex_log_sum exact cases") {
    LogComplex zero = complex_log_sum(
        {LogComplex::from_log(0.0, 0.0), LogComplex::from_log(0.0, kPi)});
    CHECK(zero.is_zero());

    LogComplex onepi = complex_log_sum(
        {LogComplex::from_log(0.0, 0.0), LogComplex::from_log(0.0, kPi / 2)});
    CHECK(onepi.log_mag == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
    CHECK(onepi.phase == doctest::Approx(kPi / 4).epsilon(1e-14));
}

TEST_CASE("complex_log_sum at scale e^300") {
    // oracle: rescale by e^300 and sum directly: 1 + e^{i pi/3}
    double re = 1.0 + std::cos(kPi / 3.0);
    double im = std::sin(kPi / 3.0);
    LogComplex r = complex_log_sum({LogComplex::from_log(300.0, 0.0),
                                    LogComplex::from_log(300.0, kPi / 3.0)});
    CHECK(r.log_mag ==
          doctest::Approx(300.0 + std::log(std::hypot(re, im))).epsilon(1e-13));
    CHECK(r.phase == doctest::Approx(kPi / 6.0).epsilon(1e-12));
}

TEST_CASE("laplace_quadrature closed forms") {
    auto gauss = [](double t) { return -t * t; };
    LogReal r = laplace_quadrature(gauss, 0.0, 1.0);
    CHECK(std::fabs(r.log_mag - 0.5 * std::log(kPi)) <= 1e-8);

    // restricted-domain case, oracle = e^{12.5} integral_{-2.5}^inf e^{-2u^2} du
    auto cut = [](double t) {
        if (t < 0.0) return kNegInf;
        return 10.0 * t - 2.0 * t * t;
    };
    double expected = 12.5 + oracles::gauss_tail_log(-2.5, 2.0);
    LogReal rc = laplace_quadrature(cut, 2.5, 0.5);
    CHECK(std::fabs(rc.log_mag - expected) <= 1e-8);

    auto twoside = [](double t) { return -std::fabs(t); };
    LogReal rt = laplace_quadrature(twoside, 0.0, 1.0);
    CHECK(std::fabs(rt.log_mag - std::log(2.0)) <= 1e-8);
}

TEST_CASE("laplace_quadrature shift invariance") {
    auto g = [](double t) { return -t * t; };
    for (double c : {123.456, -800.0, 2500.0}) {
        auto gs = [&](double t) { return g(t) + c; };
        LogReal a = laplace_quadrature(g, 0.0, 1.0);
        LogReal b = laplace_quadrature(gs, 0.0, 1.0);
        CHECK(std::fabs((b.log_mag - c) - a.log_mag) <= 1e-12);
    }
}

TEST_CASE("laplace_quadrature non-convergence carries a partial value") {
    auto grow = [](double t) { return t; };  // diverges
    CHECK_THROWS_AS(laplace_quadrature(grow, 0.0, 1.0), QuadratureError);
}

TEST_CASE("monotone_root examples") {
    CHECK(monotone_root([](double t) { return 4.0 * t; }, 4.0, 0.0, 10.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(monotone_root([](double t) { return 3.0 * std::sqrt(t); }, 4.0, 0.0,
                        10.0) == doctest::Approx(16.0 / 9.0).epsilon(1e-12));
    CHECK(monotone_root([](double t) { return t; }, 0.0, 0.0, 0.0) == 0.0);
}

TEST_CASE("monotone_root bracket violations name the endpoint") {
    auto f = [](double t) { return 4.0 * t; };
    CHECK_THROWS_WITH_AS(monotone_root(f, -1.0, 0.0, 10.0),
                         doctest::Contains("lower endpoint"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(monotone_root(f, 100.0, 0.0, 10.0),
                         doctest::Contains("upper endpoint"),
                         std::invalid_argument);
}

TEST_CASE("monotone_root round trip on random increasing polynomials") {
    oracles::Rng rng(7);
    for (int it = 0; it < 50; ++it) {
        double c1 = rng.uniform(0.1, 3.0);
        double c3 = rng.uniform(0.0, 2.0);
        auto f = [&](double t) { return c1 * t + c3 * t * t * t; };
        double t0 = rng.uniform(0.0, 5.0);
        double target = f(t0);
        double r = monotone_root(f, target, 0.0, 6.0);
        CHECK(std::fabs(f(r) - target) <= 1e-12 * std::max(1.0, std::fabs(target)));
        CHECK(std::fabs(r - t0) <= 1e-6);
    }
}

TEST_CASE("LogReal value overflow guard") {
    CHECK_THROWS_AS(LogReal::from_log(800.0).value(), std::overflow_error);
    CHECK(LogReal::from_log(std::log(2.0), -1).value() ==
          doctest::Approx(-2.0));
    CHECK(LogReal::zero().value() == 0.0);
}
