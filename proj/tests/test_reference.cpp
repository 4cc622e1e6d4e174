#include <doctest.h>

#include <cmath>
#include <vector>

#include "fockcis/reference.hpp"
#include "oracles.hpp"

using namespace fockcis;

namespace {

ReferenceSequence ref_phi2_p2(int n_max) {
    return build_reference(RadialWeight::alpha_model(2.0),
                           SpaceParams::finite(2.0), n_max);
}

}  // namespace

TEST_CASE("build_reference closed forms") {
    ReferenceSequence r = ref_phi2_p2(4);
    std::vector<double> expect{0.5, 1.0, 1.5, 2.0, 2.5};
    REQUIRE(r.size() == 5);
    for (int n = 0; n < 5; ++n)
        CHECK(r.y[n] == doctest::Approx(expect[n]).epsilon(1e-12));

    ReferenceSequence r15 = build_reference(RadialWeight::alpha_model(1.5),
                                            SpaceParams::finite(2.0), 1);
    CHECK(r15.y[0] == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(r15.y[1] == doctest::Approx(16.0 / 9.0).epsilon(1e-12));

    // psi'(y_n) = p n + 2 with psi' = 2 p t gives y_n = n/2 + 1/p.
    ReferenceSequence r4 = build_reference(RadialWeight::alpha_model(2.0),
                                           SpaceParams::finite(4.0), 0);
    CHECK(r4.y[0] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("reference slots satisfy psi'(y_n) = pn+2 to 1e-12 relative") {
    for (double alpha : {1.5, 2.0}) {
        for (double p : {1.0, 2.0, 4.0}) {
            auto w = RadialWeight::alpha_model(alpha);
            SpaceParams sp = SpaceParams::finite(p);
            ReferenceSequence r = build_reference(w, sp, 100);
            for (std::size_t n = 0; n < r.size(); ++n) {
                double target = p * n + 2.0;
                double got = psi_calculus(w, sp, r.y[n]).psi1;
                CHECK(std::fabs(got - target) <= 1e-12 * std::max(1.0, target));
            }
        }
    }
}

TEST_CASE("ell values, knots, and continuity") {
    ReferenceSequence r = ref_phi2_p2(30);
    CHECK(ell(r, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ell(r, r.y[0]) == doctest::Approx(0.0));

    for (std::size_t m = 1; m + 1 < r.size(); ++m) {
        double knot = r.y[m];
        double left = ell(r, std::nextafter(knot, 0.0));
        double right = ell(r, knot);
        CHECK(std::fabs(left - right) <= 1e-12 * std::max(1.0, std::fabs(right)));
    }
    CHECK_THROWS_AS(ell(r, r.y.back()), std::out_of_range);
    CHECK_THROWS_AS(ell(r, r.y.front() - 0.1), std::out_of_range);
}

TEST_CASE("psi - ell is minimized at the left knot of each cell") {
    auto w = RadialWeight::alpha_model(2.0);
    SpaceParams sp = SpaceParams::finite(2.0);
    ReferenceSequence r = build_reference(w, sp, 40);
    for (std::size_t m = 0; m + 1 < r.size(); m += 3) {
        double at_knot = psi_calculus(w, sp, r.y[m]).psi - ell(r, r.y[m]);
        for (int i = 1; i <= 4; ++i) {
            double t = r.y[m] + (r.y[m + 1] - r.y[m]) * i / 5.0;
            double v = psi_calculus(w, sp, t).psi - ell(r, t);
            CHECK(v >= at_knot - 1e-10);
        }
    }
}

TEST_CASE("monomial norm quadrature matches the erf oracle") {
    auto w = RadialWeight::alpha_model(2.0);
    SpaceParams sp = SpaceParams::finite(2.0);
    for (int n : {0, 1, 4, 10, 25, 50}) {
        double expect = 0.5 * oracles::monomial_sq_norm_log_phi2_p2(n);
        LogReal got = log_monomial_norm(w, sp, n, NormMethod::quadrature);
        CHECK(std::fabs(got.log_mag - expect) <= 1e-6);
    }
    // headline example: log ||z^4||^2 ~ 14.5637
    CHECK(2.0 * log_monomial_norm(w, sp, 4, NormMethod::quadrature).log_mag ==
          doctest::Approx(14.5637).epsilon(1e-4));
}

TEST_CASE("monomial norm asymptotic form") {
    auto w = RadialWeight::alpha_model(2.0);
    SpaceParams sp = SpaceParams::finite(2.0);
    // n=4: (1/2)[ -log(4)/2 + 10*2.5 - 12.5 ] = (12.5 - log 2)/2
    LogReal a = log_monomial_norm(w, sp, 4, NormMethod::asymptotic);
    CHECK(a.log_mag ==
          doctest::Approx(0.5 * (12.5 - std::log(2.0))).epsilon(1e-12));
}

TEST_CASE("quadrature minus asymptotic stabilizes to the Laplace constant") {
    auto w = RadialWeight::alpha_model(2.0);
    SpaceParams sp = SpaceParams::finite(2.0);
    // for p=2 the constant is (3/2) log(2 pi) / 2 = log(2 pi sqrt(pi/2) * 2)/2
    double expect = 0.5 * std::log(2.0 * kPi * std::sqrt(kPi / 2.0) * 2.0);
    for (int n = 10; n <= 50; n += 8) {
        double q = log_monomial_norm(w, sp, n, NormMethod::quadrature).log_mag;
        double a = log_monomial_norm(w, sp, n, NormMethod::asymptotic).log_mag;
        CHECK(std::fabs((q - a) - expect) <= 0.02);
    }
}

TEST_CASE("evaluation norms: theorem vs series within log 10") {
    SpaceParams sp = SpaceParams::finite(2.0);
    for (double alpha : {1.5, 2.0}) {
        auto w = RadialWeight::alpha_model(alpha);
        for (int i = 0; i < 12; ++i) {
            double t = 0.5 * std::pow(20.0, i / 11.0);  // log-spaced in [0.5, 10]
            LogPoint z{t, 0.3};
            double th =
                log_evaluation_norm(w, sp, z, EvalNormMethod::theorem).log_mag;
            double se =
                log_evaluation_norm(w, sp, z, EvalNormMethod::series).log_mag;
            CHECK(std::fabs(th - se) <= std::log(10.0));
        }
    }
}

TEST_CASE("monomial_lower never exceeds the series norm") {
    auto w = RadialWeight::alpha_model(2.0);
    SpaceParams sp = SpaceParams::finite(2.0);
    oracles::Rng rng(17);
    for (int it = 0; it < 10; ++it) {
        LogPoint z{rng.uniform(0.5, 9.0), rng.uniform(-3.0, 3.0)};
        double lo = log_evaluation_norm(w, sp, z, EvalNormMethod::monomial_lower)
                        .log_mag;
        double se =
            log_evaluation_norm(w, sp, z, EvalNormMethod::series).log_mag;
        CHECK(lo <= se + 1e-10);
    }
}

TEST_CASE("theorem method at an exact knot uses the left-closed bracket") {
    auto w = RadialWeight::alpha_model(2.0);
    SpaceParams sp = SpaceParams::finite(2.0);
    ReferenceSequence r = ref_phi2_p2(8);
    int n = 3;
    double yn = r.y[n], yn1 = r.y[n + 1];
    PsiDerivatives dn = psi_calculus(w, sp, yn);
    PsiDerivatives dn1 = psi_calculus(w, sp, yn1);
    double expected =
        (0.5 * std::log(dn.psi2) + dn.psi - 2.0 * yn) / 2.0 +
        0.5 * std::log1p(std::exp((2.0 * (n + 1) + 2.0) * (yn - yn1) +
                                  dn1.psi - dn.psi));
    double got = log_evaluation_norm(w, sp, LogPoint{yn, 0.0},
                                     EvalNormMethod::theorem)
                     .log_mag;
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("series handles the origin") {
    auto w = RadialWeight::alpha_model(2.0);
    SpaceParams sp = SpaceParams::finite(2.0);
    double l0 = log_monomial_norm(w, sp, 0, NormMethod::quadrature).log_mag;
    double got = log_evaluation_norm(w, sp, LogPoint::origin(),
                                     EvalNormMethod::series)
                     .log_mag;
    CHECK(got == doctest::Approx(-l0).epsilon(1e-12));
    CHECK_THROWS_AS(log_evaluation_norm(w, sp, LogPoint::origin(),
                                        EvalNormMethod::theorem),
                    std::invalid_argument);
}

TEST_CASE("partial_sum_y exact vs asymptotic") {
    auto w = RadialWeight::alpha_model(2.0);
    SpaceParams sp = SpaceParams::finite(2.0);
    ReferenceSequence r = build_reference(w, sp, 200);
    auto [exact4, asym4] = partial_sum_y(w, sp, r, 4);
    CHECK(exact4 == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(asym4 == doctest::Approx(7.5).epsilon(1e-12));
    for (std::size_t m = 1; m <= 200; m += 13) {
        auto [e, a] = partial_sum_y(w, sp, r, m);
        CHECK(std::fabs(e - a) <= 1.0);
    }
}

TEST_CASE("Lemma-style integral and sum comparisons stay within C = 20") {
    const double C = 20.0;
    for (double alpha : {1.5, 2.0}) {
        for (double p : {1.0, 2.0, 4.0}) {
            auto w = RadialWeight::alpha_model(alpha);
            SpaceParams sp = SpaceParams::finite(p);
            ReferenceSequence r = build_reference(w, sp, 160);
            auto lell = [&](double t) { return ell(r, t); };
            auto psi = [&](double t) { return psi_calculus(w, sp, t).psi; };
            auto psi2 = [&](double t) { return psi_calculus(w, sp, t).psi2; };
            double t_hi = r.y.back() - 1e-9;

            // (1) integral over [y_0, inf) of e^{(ell - psi)/p} is finite
            auto g1 = [&](double t) {
                if (t < r.y.front() || t >= t_hi) return kNegInf;
                return (lell(t) - psi(t)) / p;
            };
            LogReal total = laplace_quadrature(g1, r.y.front(), 0.5);
            CHECK(std::isfinite(total.log_mag));

            for (int n : {10, 40, 100}) {
                double yn = r.y[n];
                double delta = 0.1;
                double lhs2, rhs2, lhs3, rhs3, lhs4, rhs4, lhs5, rhs5;

                // (2) tail integral from y_n - delta
                auto g2 = [&](double t) {
                    if (t < yn - delta || t >= t_hi) return kNegInf;
                    return (lell(t) - psi(t)) / p;
                };
                lhs2 = laplace_quadrature(g2, yn - delta,
                                          1.0 / std::sqrt(psi2(yn)))
                           .log_mag;
                rhs2 = (lell(yn) - psi(yn)) / p - 0.5 * std::log(psi2(yn));
                CHECK(std::fabs(lhs2 - rhs2) <= std::log(C));

                // (3) head integral with the e^{pt} factor
                auto g3 = [&](double t) {
                    if (t < r.y.front() || t > yn - delta) return kNegInf;
                    return (lell(t) - psi(t)) / p + t;
                };
                lhs3 = laplace_quadrature(g3, yn - delta,
                                          1.0 / std::sqrt(psi2(yn)))
                           .log_mag;
                rhs3 = (lell(yn) - psi(yn)) / p + yn - 0.5 * std::log(psi2(yn));
                CHECK(std::fabs(lhs3 - rhs3) <= std::log(C));

                // (4) head sum of e^{(psi - ell)/p} (psi'')^{1/2}
                LogSumAccumulator s4;
                for (int k = 0; k <= n; ++k)
                    s4.add(LogReal::from_log((psi(r.y[k]) - lell(r.y[k])) / p +
                                             0.5 * std::log(psi2(r.y[k]))));
                lhs4 = s4.total().log_mag;
                rhs4 = (psi(yn) - lell(yn)) / p + 0.5 * std::log(psi2(yn));
                CHECK(std::fabs(lhs4 - rhs4) <= std::log(C));

                // (5) tail sum of e^{(psi - ell - p y)/p} (psi'')^{1/2}
                LogSumAccumulator s5;
                for (std::size_t k = n; k < r.size(); ++k)
                    s5.add(LogReal::from_log(
                        (psi(r.y[k]) - lell(r.y[k])) / p - r.y[k] +
                        0.5 * std::log(psi2(r.y[k]))));
                lhs5 = s5.total().log_mag;
                rhs5 = (psi(yn) - lell(yn)) / p - yn + 0.5 * std::log(psi2(yn));
                CHECK(std::fabs(lhs5 - rhs5) <= std::log(C));
            }
        }
    }
}
