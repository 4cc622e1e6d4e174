#include <doctest.h>

#include <cmath>

#include "fockcis/weight.hpp"
#include "oracles.hpp"

using namespace fockcis;

TEST_CASE("psi_calculus closed forms for the alpha family") {
    SpaceParams p2 = SpaceParams::finite(2.0);

    auto w2 = RadialWeight::alpha_model(2.0);
    PsiDerivatives d = psi_calculus(w2, p2, 1.0);
    CHECK(d.psi == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(d.psi1 == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(d.psi2 == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(d.psi3 == doctest::Approx(0.0));

    auto w15 = RadialWeight::alpha_model(1.5);
    PsiDerivatives e = psi_calculus(w15, p2, 4.0);
    CHECK(e.psi == doctest::Approx(16.0).epsilon(1e-14));
    CHECK(e.psi1 == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(e.psi2 == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(e.psi3 == doctest::Approx(-0.09375).epsilon(1e-14));

    // log+ vanishes below r = 1
    PsiDerivatives z = psi_calculus(w2, p2, -0.3);
    CHECK(z.psi == 0.0);
    CHECK(z.psi1 == 0.0);
    CHECK(z.psi2 == 0.0);
    CHECK(z.psi3 == 0.0);
}

TEST_CASE("psi_calculus matches finite differences of psi") {
    SpaceParams p2 = SpaceParams::finite(2.0);
    oracles::Rng rng(11);
    for (double alpha : {1.5, 2.0}) {
        auto w = RadialWeight::alpha_model(alpha);
        for (int it = 0; it < 20; ++it) {
            double t = rng.uniform(1.0, 100.0);
            double h = 1e-4 * std::max(1.0, t);
            auto psi = [&](double x) { return psi_calculus(w, p2, x).psi; };
            double fd1 = (psi(t + h) - psi(t - h)) / (2 * h);
            double fd2 = (psi(t + h) - 2 * psi(t) + psi(t - h)) / (h * h);
            PsiDerivatives d = psi_calculus(w, p2, t);
            CHECK(std::fabs(fd1 - d.psi1) <=
                  1e-6 * std::max(1.0, std::fabs(d.psi1)));
            CHECK(std::fabs(fd2 - d.psi2) <=
                  1e-4 * std::max(1.0, std::fabs(d.psi2)));
        }
    }
}

TEST_CASE("eta closed forms and round trip") {
    SpaceParams p2 = SpaceParams::finite(2.0);
    auto w2 = RadialWeight::alpha_model(2.0);
    CHECK(eta(w2, p2, 4.0) == doctest::Approx(1.0).epsilon(1e-12));

    auto w15 = RadialWeight::alpha_model(1.5);
    CHECK(eta(w15, p2, 4.0) == doctest::Approx(16.0 / 9.0).epsilon(1e-12));

    oracles::Rng rng(5);
    for (int it = 0; it < 20; ++it) {
        double t0 = rng.uniform(0.5, 50.0);
        double s = psi_calculus(w15, p2, t0).psi1;
        CHECK(std::fabs(eta(w15, p2, s) - t0) <= 1e-10 * std::max(1.0, t0));
    }
}

TEST_CASE("eta rejects targets below range for custom weights") {
    // phi(r) = r gives psi'(t) = p e^t, bounded away from 0 only as t -> -inf;
    // a target below the probe floor must error rather than loop.
    auto w = RadialWeight::custom([](double r) { return r; },
                                  [](double) { return 1.0; },
                                  [](double) { return 0.0; }, "linear");
    SpaceParams p2 = SpaceParams::finite(2.0);
    CHECK_THROWS_AS(eta(w, p2, 1e-30), std::invalid_argument);
}

TEST_CASE("laplacian satisfies psi'' = p e^{2t} Delta phi(e^t)") {
    SpaceParams p2 = SpaceParams::finite(2.0);
    auto w2 = RadialWeight::alpha_model(2.0);
    double r = std::exp(1.0);
    CHECK(laplacian(w2, p2, r) ==
          doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-12));

    // Delta phi is independent of p
    SpaceParams p3 = SpaceParams::finite(3.0), p5 = SpaceParams::finite(5.0);
    for (double rr : {1.5, 3.0, 20.0}) {
        CHECK(laplacian(w2, p3, rr) ==
              doctest::Approx(laplacian(w2, p5, rr)).epsilon(1e-12));
    }

    auto w15 = RadialWeight::alpha_model(1.5);
    CHECK(laplacian(w15, p2, std::exp(4.0)) ==
          doctest::Approx(0.375 * std::exp(-8.0)).epsilon(1e-12));

    oracles::Rng rng(3);
    for (int it = 0; it < 20; ++it) {
        double t = rng.uniform(0.5, 20.0);
        double lhs = psi_calculus(w2, p2, t).psi2;
        double rhs = 2.0 * std::exp(2.0 * t) * laplacian(w2, p2, std::exp(t));
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(lhs)));
    }

    CHECK_THROWS_AS(laplacian(w2, p2, -1.0), std::invalid_argument);
}

TEST_CASE("audit_regularity verdicts") {
    SpaceParams p2 = SpaceParams::finite(2.0);
    CHECK(audit_regularity(RadialWeight::alpha_model(2.0), p2, {1.0, 1e4}, 64)
              .passed());
    CHECK(audit_regularity(RadialWeight::alpha_model(1.5), p2, {1.0, 1e4}, 64)
              .passed());

    // (log+ r)^3 analog: psi'' = 6 p t increasing -> fail
    auto w3 = RadialWeight::custom(
        [](double r) {
            double l = std::max(0.0, std::log(r));
            return l * l * l;
        },
        [](double r) {
            double l = std::max(0.0, std::log(r));
            return 3.0 * l * l / r;
        },
        [](double r) {
            double l = std::max(0.0, std::log(r));
            return (6.0 * l - 3.0 * l * l) / (r * r);
        },
        "log-cubed");
    RegularityReport rep = audit_regularity(w3, p2, {1.0, 1e4}, 64);
    CHECK_FALSE(rep.passed());
    CHECK(rep.verdict == "fail(psi_double_positive_nonincreasing)");
}

TEST_CASE("alpha_model validates its exponent") {
    CHECK_THROWS_AS(RadialWeight::alpha_model(2.5), std::invalid_argument);
    CHECK_THROWS_AS(RadialWeight::alpha_model(1.0), std::invalid_argument);
}

TEST_CASE("weight tables interpolate the alpha family") {
    auto exact = RadialWeight::alpha_model(1.5);
    std::vector<WeightTableRow> rows;
    for (double t = 0.05; t <= 30.0; t += 0.05) {
        double r = std::exp(t);
        rows.push_back({r, exact.phi(r), exact.dphi(r), exact.d2phi(r)});
    }
    auto tab = weight_from_table(rows, "tabulated-1.5");
    SpaceParams p2 = SpaceParams::finite(2.0);
    for (double t : {1.0, 2.5, 10.0, 25.0}) {
        PsiDerivatives a = psi_calculus(exact, p2, t);
        PsiDerivatives b = psi_calculus(tab, p2, t);
        CHECK(std::fabs(a.psi - b.psi) <= 1e-5 * std::max(1.0, a.psi));
        CHECK(std::fabs(a.psi1 - b.psi1) <= 1e-4 * std::max(1.0, a.psi1));
    }
    CHECK_THROWS_AS(tab.phi(std::exp(40.0)), std::out_of_range);
}

TEST_CASE("custom maps returning non-finite values are reported") {
    auto bad = RadialWeight::custom(
        [](double r) { return r > 10.0 ? std::nan("") : r; },
        [](double) { return 1.0; }, [](double) { return 0.0; }, "bad");
    SpaceParams p2 = SpaceParams::finite(2.0);
    CHECK_THROWS_AS(psi_calculus(bad, p2, 5.0), std::domain_error);
}
