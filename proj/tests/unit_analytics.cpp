#include <cmath>
#include <random>

#include <doctest.h>

#include "qbreak/analytics.hpp"

using namespace qbreak;
using doctest::Approx;

TEST_CASE("BdG dispersion") {
    CHECK(dispersion_ppm(1, 0.0) == std::complex<double>(1.0, 0.0));
    CHECK(std::abs(dispersion_ppm(1, 1.2) - std::complex<double>(0.0, 0.4472135954999579)) <=
          1e-15);
    CHECK(dispersion_ppm(2, 1.0).real() == Approx(std::sqrt(12.0)).epsilon(1e-15));
    CHECK(std::abs(dispersion_ppm(1, 1.0)) == 0.0);
    CHECK_THROWS_AS(dispersion_ppm(0, 0.5), DomainError);
    // omega^2 = k^2 (k^2 - lambda) as a complex identity
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> lam(0.0, 5.0);
    for (int i = 0; i < 50; ++i) {
        const int k = 1 + static_cast<int>(rng() % 4);
        const double l = lam(rng);
        const auto w = dispersion_ppm(k, l);
        CHECK(std::abs(w * w - std::complex<double>(k * k * (k * k - l), 0.0)) <= 1e-12);
    }
}

TEST_CASE("Bogoliubov coefficients") {
    const BogoliubovCoeffs free = bogoliubov_coeffs(0.0);
    CHECK(free.u2 == 1.0);
    CHECK(free.v2 == 0.0);
    const BogoliubovCoeffs c = bogoliubov_coeffs(0.8);
    CHECK(c.v2 == Approx(0.17082039324993691).epsilon(1e-10));
    CHECK_THROWS_AS(bogoliubov_coeffs(1.0), DomainError);
    CHECK_THROWS_AS(bogoliubov_coeffs_ppm(1.5, 1), DomainError);
    CHECK(bogoliubov_coeffs_ppm(0.8, 1).v2 == Approx(0.17082039324993691).epsilon(1e-10));
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> lam(1e-4, 0.9999);
    for (int i = 0; i < 100; ++i) {
        const BogoliubovCoeffs b = bogoliubov_coeffs(lam(rng));
        CHECK(b.u2 - b.v2 == Approx(1.0).epsilon(1e-12));
        CHECK(b.u2 >= 1.0);
    }
}

TEST_CASE("periodic depletion sum") {
    CHECK(depletion_ppm_sum(0.0, 10) == 0.0);
    CHECK(depletion_ppm_sum(0.1, 100) == Approx(0.0014930461295874648).epsilon(1e-12));
    CHECK(depletion_ppm_sum(0.1, 1) == Approx(0.0013879257199867885).epsilon(1e-12));
    // Cauchy in kmax with a k^-4 tail
    const double s1 = depletion_ppm_sum(0.5, 50);
    const double s2 = depletion_ppm_sum(0.5, 100);
    const double s4 = depletion_ppm_sum(0.5, 200);
    CHECK(s2 >= s1);
    CHECK(std::abs(s4 - s2) <= std::abs(s2 - s1));
    CHECK(std::abs(s2 - s1) <= 1e-4);
    CHECK_THROWS_AS(depletion_ppm_sum(1.0, 10), DomainError);
    CHECK_THROWS_AS(depletion_ppm_sum(0.5, 0), DomainError);
}

TEST_CASE("depletion with backreaction") {
    CHECK(depletion_backreaction(0.0, 100, 3, ModelKind::Npm) == 0.0);
    // N -> infinity limit of the single-species root
    const double inf_limit = depletion_backreaction(0.8, 100000000, 1, ModelKind::Npm);
    CHECK(inf_limit == Approx(0.17082039324993691).epsilon(1e-4));
    // bisection residual at a frozen root
    const double root = depletion_backreaction(0.8, 50, 10, ModelKind::Npm);
    CHECK(root == Approx(1.4698520122526775).epsilon(1e-9));
    const double c = 1.0 - root / 50.0;
    const double resid =
        root - 5.0 * ((1.0 - 0.4 * c) / std::sqrt(1.0 - 0.8 * c) - 1.0);
    CHECK(std::abs(resid) <= 1e-10);
    // root unique in [0, N) for lambda < 1: sign changes exactly once
    int changes = 0;
    double prev = 0.0 - 5.0 * ((1.0 - 0.4) / std::sqrt(0.2) - 1.0);
    for (int i = 1; i <= 1000; ++i) {
        const double x = 50.0 * i / 1001.0;
        const double cc = 1.0 - x / 50.0;
        const double v = x - 5.0 * ((1.0 - 0.4 * cc) / std::sqrt(1.0 - 0.8 * cc) - 1.0);
        if ((v < 0.0) != (prev < 0.0)) ++changes;
        prev = v;
    }
    CHECK(changes == 1);
    // critical frozen root and consistency with the closed form
    CHECK(depletion_backreaction(1.0, 1000000, 2, ModelKind::Npm) ==
          Approx(62.333773582124607).epsilon(1e-7));
}

TEST_CASE("critical depletion closed forms") {
    CHECK(depletion_critical(1000, 2) == Approx(6.2996052494743658).epsilon(1e-14));
    CHECK(depletion_critical(1000, 8) == Approx(15.874010519681995).epsilon(1e-14));
    const double root = depletion_backreaction(1.0, 1000000, 2, ModelKind::Npm);
    CHECK(std::abs(root / depletion_critical(1000000, 2) - 1.0) <= 0.05);
}

TEST_CASE("regime classification") {
    const RegimeReport under =
        rate_and_heuristic_breaktime(ModelParams::from_lambda(50, 10, 0.8, 0.0, 4));
    CHECK(under.regime == Regime::Undercritical);
    REQUIRE(under.t_q_estimate.has_value());
    CHECK(*under.t_q_estimate == Approx(7.8125).epsilon(1e-12));
    CHECK(under.fictitious); // Q C = 40 < N and analytic N_d << N

    const RegimeReport few =
        rate_and_heuristic_breaktime(ModelParams::from_lambda(50, 3, 1.2, 0.0, 50));
    CHECK(few.regime == Regime::OvercriticalFew);
    CHECK(few.q_boundary == Approx(18.518518518518519).epsilon(1e-12));
    REQUIRE(few.t_q_estimate.has_value());
    CHECK(*few.t_q_estimate == Approx(2.9158497898934545).epsilon(1e-12));

    const RegimeReport many =
        rate_and_heuristic_breaktime(ModelParams::from_lambda(10, 10, 1.2, 0.0, 10));
    CHECK(many.regime == Regime::OvercriticalMany);
    CHECK(!many.t_q_estimate.has_value());

    const RegimeReport crit =
        rate_and_heuristic_breaktime(ModelParams::from_lambda(100, 2, 1.0, 0.0, 10));
    CHECK(crit.regime == Regime::Critical);
    CHECK(*crit.t_q_estimate == Approx(10.0).epsilon(1e-12));

    // within a factor 2 of the boundary: no formula asserted
    const RegimeReport near =
        rate_and_heuristic_breaktime(ModelParams::from_lambda(50, 18, 1.2, 0.0, 50));
    CHECK(near.near_boundary);
    CHECK(near.regime == Regime::Unknown);
}

TEST_CASE("instability extents") {
    const InstabilityExtent e = instability_extent(1.2, 50, 10);
    CHECK(e.deltaN_inst == Approx(8.3333333333333333).epsilon(1e-12));
    CHECK(e.deltaN_pert == Approx(6.1237243569579452).epsilon(1e-12));
    CHECK(instability_extent(1.0 + 1e-12, 50, 1).deltaN_inst == Approx(0.0).epsilon(1e-9));
    CHECK_THROWS_AS(instability_extent(1.0, 50, 1), DomainError);
}

TEST_CASE("complete elliptic integrals via AGM") {
    const double half_pi = 2.0 * std::asin(1.0) / 2.0;
    CHECK(elliptic_K(0.0) == Approx(half_pi).epsilon(1e-15));
    CHECK(elliptic_E(0.0) == Approx(half_pi).epsilon(1e-15));
    CHECK(elliptic_K(0.5) == Approx(1.8540746773013719).epsilon(1e-14));
    CHECK(elliptic_E(0.5) == Approx(1.3506438810476755).epsilon(1e-14));
#if defined(__GNUC__)
    for (double m : {0.1, 0.3, 0.7, 0.9, 0.99}) {
        CHECK(elliptic_K(m) == Approx(std::comp_ellint_1(std::sqrt(m))).epsilon(1e-13));
        CHECK(elliptic_E(m) == Approx(std::comp_ellint_2(std::sqrt(m))).epsilon(1e-13));
    }
#endif
}

TEST_CASE("soliton branch parameter") {
    CHECK(elliptic_m(1.0) == 0.0);
    const double m15 = elliptic_m(1.5);
    CHECK(m15 == Approx(0.98873519210603429).epsilon(1e-10));
    const double pi = 2.0 * std::asin(1.0);
    CHECK(std::abs(elliptic_K(m15) * elliptic_E(m15) - 0.25 * pi * pi * 1.5) <= 1e-10);
    CHECK(elliptic_m(1.1) == Approx(0.83965297651244992).epsilon(1e-10));
    // strictly increasing on [1, 3]
    double prev = 0.0;
    for (double lam = 1.0; lam <= 3.0; lam += 0.25) {
        const double m = elliptic_m(lam);
        CHECK(m >= prev);
        if (lam > 1.0) CHECK(m > prev);
        prev = m;
    }
    CHECK_THROWS_AS(elliptic_m(0.9), DomainError);
}

TEST_CASE("C_m bounds") {
    CHECK(cm_bounds(0.8, 0.0).expectation == Approx(0.1).epsilon(1e-10));
    const CmBounds fin = cm_bounds(0.8, 0.016);
    REQUIRE(fin.final_bound.has_value());
    CHECK(*fin.final_bound == Approx(0.1131370849898476).epsilon(1e-10));
    const CmBounds first = cm_bounds(0.5, 0.01);
    REQUIRE(first.final_bound.has_value());
    CHECK(*first.final_bound == Approx(0.1299038105676658).epsilon(1e-10));
    CHECK(first.order_of_magnitude);
    // both branches are computed around lambda = 2/3, no continuity asserted
    CHECK(cm_bounds(2.0 / 3.0, 0.01).final_bound.has_value());
    CHECK(cm_bounds(2.0 / 3.0 + 1e-9, 0.01).final_bound.has_value());
    // gapless bound needs lambda < 1
    const CmBounds gp = cm_bounds(0.8, 0.016, 4, 50);
    REQUIRE(gp.gapless.has_value());
    CHECK(*gp.gapless == Approx((1.0 - 0.8 * (1.0 - 4.0 / 50.0)) / 2.0).epsilon(1e-12));
    CHECK_THROWS_AS(cm_bounds(1.2, 0.016, 4, 50), DomainError);
}
