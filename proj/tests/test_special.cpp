#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lagsem/quadrature.hpp"
#include "lagsem/special.hpp"

using namespace lagsem;

namespace {
double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}
}  // namespace

TEST_CASE("log_gamma pinned values") {
    CHECK(std::fabs(log_gamma(1.0)) < 1e-14);
    CHECK(std::fabs(log_gamma(2.0)) < 1e-14);
    // high-precision references
    CHECK(rel_err(log_gamma(0.5), 0.5723649429247000870717137) < 1e-13);
    CHECK(rel_err(log_gamma(7.3), 7.147892523022249032777057) < 1e-13);
    CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
    CHECK_THROWS_AS(log_gamma(-2.5), std::domain_error);
}

TEST_CASE("log_gamma tracks the library implementation") {
    for (double x = 0.05; x < 250.0; x *= 1.37)
        CHECK(std::fabs(log_gamma(x) - std::lgamma(x)) <=
              5e-14 * std::max(1.0, std::fabs(std::lgamma(x))));
}

TEST_CASE("bessel_i_scaled pinned values") {
    CHECK(bessel_i_scaled(0.0, 0.0) == 1.0);
    CHECK(bessel_i_scaled(1.3, 0.0) == 0.0);
    // half-integer closed form sqrt(2/(pi z)) e^{-z} cosh z at z=1
    CHECK(rel_err(bessel_i_scaled(-0.5, 1.0), 0.4529332469146207298905) < 1e-12);
    // arbitrary-precision series references
    CHECK(rel_err(bessel_i_scaled(0.7, 12.0), 0.1139669629544700674712) < 1e-11);
    CHECK(rel_err(bessel_i_scaled(0.0, 10.0), 0.1278333371634286073231) < 1e-11);
    CHECK(rel_err(bessel_i_scaled(1.5, 25.0), 0.07659691783707507416449) < 1e-11);
    CHECK(rel_err(bessel_i_scaled(-0.75, 0.3), 0.9247244137023292166717) < 1e-12);
    CHECK_THROWS_AS(bessel_i_scaled(0.0, -1.0), std::domain_error);
}

TEST_CASE("bessel series/asymptotic seam is continuous") {
    for (double alpha : {-0.75, -0.5, 0.0, 0.7, 1.5, 2.5}) {
        const double zc = std::max(15.0, 2.0 * alpha * alpha);
        const double below = bessel_i_scaled(alpha, zc * (1.0 - 1e-13));
        const double above = bessel_i_scaled(alpha, zc * (1.0 + 1e-13));
        CHECK(rel_err(below, above) < 1e-9);
    }
}

TEST_CASE("bI values and limits") {
    CHECK(rel_err(bI(-0.5, 0.0), 0.7978845608028653558799) < 1e-13);  // sqrt(2/pi)
    CHECK(bI(0.0, 0.0) == 0.0);
    CHECK(rel_err(bI(0.5, 3.0), 0.3979534013555233859871) < 1e-11);
    CHECK(rel_err(bI(-0.5, 1.0), 0.4529332469146207298905) < 1e-12);
    CHECK_THROWS_AS(bI(-0.75, 0.0), std::domain_error);
    // log variant agrees where the plain value is representable
    for (double z : {1e-5, 0.3, 2.0, 40.0, 900.0})
        CHECK(rel_err(std::exp(log_bI(0.7, z)), bI(0.7, z)) < 1e-12);
}

TEST_CASE("bI comparable to <z>^{alpha+1/2}") {
    for (double alpha : {-0.75, -0.5, 0.0, 1.5}) {
        const auto [c, C] = bI_bracket_range(alpha, 1e-6, 1e3);
        CHECK(c > 0.0);
        CHECK(std::isfinite(C));
        CHECK(C >= c);
    }
}

TEST_CASE("laguerre_normalized basics") {
    // degree 0 is the constant 1/sqrt(Gamma(alpha+1))
    for (double x : {0.0, 1.7, 20.0}) {
        const auto v = laguerre_normalized(1.5, 0, x);
        CHECK(rel_err(v[0], std::exp(-0.5 * log_gamma(2.5))) < 1e-14);
    }
    // L_1^0(0) = 1 with unit normalization
    const auto v = laguerre_normalized(0.0, 1, 0.0);
    CHECK(rel_err(v[0], 1.0) < 1e-14);
    CHECK(rel_err(v[1], 1.0) < 1e-14);
    CHECK_THROWS_AS(laguerre_normalized(0.0, -1, 1.0), std::domain_error);
}

TEST_CASE("laguerre_normalized against arbitrary-precision recurrence") {
    CHECK(rel_err(laguerre_normalized(1.5, 5, 2.3)[5], -0.1305378929078049539799) < 1e-12);
    CHECK(rel_err(laguerre_normalized(-0.75, 20, 50.0)[20], 39703101236.86509130629) < 1e-8);
    CHECK(rel_err(laguerre_normalized(0.0, 20, 10.0)[20], -11.96133386781211863161) < 1e-8);
    CHECK(rel_err(laguerre_normalized(1.5, 12, 30.0)[12], 15404.71543393576979564) < 1e-8);
    CHECK(rel_err(laguerre_normalized(-0.5, 8, 0.7)[8], 0.0369766466237762750799) < 1e-10);
}

TEST_CASE("laguerre orthonormality via quadrature") {
    QuadratureConfig quad;
    for (double alpha : {-0.75, -0.5, 0.0, 1.5}) {
        // weighted Gram in the x^alpha e^{-x} measure
        auto gram = [&](int n, int m) {
            auto f = [&](double x) {
                const auto l = laguerre_normalized(alpha, std::max(n, m), x);
                return l[n] * l[m] * std::exp(alpha * std::log(x) - x);
            };
            QuadResult r = integrate_graded_to_zero(f, 1.0, quad);
            r += integrate_to_infinity(f, 1.0, 1.0, quad);
            return r.value;
        };
        for (int n = 0; n <= 6; n += 3)
            for (int m = n; m <= 6; m += 2) {
                const double want = n == m ? 1.0 : 0.0;
                CHECK(std::fabs(gram(n, m) - want) < 1e-8);
            }
    }
}

TEST_CASE("eigenfunction_phi values and safety") {
    const SemigroupParams p0 = SemigroupParams::make(0.0, 0.0, 0.5);
    CHECK(rel_err(eigenfunction_phi(p0, 0, 1.0), 0.8577638849607067964802) < 1e-12);
    const SemigroupParams ph = SemigroupParams::make(-0.5, 0.0, 0.5);
    CHECK(rel_err(eigenfunction_phi(ph, 3, 1.3), -0.07394675526815845721421) < 1e-11);
    CHECK_THROWS_AS(eigenfunction_phi(p0, 0, 0.0), std::domain_error);
    CHECK_THROWS_AS(eigenfunction_phi(p0, 0, -1.0), std::domain_error);
    // log-space assembly keeps the gaussian tail finite out to y = 50
    const SemigroupParams pl = SemigroupParams::make(1.5, 0.0, 0.5);
    for (double y : {10.0, 30.0, 50.0}) {
        const double v = eigenfunction_phi(pl, 5, y);
        CHECK(std::isfinite(v));
    }
}

TEST_CASE("eigenfunction orthonormality") {
    QuadratureConfig quad;
    for (double alpha : {-0.75, 0.0, 1.5}) {
        const SemigroupParams p = SemigroupParams::make(alpha, 0.0, 0.5);
        auto inner = [&](int n, int m) {
            auto f = [&](double y) {
                const auto ph = eigenfunction_phi_seq(p, std::max(n, m), y);
                return ph[n] * ph[m];
            };
            QuadResult r = integrate_graded_to_zero(f, 1.0, quad);
            r += integrate_to_infinity(f, 1.0, 1.0, quad);
            return r.value;
        };
        for (int n = 0; n <= 8; n += 4)
            for (int m = n; m <= 8; m += 2)
                CHECK(std::fabs(inner(n, m) - (n == m ? 1.0 : 0.0)) < 1e-7);
    }
}

TEST_CASE("SemigroupParams invariants") {
    CHECK_THROWS_AS(SemigroupParams::make(-1.0, 0.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(SemigroupParams::make(0.0, -1.5, 0.5), std::domain_error);
    CHECK_THROWS_AS(SemigroupParams::make(0.0, 0.0, 0.0), std::domain_error);
    const SemigroupParams p = SemigroupParams::make(0.5, 0.25, 1.0);
    for (int n = 0; n < 6; ++n) CHECK(p.eigenvalue(n + 1) > p.eigenvalue(n));
    CHECK(p.eigenvalue(0) > 0.0);
    const SemigroupParams pe = SemigroupParams::make_extreme(0.5, 1.0);
    CHECK(pe.extreme_case);
    CHECK(std::fabs(pe.eigenvalue(0)) < 1e-12);
    CHECK(pe.eigenvalue(1) > 0.0);
}
