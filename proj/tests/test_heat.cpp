#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lagsem/heat.hpp"
#include "lagsem/special.hpp"

using namespace lagsem;

namespace {
double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}
const QuadratureConfig kQuad{};
}  // namespace

TEST_CASE("closed form against high-precision references") {
    CHECK(rel_err(heat_kernel(SemigroupParams::make(0, 0, 0.5), 0.5, 1.0, 1.0),
                  0.2722463878056337744796) < 1e-12);
    CHECK(rel_err(heat_kernel(SemigroupParams::make(1.5, 0.5, 0.5), 0.3, 0.8, 1.7),
                  0.06476111228658594283953) < 1e-12);
    CHECK(rel_err(heat_kernel(SemigroupParams::make(-0.75, 0, 0.5), 1.0, 2.0, 0.5),
                  0.03992556056585956731836) < 1e-12);
    CHECK(rel_err(heat_kernel(SemigroupParams::make(0, 0.5, 0.5), 2.0, 1.0, 3.0),
                  5.78563122180723224971e-5) < 1e-12);
}

TEST_CASE("parametrization invariants") {
    for (double t : {0.1, 0.5493, 2.0}) {
        const HeatParametrization h = HeatParametrization::from_time(t);
        CHECK(std::fabs(h.r * (1.0 + h.s) - (1.0 - h.s)) < 1e-12);
        CHECK(h.r > 0.0);
        CHECK(h.r < 1.0);
        CHECK(h.s > 0.0);
        CHECK(h.s < 1.0);
    }
    // the two write-ups agree across the seam s = 1/2
    const double t_seam = std::atanh(0.5);
    const SemigroupParams p = SemigroupParams::make(0.7, 0.3, 0.5);
    for (double x : {0.3, 1.0, 2.5})
        for (double y : {0.5, 1.7}) {
            const double below = heat_kernel(p, t_seam * (1.0 - 1e-11), x, y);
            const double above = heat_kernel(p, t_seam * (1.0 + 1e-11), x, y);
            CHECK(rel_err(below, above) < 1e-9);
        }
}

TEST_CASE("symmetry is exact") {
    for (double t : {0.2, 1.5}) {  // one s-form, one r-form time
        const SemigroupParams p = SemigroupParams::make(0.5, 0.25, 0.5);
        CHECK(heat_kernel(p, t, 2.0, 3.0) == heat_kernel(p, t, 3.0, 2.0));
    }
}

TEST_CASE("positivity and deep-tail finiteness") {
    const SemigroupParams p = SemigroupParams::make(-0.5, 0.0, 0.5);
    for (double t : {0.05, 1.0})
        for (double x : {0.01, 1.0, 10.0})
            for (double y : {0.02, 2.0, 25.0}) {
                const double lv = log_heat_kernel(p, t, x, y);
                CHECK(std::isfinite(lv));
                CHECK(heat_kernel(p, t, x, y) >= 0.0);
            }
}

TEST_CASE("series oracle matches the closed form") {
    const SemigroupParams p = SemigroupParams::make(0.0, 0.0, 0.5);
    const double k = heat_kernel(p, 0.5, 1.0, 1.0);
    const SeriesResult s = heat_kernel_series(p, 0.5, 1.0, 1.0, 60);
    CHECK(std::fabs(k - s.value) <= std::max(1e-9 * k, s.tail_bound));

    const SemigroupParams p2 = SemigroupParams::make(1.5, 0.5, 0.5);
    const double k2 = heat_kernel(p2, 0.3, 0.8, 1.7);
    const SeriesResult s2 = heat_kernel_series(p2, 0.3, 0.8, 1.7, 80);
    CHECK(std::fabs(k2 - s2.value) <= std::max(1e-9 * k2, s2.tail_bound));

    // single-term dominance at large time
    const SeriesResult s3 = heat_kernel_series(p, 5.0, 1.0, 1.2, 0);
    CHECK(rel_err(s3.value, heat_kernel(p, 5.0, 1.0, 1.2)) < 1e-6);

    // geometric tail shrinks with the truncation order
    double prev = heat_kernel_series(p, 0.4, 1.0, 2.0, 4).tail_bound;
    for (int n : {8, 16, 32}) {
        const double cur = heat_kernel_series(p, 0.4, 1.0, 2.0, n).tail_bound;
        CHECK(cur <= prev);
        prev = cur;
    }
    CHECK_THROWS_AS(heat_kernel_series(p, 0.5, 1.0, 1.0, -1), std::domain_error);
}

TEST_CASE("transform reproduces eigenfunction decay") {
    const SemigroupParams p = SemigroupParams::make(0.3, 0.1, 0.5);
    // dense grid: the 1e-7 target leaves little room for interpolation error
    const TabulatedFunction f = TabulatedFunction::from_callable(
        [&](double y) { return eigenfunction_phi(p, 0, y); }, log_grid(1e-4, 12.0, 60000),
        Interp::LinearInLog);
    for (double t : {0.2, 1.0})
        for (double x : {0.6, 1.4}) {
            const double got = heat_transform(p, t, f, x, kQuad).value;
            const double want =
                std::exp(-p.eigenvalue(0) * t) * eigenfunction_phi(p, 0, x);
            CHECK(rel_err(got, want) < 1e-7);
        }
    // zero datum
    const TabulatedFunction z = TabulatedFunction::linear({0.5, 1.0, 2.0}, {0.0, 0.0, 0.0});
    CHECK(heat_transform(p, 0.5, z, 1.0, kQuad).value == 0.0);
}

TEST_CASE("semigroup law on an eigenfunction combination") {
    const SemigroupParams p = SemigroupParams::make(0.0, 0.0, 0.5);
    auto f = [&](double y) {
        const auto ph = eigenfunction_phi_seq(p, 3, y);
        return ph[0] + ph[3];
    };
    const double t1 = 0.3, t2 = 0.5;
    for (double x : {0.7, 1.5}) {
        auto inner = [&](double y) {
            return heat_transform_fn(p, t2, f, 1e-6, 14.0, {}, y, kQuad).value;
        };
        const double composed = heat_transform_fn(p, t1, inner, 1e-6, 14.0, {}, x, kQuad).value;
        const double direct = heat_transform_fn(p, t1 + t2, f, 1e-6, 14.0, {}, x, kQuad).value;
        const auto ph = eigenfunction_phi_seq(p, 3, x);
        const double oracle = std::exp(-p.eigenvalue(0) * (t1 + t2)) * ph[0] +
                              std::exp(-p.eigenvalue(3) * (t1 + t2)) * ph[3];
        CHECK(rel_err(composed, direct) < 1e-6);
        CHECK(rel_err(composed, oracle) < 1e-6);
    }
}

TEST_CASE("two-region envelope") {
    const SemigroupParams p = SemigroupParams::make(0.5, 0.0, 0.5);
    const HeatBoundEnvelope env = HeatBoundEnvelope::from_gamma(2.0);
    CHECK(env.big_m > 1.0);
    CHECK(HeatBoundEnvelope::from_gamma(4.0).big_m < env.big_m);  // decreasing in gamma
    CHECK(heat_bound_envelope(p, env, 0.3, 1.0, 0.4).second == Region::Global);
    CHECK(heat_bound_envelope(p, env, 0.3, 1.0, 1.0).second == Region::Local);

    // domination with a grid-fitted constant
    double cfit = 0.0;
    for (double t : {0.05, 0.2, 1.0})
        for (double x : log_grid(0.1, 5.0, 25))
            for (double y : log_grid(0.1, 5.0, 25)) {
                const double ratio = std::exp(log_heat_kernel(p, t, x, y) -
                                              log_heat_bound_envelope(p, env, t, x, y));
                CHECK(std::isfinite(ratio));
                cfit = std::max(cfit, ratio);
            }
    CHECK(cfit > 0.0);
    CHECK(std::isfinite(cfit));
    // rejects mu != 0
    const SemigroupParams pm = SemigroupParams::make(0.5, 0.3, 0.5);
    CHECK_THROWS_AS(heat_bound_envelope(pm, env, 0.3, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("sub-Markov mass at the Hermite-reducible corner") {
    const SemigroupParams p = SemigroupParams::make(-0.5, 0.0, 0.5);
    QuadratureConfig quad;
    for (double t : {0.1, 1.0})
        for (double x : {0.5, 2.0}) {
            auto k = [&](double y) { return heat_kernel(p, t, x, y); };
            QuadResult r = integrate_graded_to_zero(k, 1.0, quad);
            r += integrate_to_infinity(k, 1.0, 1.0, quad);
            CHECK(r.value <= 1.0 + 1e-9);
            CHECK(r.value > 0.0);
        }
}

TEST_CASE("grid maximal operator") {
    const SemigroupParams p = SemigroupParams::make(0.0, 0.0, 0.5);
    const TabulatedFunction f = TabulatedFunction::from_callable(
        [&](double y) { return eigenfunction_phi(p, 0, y); }, log_grid(1e-4, 12.0, 1500),
        Interp::LinearInLog);
    const std::vector<double> t_grid = geometric_t_grid(0.01, 1.0, 16);
    const double sup = heat_maximal(p, 1.0, f, 1.0, t_grid, kQuad);
    // phi_0 >= 0 decays monotonically, so the sup sits at the smallest grid time
    const double at_min = std::fabs(heat_transform(p, t_grid.front(), f, 1.0, kQuad).value);
    CHECK(sup >= at_min * (1.0 - 1e-12));
    for (double t : t_grid)
        CHECK(sup >= std::fabs(heat_transform(p, t, f, 1.0, kQuad).value) * (1.0 - 1e-12));
    const TabulatedFunction z = TabulatedFunction::linear({0.5, 1.0}, {0.0, 0.0});
    CHECK(heat_maximal(p, 1.0, z, 1.0, t_grid, kQuad) == 0.0);
    CHECK_THROWS_AS(heat_maximal(p, 1.0, f, 1.0, {}, kQuad), std::domain_error);
}

TEST_CASE("phi_T profile") {
    CHECK(heat_phi_T(0.0, 1.0, 1e-9) == doctest::Approx(std::sqrt(1e-9)).epsilon(1e-9));
    const double y = 2.0, T = 0.7;
    CHECK(heat_phi_T(0.5, T, y) ==
          doctest::Approx(std::exp(-y * y / (2.0 * std::tanh(2.0 * T)))));
}
