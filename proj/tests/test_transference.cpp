#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lagsem/quadrature.hpp"
#include "lagsem/special.hpp"
#include "lagsem/transference.hpp"
#include "lagsem/weights.hpp"

using namespace lagsem;

namespace {
double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}
const QuadratureConfig kQuad{};
}  // namespace

TEST_CASE("square map is an L2 isometry") {
    // smoothed indicator of [1,4] on a dense grid: the mapped function is
    // curved between nodes, so the node count controls the isometry defect
    auto ramp = [](double y) {
        if (y <= 0.9 || y >= 4.1) return 0.0;
        if (y < 1.1) return (y - 0.9) / 0.2;
        if (y > 3.9) return (4.1 - y) / 0.2;
        return 1.0;
    };
    std::vector<double> nodes = log_grid(0.85, 4.2, 8000);
    std::vector<double> vals(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) vals[i] = ramp(nodes[i]);
    const TabulatedFunction f = TabulatedFunction::linear(std::move(nodes), std::move(vals));
    const TabulatedFunction af = square_map(f);
    QuadratureConfig quad;
    auto sq = [&](const TabulatedFunction& g) {
        auto g2 = [&](double y) { const double v = g(y); return v * v; };
        return integrate_panels(g2, g.support_lo(), g.support_hi(),
                                g.nodes(), quad).value;
    };
    CHECK(rel_err(sq(af), sq(f)) < 1e-8);
}

TEST_CASE("square map round trip is exact at nodes") {
    const auto nodes = log_grid(0.2, 9.0, 25);
    const TabulatedFunction f = TabulatedFunction::from_callable(
        [](double x) { return 1.0 + std::cos(x); }, nodes, Interp::Linear);
    const TabulatedFunction back = square_map_inverse(square_map(f));
    REQUIRE(back.nodes().size() == nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
        CHECK(back.nodes()[i] == doctest::Approx(nodes[i]).epsilon(1e-14));
        CHECK(back(back.nodes()[i]) == doctest::Approx(f(nodes[i])).epsilon(1e-10));
    }
}

TEST_CASE("eigenfunction transport across all systems") {
    const SemigroupParams p = SemigroupParams::make(0.3, 0.2, 0.5);
    for (SystemTag tag : {SystemTag::BasePhi, SystemTag::Psi, SystemTag::FrakL,
                          SystemTag::SmallEll, SystemTag::LaguerrePoly})
        for (int n : {0, 1, 4, 8})
            for (double y : {0.3, 1.0, 2.7, 6.0}) {
                const double closed = system_eigenfunction({tag}, p, n, y);
                const double mapped = system_eigenfunction_via_maps({tag}, p, n, y);
                CHECK(std::fabs(closed - mapped) <=
                      1e-10 * std::max(1.0, std::fabs(closed)));
            }
}

TEST_CASE("square-mapped systems are orthonormal in their measures") {
    const SemigroupParams p = SemigroupParams::make(0.7, 0.0, 0.5);
    QuadratureConfig quad;
    // frak_l system against plain dy
    auto inner = [&](int n, int m) {
        auto f = [&](double y) {
            return system_eigenfunction({SystemTag::FrakL}, p, n, y) *
                   system_eigenfunction({SystemTag::FrakL}, p, m, y);
        };
        QuadResult r = integrate_graded_to_zero(f, 1.0, quad);
        r += integrate_to_infinity(f, 1.0, 1.0, quad);
        return r.value;
    };
    CHECK(std::fabs(inner(0, 0) - 1.0) < 1e-8);
    CHECK(std::fabs(inner(2, 2) - 1.0) < 1e-8);
    CHECK(std::fabs(inner(0, 3)) < 1e-8);
}

TEST_CASE("laguerre-polynomial system eigenvalues") {
    const SemigroupParams p = SemigroupParams::make(0.0, 0.0, 0.5);
    CHECK(system_eigenvalue({SystemTag::LaguerrePoly}, p, 0) == doctest::Approx(0.5));
    CHECK(system_eigenvalue({SystemTag::LaguerrePoly}, p, 3) == doctest::Approx(3.5));
    CHECK(system_eigenvalue({SystemTag::BasePhi}, p, 0) == doctest::Approx(2.0));
}

TEST_CASE("transferred transform fixes eigenfunctions") {
    const SemigroupParams p = SemigroupParams::make(0.3, 0.2, 0.5);
    const double t = 0.5;
    // psi system: P^psi_t psi_0 = F_t(lambda_0) psi_0
    {
        const SystemKind sys{SystemTag::Psi};
        const TabulatedFunction f = TabulatedFunction::from_callable(
            [&](double y) { return system_eigenfunction(sys, p, 0, y); },
            log_grid(1e-4, 12.0, 2500), Interp::LinearInLog);
        for (double x : {0.7, 1.6}) {
            const double got = transfer_poisson(sys, p, t, f, x, kQuad);
            const double want = subordination_multiplier(p.nu, t, p.eigenvalue(0)) *
                                system_eigenfunction(sys, p, 0, x);
            CHECK(rel_err(got, want) < 1e-5);
        }
    }
    // laguerre-polynomial system with its quarter-scale eigenvalues
    {
        const SystemKind sys{SystemTag::LaguerrePoly};
        const TabulatedFunction f = TabulatedFunction::from_callable(
            [&](double y) { return system_eigenfunction(sys, p, 0, y); },
            log_grid(1e-4, 40.0, 2500), Interp::LinearInLog);
        const double x = 1.2;
        const double got = transfer_poisson(sys, p, t, f, x, kQuad);
        const double want =
            subordination_multiplier(p.nu, t, system_eigenvalue(sys, p, 0)) *
            system_eigenfunction(sys, p, 0, x);
        CHECK(rel_err(got, want) < 1e-5);
    }
    // base system goes through the identical code path
    {
        const TabulatedFunction f = TabulatedFunction::from_callable(
            [&](double y) { return system_eigenfunction({SystemTag::BasePhi}, p, 0, y); },
            log_grid(1e-4, 12.0, 2000), Interp::LinearInLog);
        const double direct = poisson_transform(p, t, f, 1.0, kQuad, false).value;
        const double via = transfer_poisson({SystemTag::BasePhi}, p, t, f, 1.0, kQuad);
        CHECK(via == direct);
    }
}

TEST_CASE("kernel relations against the eigen-series oracle") {
    const SemigroupParams p = SemigroupParams::make(0.3, 0.2, 0.5);
    for (const auto& [t, x, y] :
         std::vector<std::tuple<double, double, double>>{{0.8, 1.0, 1.4}, {1.5, 0.6, 2.0}}) {
        for (SystemTag tag : {SystemTag::Psi, SystemTag::FrakL, SystemTag::LaguerrePoly}) {
            const double series = poisson_kernel_series({tag}, p, t, x, y);
            const double transferred = transfer_poisson_kernel({tag}, p, t, x, y, kQuad);
            CHECK(rel_err(series, transferred) < 1e-6);
        }
    }
}

TEST_CASE("phi consistency across systems") {
    const SemigroupParams p = SemigroupParams::make(0.3, 0.2, 0.5);
    const auto grid = log_grid(1e-3, 20.0, 40);
    for (SystemTag tag : {SystemTag::BasePhi, SystemTag::Psi, SystemTag::FrakL,
                          SystemTag::SmallEll, SystemTag::LaguerrePoly}) {
        const BoundReport rep = phi_consistency({tag}, p, grid);
        CHECK(rep.pass);
        CHECK(rep.fitted.at("spread") < 1e-8);
    }
}

TEST_CASE("laguerre-polynomial Phi matches the classical profile") {
    // y^alpha e^{-y} / [(1+y)^m log(e+y)^{1+nu}] with m = (alpha+1+mu)/2,
    // up to bounded factors from the <.> bookkeeping
    const SemigroupParams p = SemigroupParams::make(0.3, 0.2, 0.5);
    const double m = p.m_parameter();
    double lo = 1e300, hi = 0.0;
    for (double y : log_grid(0.01, 20.0, 60)) {
        const double classical =
            p.alpha * std::log(y) - y - m * std::log1p(y) -
            (1.0 + p.nu) * std::log(std::log(std::exp(1.0) + y));
        const double ratio =
            std::exp(log_phi_weight({SystemTag::LaguerrePoly}, p, y) - classical);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CHECK(lo > 0.0);
    CHECK(hi / lo < 10.0);
}

TEST_CASE("two-weight transport for the psi system") {
    // w in D_p(Phi^psi)  <=>  a^p w in D_p(Phi^base), a = y^{-alpha-1/2}
    const SemigroupParams p = SemigroupParams::make(0.3, 0.0, 0.5);
    const double pexp = 2.0;
    const auto nodes = log_grid(1e-4, 30.0, 180);
    const std::vector<std::function<double(double)>> logws = {
        [](double y) { return y * y; },
        [&](double y) { return -3.0 * (p.alpha + 0.5) * std::log(y); },  // fails one side of 0
        [](double y) { return 2.0 * std::log1p(y) + y * y; },
    };
    for (const auto& lw : logws) {
        const TabulatedFunction w = TabulatedFunction::weight_from_log_callable(lw, nodes);
        const TabulatedFunction apw = w.map_log_values([&](double y, double v) {
            return v - pexp * (p.alpha + 0.5) * std::log(y);
        });
        const bool lhs =
            class_membership(w, WeightClassSpec::dp_phi(pexp, {SystemTag::Psi}), p).member;
        const bool rhs =
            class_membership(apw, WeightClassSpec::dp_phi(pexp, {SystemTag::BasePhi}), p)
                .member;
        CHECK(lhs == rhs);
    }
}

TEST_CASE("maximal-function change of variables") {
    const TabulatedFunction zero = TabulatedFunction::linear({0.5, 2.0}, {0.0, 0.0});
    const auto [l0, r0] = local_maximal_transport_check(zero, 2.0, 1.3);
    CHECK(l0 == 0.0);
    CHECK(r0 == 0.0);

    const TabulatedFunction one = TabulatedFunction::from_log_callable(
        [](double) { return 0.0; }, log_grid(1e-4, 400.0, 300));
    const auto [l1, r1] = local_maximal_transport_check(one, 2.0, 1.3);
    CHECK(l1 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r1 == doctest::Approx(1.0).epsilon(1e-10));

    // random data: lhs <= C rhs with a stable fitted constant
    auto fit = [&](int count, int seed) {
        double c = 0.0;
        for (const TabulatedFunction& g : random_piecewise_linear(seed, count, 0.01, 25.0))
            for (double x : {0.4, 1.0, 3.5, 9.0}) {
                const auto [lhs, rhs] = local_maximal_transport_check(g, 2.0, x);
                if (rhs > 0.0) c = std::max(c, lhs / rhs);
            }
        return c;
    };
    const double c1 = fit(10, 5);
    const double c2 = fit(20, 5);
    CHECK(c1 > 0.0);
    CHECK(std::isfinite(c2));
    CHECK(std::fabs(c2 / c1 - 1.0) < 0.05);
}
