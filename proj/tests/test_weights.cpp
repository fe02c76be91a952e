#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lagsem/quadrature.hpp"
#include "lagsem/weights.hpp"

using namespace lagsem;

namespace {
double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

TabulatedFunction const_one(double lo = 1e-4, double hi = 100.0) {
    return TabulatedFunction::weight_from_log_callable([](double) { return 0.0; },
                                                       log_grid(lo, hi, 200));
}
}  // namespace

TEST_CASE("local maximal operator basics") {
    const TabulatedFunction one = const_one();
    const auto grid = default_radius_grid(one, 4.0, 1.5);
    CHECK(local_maximal(one, 4.0, 1.5, grid) == doctest::Approx(1.0).epsilon(1e-12));

    const TabulatedFunction zero = TabulatedFunction::linear({0.1, 10.0}, {0.0, 0.0});
    CHECK(local_maximal(zero, 4.0, 1.5, default_radius_grid(zero, 4.0, 1.5)) == 0.0);

    // steep indicator of [1,2]: small radii at x = 1.5 stay inside the plateau
    const TabulatedFunction chi = TabulatedFunction::linear(
        {1.0 - 1e-9, 1.0, 2.0, 2.0 + 1e-9}, {0.0, 1.0, 1.0, 0.0});
    CHECK(local_maximal(chi, 4.0, 1.5, default_radius_grid(chi, 4.0, 1.5)) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(local_maximal(one, 4.0, 1.5, {}), std::domain_error);
}

TEST_CASE("rho_eps") {
    CHECK(rho_eps(0.3, 1.0) == 1.0);
    CHECK(rho_eps(0.5, 4.0) == doctest::Approx(0.5));
    for (double x : {0.2, 0.9, 3.7})
        CHECK(rho_eps(0.7, x) == doctest::Approx(rho_eps(0.7, 1.0 / x)).epsilon(1e-14));
    CHECK(rho_eps(0.7, 0.2) <= 1.0);
    CHECK_THROWS_AS(rho_eps(0.0, 1.0), std::domain_error);
}

TEST_CASE("class membership: D_p(Phi)") {
    const SemigroupParams p = SemigroupParams::make(0.0, 0.0, 0.5);
    const TabulatedFunction one = const_one(1e-4, 60.0);

    const MembershipResult m = class_membership(one, WeightClassSpec::dp_phi(2.0), p);
    CHECK(m.member);
    // independent route: quadrature of Phi^2
    QuadratureConfig quad;
    auto phi2 = [&](double y) {
        return std::exp(2.0 * log_phi_weight({SystemTag::BasePhi}, p, y));
    };
    QuadResult r = integrate_graded_to_zero(phi2, 1.0, quad);
    r += integrate_to_infinity(phi2, 1.0, 1.0, quad);
    CHECK(rel_err(m.norm, std::sqrt(r.value)) < 1e-6);

    // w = e^{-y^2} at p = 4/3: the conjugate integrand grows, tail-doubling fires
    const TabulatedFunction shrink = TabulatedFunction::weight_from_log_callable(
        [](double y) { return -y * y; }, log_grid(1e-4, 60.0, 200));
    CHECK_FALSE(class_membership(shrink, WeightClassSpec::dp_phi(4.0 / 3.0), p).member);
}

TEST_CASE("D_p(Phi) equivalent to conjugated local/exponential classes") {
    const SemigroupParams p = SemigroupParams::make(0.0, 0.0, 0.5);
    const double pexp = 2.0;
    const auto nodes = log_grid(1e-4, 30.0, 200);
    // sampled weights, members and non-members mixed
    const std::vector<std::function<double(double)>> logws = {
        [](double y) { return 0.5 * 2.0 * y * y; },                        // e^{p y^2/2}
        [](double y) { return 2.0 * std::log1p(y) + y * y; },              // (1+y)^p e^{p y^2/2}
        [](double y) { return 5.0 * std::log(y); },                        // y^5: fails near 0
        [](double y) { return -0.3 * std::log(y) + 0.25 * y * y; },        // y^{-0.3} e^{y^2/4}
        [](double y) { return 1.5 * y * y; },                              // e^{1.5 y^2}
    };
    for (const auto& lw : logws) {
        const TabulatedFunction w = TabulatedFunction::weight_from_log_callable(lw, nodes);
        const TabulatedFunction W = w.map_log_values(
            [pexp](double y, double v) { return v + 0.5 * pexp * y * y; });
        const bool lhs = class_membership(w, WeightClassSpec::dp_phi(pexp), p).member;
        const bool rhs =
            class_membership(W, WeightClassSpec::d0(pexp, p.alpha + 0.5), p).member &&
            class_membership(W, WeightClassSpec::dexp(pexp, 0.25), p).member;
        CHECK(lhs == rhs);
    }
}

TEST_CASE("carleson_jones construction") {
    const double p = 2.0, eps = 0.5, M = 2.0;
    const TabulatedFunction one = const_one(1e-3, 50.0);
    const CJWeights cj1 = carleson_jones(one, p, eps, M);
    for (double x : {0.01, 1.0, 20.0}) {
        CHECK(cj1.V(x) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(cj1.V_eps(x) == doctest::Approx(1.0).epsilon(1e-10));
    }
    // sandwich V_eps <= V <= W at every node
    const TabulatedFunction W = TabulatedFunction::weight_from_log_callable(
        [](double y) { return 3.0 * std::log1p(y); }, log_grid(1e-3, 50.0, 160));
    const CJWeights cj = carleson_jones(W, p, eps, M);
    for (double x : W.nodes()) {
        CHECK(cj.V_eps(x) <= cj.V(x) * (1.0 + 1e-12));
        CHECK(cj.V(x) <= W(x) * (1.0 + 1e-12));
    }
    // ordering in eps
    const CJWeights cj_small = carleson_jones(W, p, 0.1, M);
    for (double x : W.nodes()) CHECK(cj.V_eps(x) <= cj_small.V_eps(x) * (1.0 + 1e-12));
}

TEST_CASE("two-weight maximal inequality with a stable constant") {
    const FittedConstant r = carleson_jones_experiment(
        [](double y) { return std::pow(1.0 + y, 3.0); }, 2.0, 0.5, 2.0, 99, 30, 30.0, 200);
    CHECK(r.fitted > 0.0);
    CHECK(std::isfinite(r.fitted));
    CHECK(r.drift < 0.05);
}

TEST_CASE("weight_v2 values, integrability, membership") {
    const SemigroupParams p = SemigroupParams::make(0.0, 0.0, 0.5);
    auto nodes = log_grid(1e-4, 30.0, 220);
    nodes.push_back(1.0);  // evaluate the closed form at an exact node
    std::sort(nodes.begin(), nodes.end());
    const TabulatedFunction v2 =
        weight_v2({SystemTag::BasePhi}, p, 2.0, V2Flavor::Poisson, 3.0, nodes);
    CHECK(rel_err(v2(1.0), std::exp(-1.0) / 8.0) < 1e-12);
    CHECK_THROWS_AS(weight_v2({SystemTag::BasePhi}, p, 2.0, V2Flavor::Poisson, 1.9, nodes),
                    std::domain_error);

    // defining property: C_2 in L^p(v_2)
    PoissonEnvelope env;
    auto log_c2p_v2 = [&](double x) {
        return 2.0 * std::log(env.c2_of_x(p, x)) + v2.log_at(x);
    };
    const double head = log_integrate_panels(log_c2p_v2, log_grid(1e-6, 30.0, 200));
    const double ext = log_integrate_panels(log_c2p_v2, log_grid(1e-8, 30.0, 260));
    CHECK(std::isfinite(head));
    CHECK(std::exp(ext - head) - 1.0 < 0.01);

    // v2 lands in D_q(Phi) for q above p
    CHECK(class_membership(v2, WeightClassSpec::dp_phi(2.5), p).member);
}

TEST_CASE("weight_v1eps collapse and monotonicity") {
    const SemigroupParams p = SemigroupParams::make(0.0, 0.0, 0.5);
    const double pexp = 2.0;
    const auto nodes = log_grid(1e-3, 12.0, 160);
    // w = e^{-p x^2/2} conjugates to W = 1, so the maximal factor collapses
    const TabulatedFunction w = TabulatedFunction::weight_from_log_callable(
        [pexp](double y) { return -0.5 * pexp * y * y; }, nodes);
    const TabulatedFunction v1 = weight_v1eps(w, {SystemTag::BasePhi}, p, pexp, 0.3, 2.0);
    for (size_t i = 0; i < nodes.size(); i += 40) {
        const double x = nodes[i];  // interpolation-free comparison
        const double want = std::exp(-0.5 * pexp * x * x) /
                            std::pow(1.0 + x, 2.0 * pexp * p.nu);
        CHECK(rel_err(v1(x), want) < 1e-9);
    }
    // larger eps shrinks the weight
    const TabulatedFunction wg = TabulatedFunction::weight_from_log_callable(
        [pexp](double y) { return 0.5 * pexp * y * y; }, nodes);
    const TabulatedFunction a = weight_v1eps(wg, {SystemTag::BasePhi}, p, pexp, 0.1, 2.0);
    const TabulatedFunction b = weight_v1eps(wg, {SystemTag::BasePhi}, p, pexp, 0.6, 2.0);
    for (double x : nodes) CHECK(b(x) <= a(x) * (1.0 + 1e-12));
    // membership precondition enforced
    const TabulatedFunction bad = TabulatedFunction::weight_from_log_callable(
        [](double y) { return 5.0 * std::log(y); }, nodes);
    CHECK_THROWS_AS(weight_v1eps(bad, {SystemTag::BasePhi}, p, pexp, 0.3, 2.0),
                    AdmissibilityError);
}

TEST_CASE("combined weight") {
    const auto nodes = log_grid(0.1, 10.0, 30);
    const TabulatedFunction u = TabulatedFunction::from_callable(
        [](double x) { return 1.0 + x; }, nodes, Interp::LinearInLog);
    const TabulatedFunction v = TabulatedFunction::from_callable(
        [](double x) { return 2.0; }, nodes, Interp::LinearInLog);
    const TabulatedFunction m = weight_v_combined(u, v);
    for (double x : nodes) {
        CHECK(m(x) <= u(x) * (1.0 + 1e-12));
        CHECK(m(x) <= v(x) * (1.0 + 1e-12));
    }
    const TabulatedFunction mm = weight_v_combined(u, u);
    for (double x : nodes) CHECK(mm(x) == doctest::Approx(u(x)).epsilon(1e-12));
    const TabulatedFunction other = TabulatedFunction::from_callable(
        [](double x) { return 2.0; }, log_grid(0.1, 10.0, 31), Interp::LinearInLog);
    CHECK_THROWS_AS(weight_v_combined(u, other), std::domain_error);
}

TEST_CASE("alternative Phi-built weight") {
    const SemigroupParams p = SemigroupParams::make(0.0, 0.0, 0.5);
    const double pexp = 2.0;
    const auto nodes = log_grid(1e-3, 12.0, 140);
    const TabulatedFunction w = TabulatedFunction::weight_from_log_callable(
        [pexp](double y) { return 0.5 * pexp * y * y; }, nodes);
    const TabulatedFunction valt = weight_v_phi_w(w, {SystemTag::BasePhi}, p, pexp, 0.2);
    const double E = std::exp(1.0);
    for (double x : nodes) {
        CHECK(std::isfinite(valt.log_at(x)));
        CHECK(valt(x) > 0.0);
        // never exceeds the right branch of the min
        const int n0 = static_cast<int>(
            std::ceil(2.0 + pexp * (std::fabs(p.mu + 0.5) + p.alpha + 1.5)));
        const double branch2 =
            (pexp - 1.0) * std::log(angle_bracket(x)) -
            2.0 * std::log(1.0 + std::max(0.0, -std::log(x))) +
            pexp * log_phi_weight({SystemTag::BasePhi}, p, x) - n0 * std::log1p(x);
        CHECK(valt.log_at(x) <= branch2 + 1e-12);
        (void)E;
    }
}

TEST_CASE("lp_norm") {
    // f = 1 against the indicator weight of (0,1]
    const TabulatedFunction f = const_one(1e-12, 4.0);
    const TabulatedFunction chi = TabulatedFunction::positive({1e-12, 1.0}, {0.0, 0.0});
    CHECK(lp_norm(f, chi, 2.0) == doctest::Approx(1.0).epsilon(1e-9));

    // homogeneity and triangle inequality on random-ish data
    const auto fs = random_piecewise_linear(7, 2, 0.01, 20.0);
    const TabulatedFunction wgt = TabulatedFunction::from_log_callable(
        [](double y) { return -y; }, log_grid(1e-4, 40.0, 120));
    const TabulatedFunction f0 = fs[0];
    const TabulatedFunction cf0 = f0.map_values([](double, double v) { return 3.0 * v; });
    CHECK(rel_err(lp_norm(cf0, wgt, 2.0), 3.0 * lp_norm(f0, wgt, 2.0)) < 1e-12);

    // gaussian-growth weights stay in range through log accumulation
    const TabulatedFunction big = TabulatedFunction::from_log_callable(
        [](double y) { return y * y; }, log_grid(1e-4, 30.0, 300));
    const double norm = lp_norm(const_one(1e-4, 30.0), big, 2.0);
    CHECK(std::isfinite(norm));
    CHECK(norm > 1e150);
    CHECK_THROWS_AS(lp_norm(f, chi, 0.5), std::domain_error);
}

TEST_CASE("seeded ensembles are reproducible and in range") {
    const auto a = random_piecewise_linear(42, 5);
    const auto b = random_piecewise_linear(42, 5);
    REQUIRE(a.size() == 5);
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].nodes() == b[i].nodes());
        CHECK(a[i].nodes().size() >= 10);
        CHECK(a[i].nodes().size() <= 40);
        CHECK(a[i].nodes().front() >= 0.01);
        CHECK(a[i].nodes().back() <= 30.0);
        for (double x : a[i].nodes()) {
            CHECK(a[i](x) >= 0.0);
            CHECK(a[i](x) <= 10.0);
        }
    }
    // a longer draw extends the same prefix
    const auto c = random_piecewise_linear(42, 8);
    CHECK(c[4].nodes() == a[4].nodes());
}
