#pragma once

#include <cstdint>
#include <vector>

#include "lagsem/params.hpp"
#include "lagsem/poisson.hpp"
#include "lagsem/tabulated.hpp"

namespace lagsem {

// ---------------------------------------------------------------------------
// Local Hardy-Littlewood maximal operator, truncated to the band
// x/2 < y < M x:  sup_r |I(x,r)|^{-1} int_{I(x,r)} |f| chi_band,
// I(x,r) = (x-r, x+r) cap (0,inf).  Averages are exact integrals of the
// interpolant; the sup over the radius grid is a certified lower bound.
double local_maximal(const TabulatedFunction& f, double big_m, double x,
                     const std::vector<double>& r_grid);

// Same averages with an explicit truncation band (band_lo, band_hi).
double local_maximal_band(const TabulatedFunction& f, double band_lo, double band_hi, double x,
                          const std::vector<double>& r_grid);

// Geometric radius grid from the node spacing at x up to 1.1 max((M-1)x, x/2).
std::vector<double> default_radius_grid(const TabulatedFunction& f, double big_m, double x,
                                        int n = 96);

// rho_eps(x) = min{x^eps, x^{-eps}}.
double rho_eps(double eps, double x);

// ---------------------------------------------------------------------------
// Weight-class membership.

enum class WeightClassKind { DpPhi, DpLoc, D0, DExp };

struct WeightClassSpec {
    WeightClassKind kind = WeightClassKind::DpPhi;
    double p = 2.0;
    SystemKind system{SystemTag::BasePhi};  // DpPhi
    double beta = 0.0;                      // D0, beta > -1
    double a = 1.0;                         // DExp, a > 0

    static WeightClassSpec dp_phi(double p, SystemKind sys = {SystemTag::BasePhi});
    static WeightClassSpec dp_loc(double p);
    static WeightClassSpec d0(double p, double beta);
    static WeightClassSpec dexp(double p, double a);
};

struct MembershipResult {
    bool member = false;
    double norm = 0.0;  // p'-th root of the defining integral when member
};

// Evaluates the defining integral by graded quadrature with window-doubling
// divergence detection; divergence is a valid (false) answer.
MembershipResult class_membership(const TabulatedFunction& w, const WeightClassSpec& spec,
                                  const SemigroupParams& params);

// ---------------------------------------------------------------------------
// Carleson-Jones companion weights.

struct CJWeights {
    double p = 2.0;
    double eps = 0.1;
    double big_m = 2.0;
    TabulatedFunction V;      // [M_loc(W^{-p'/p})]^{-p/p'}
    TabulatedFunction V_eps;  // V rho_eps(V)
};

// Requires W > 0 with W^{-p'/p} locally integrable on the node range.
CJWeights carleson_jones(const TabulatedFunction& W, double p, double eps, double big_m);

// ---------------------------------------------------------------------------
// Explicit second weights.

enum class V2Flavor { Heat, Poisson };

// The explicit companion weight absorbing the global term of the maximal
// bound.  Heat flavor:  <x>^{(a+3/2)p-1} / (log(e/<x>)^2 (1+x)^N).
// Poisson flavor adds the gaussian (or linear-exponential) factor of the
// system, e.g. base:  <x>^{(a+3/2)p-1}/log(e/<x>)^2 * e^{-p x^2/2}/(1+x)^N
// with N > 1 + p|mu+1/2|.  n_exponent at or below the system threshold is a
// domain error.
TabulatedFunction weight_v2(SystemKind sys, const SemigroupParams& params, double p,
                            V2Flavor flavor, double n_exponent,
                            const std::vector<double>& nodes);
double weight_v2_threshold(SystemKind sys, const SemigroupParams& params, double p,
                           V2Flavor flavor);

// First companion weight, built from the maximal function of the conjugate
// weight: base system
//   V(x) = [M_loc(w^{1/(1-p)} e^{-p'x^2/2})(x)]^{1-p},
//   v_{1,eps}(x) = (1+x)^{-2p nu} e^{-p x^2/2} V rho_eps(V);
// square-map systems use the linear exponential e^{-p'x/2} (e^{-p'x} for the
// Laguerre-polynomial system) and the widened band M^2.
// Rejects w outside D_p(Phi^sys).
TabulatedFunction weight_v1eps(const TabulatedFunction& w, SystemKind sys,
                               const SemigroupParams& params, double p, double eps,
                               double big_m);

// Pointwise minimum on a common node set.
TabulatedFunction weight_v_combined(const TabulatedFunction& v1, const TabulatedFunction& v2);

// Alternative second weight built from Phi itself:
//   min{ Phi^p [M_loc(w^{-p'/p} Phi^{p'})]^{-p/p'} Upsilon_eps,
//        <x>^{p-1}/log(e/<x>)^2 Phi^p/(1+x)^{N0} },
//   Upsilon_eps = <x>^{eps N1}/(1+x)^{N2} rho_eps([M_loc(w^{-p'/p} Phi^{p'})]^{-p/p'}).
// Pass n0 < 0 to use the default ceil(2 + p(|mu+1/2| + alpha + 3/2)); n1, n2
// default to 4.
TabulatedFunction weight_v_phi_w(const TabulatedFunction& w, SystemKind sys,
                                 const SemigroupParams& params, double p, double eps,
                                 int n0 = -1, int n1 = 4, int n2 = 4);

// ---------------------------------------------------------------------------
// Norms and test data.

// (int |f|^p weight dy)^{1/p}, accumulated in log space so gaussian-growth
// weights cannot overflow.  Throws NumericFailure on a divergent tail.
double lp_norm(const TabulatedFunction& f, const TabulatedFunction& weight, double p);

// Seeded piecewise-linear test functions: 10-40 knots on [knot_lo, knot_hi],
// values in [0, 10], zero extension.
std::vector<TabulatedFunction> random_piecewise_linear(std::uint64_t seed, int count,
                                                       double knot_lo = 0.01,
                                                       double knot_hi = 30.0,
                                                       double value_max = 10.0);

// ---------------------------------------------------------------------------
// Two-weight maximal inequality experiment:
// fitted_c = sup over the ensemble of ||M_loc f||_{L^p(V_eps)} / ||f||_{L^p(W)},
// re-fitted with the ensemble and the tabulation grid doubled; passes when
// the refit moves the constant by less than 5%.
struct FittedConstant {
    double fitted = 0.0;
    double refitted = 0.0;
    double drift = 0.0;
    bool pass = false;
};

FittedConstant carleson_jones_experiment(const std::function<double(double)>& W_callable,
                                         double p, double eps, double big_m,
                                         std::uint64_t seed, int n_funcs, double y_max,
                                         int n_nodes);

}  // namespace lagsem
