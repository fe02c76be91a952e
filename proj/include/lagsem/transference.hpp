#pragma once

#include <utility>
#include <vector>

#include "lagsem/params.hpp"
#include "lagsem/poisson.hpp"
#include "lagsem/report.hpp"
#include "lagsem/tabulated.hpp"

namespace lagsem {

// ---------------------------------------------------------------------------
// The squaring isometry of L^2(0,inf):  Af(x) = sqrt(2x) f(x^2), with
// inverse A^{-1}g(y) = (4y)^{-1/4} g(sqrt y).  Log-spaced node sets map to
// log-spaced node sets, so tabulated data stays graded.
TabulatedFunction square_map(const TabulatedFunction& f);
TabulatedFunction square_map_inverse(const TabulatedFunction& f);

// ---------------------------------------------------------------------------
// Eigenfunctions of the five systems, by their closed forms:
//   base:   phi_n(y)
//   psi:    y^{-alpha-1/2} phi_n(y)
//   frak_l: y^{alpha/2} e^{-y/2} L~_n(y)
//   ell:    e^{-y/2} L~_n(y)
//   L_n^a:  L~_n(y)   (the normalized Laguerre polynomial itself)
double system_eigenfunction(SystemKind sys, const SemigroupParams& p, int n, double y);

// Same values through the map chain (multiplier and square map applied to
// phi_n); used to cross-check the closed forms.
double system_eigenfunction_via_maps(SystemKind sys, const SemigroupParams& p, int n, double y);

// Eigenvalue of the system's generator for mode n.
double system_eigenvalue(SystemKind sys, const SemigroupParams& p, int n);

// ---------------------------------------------------------------------------
// Poisson transform of any system, by pulling the datum back to the base
// system, subordinating there, and pushing forward:
//   psi:    a(x) P^L_t[a^{-1} f](x)
//   frak_l: (4x)^{-1/4} P^L_{t/2}[A f](sqrt x)
//   ell:    a(x) (4x)^{-1/4} P^L_{t/2}[A(a^{-1} f)](sqrt x)
//   L_n^a:  a(x) (4x)^{-1/4} P^L_{t/2}[A(f y^{a/2} e^{-y/2})](sqrt x)
// The datum is checked against the system's Phi before transforming.
double transfer_poisson(SystemKind sys, const SemigroupParams& p, double t,
                        const TabulatedFunction& f, double x, const QuadratureConfig& quad);

// Truncated eigen-series P_t(x,y) = sum_n F_t(lambda_n) e_n(x) e_n(y) for the
// given system; the independent oracle for the kernel relations.  n_max < 0
// grows the series until the tail estimate falls below rel_tail.
double poisson_kernel_series(SystemKind sys, const SemigroupParams& p, double t, double x,
                             double y, int n_max = -1, double rel_tail = 1e-9);

// P_t(x,y) of the given system obtained from the base kernel through the
// transference identities (a(x)a(y) P^L_t, (16xy)^{-1/4} P^L_{t/2}(sqrt.), ...).
double transfer_poisson_kernel(SystemKind sys, const SemigroupParams& p, double t, double x,
                               double y, const QuadratureConfig& quad);

// ---------------------------------------------------------------------------
// Verifies that the closed per-system Phi equals the transference image of
// the base Phi up to a single y-independent constant.
BoundReport phi_consistency(SystemKind sys, const SemigroupParams& p,
                            const std::vector<double>& y_grid);

// Both sides of the maximal-function change-of-variables bound:
//   lhs = M_loc(g(y^2) chi)(sqrt x)  vs  rhs = M_loc(g chi, band M^2)(x).
std::pair<double, double> local_maximal_transport_check(const TabulatedFunction& g, double big_m,
                                                        double x);

}  // namespace lagsem
