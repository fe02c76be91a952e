#pragma once

#include <utility>
#include <vector>

#include "lagsem/params.hpp"

namespace lagsem {

// ln Gamma(x) for x > 0.  Lanczos approximation (g = 607/128, 15 terms),
// relative error below 1e-14 on the positive axis.
double log_gamma(double x);

// e^{-z} I_alpha(z) for z >= 0, alpha > -1.  Power series below
// z = max(15, 2 alpha^2), uniform asymptotic expansion above; both branches
// keep relative error under ~1e-12 and the seam agrees to ~1e-13.
// For alpha < 0 the value diverges as z -> 0; we return +inf at z = 0.
double bessel_i_scaled(double alpha, double z);

// bI_alpha(z) = sqrt(z) e^{-z} I_alpha(z), the scaled Bessel factor of the
// heat kernel.  Comparable to <z>^{alpha+1/2} on compact z ranges.
// At z = 0 the limit is finite only for alpha >= -1/2 (0 for alpha > -1/2,
// sqrt(2/pi) at alpha = -1/2); alpha < -1/2 raises a domain error there.
double bI(double alpha, double z);

// ln bI_alpha(z) for z > 0, assembled without forming the (possibly
// underflowing) value.
double log_bI(double alpha, double z);

// Empirical bracket [c, C] of bI_alpha(z) / <z>^{alpha+1/2} over a log grid
// on [z_lo, z_hi].
std::pair<double, double> bI_bracket_range(double alpha, double z_lo, double z_hi,
                                           int n_grid = 200);

// Normalized Laguerre polynomials L~_0^alpha(x) .. L~_{n_max}^alpha(x),
// three-term recurrence on the classical polynomials followed by division
// by sqrt(Gamma(n+alpha+1)/n!) in log space.  Orthonormal against
// x^alpha e^{-x} dx on (0,inf).
std::vector<double> laguerre_normalized(double alpha, int n_max, double x);

// phi_n(y) = sqrt(2) y^{alpha+1/2} e^{-y^2/2} L~_n^alpha(y^2), the
// eigenfunctions of L.  Requires y > 0 (the profile blows up at 0 when
// alpha < -1/2).  The exponential factors are combined in log space, so the
// value stays finite far into the gaussian tail.
double eigenfunction_phi(const SemigroupParams& p, int n, double y);

// All of phi_0(y) .. phi_{n_max}(y) from a single recurrence sweep.
std::vector<double> eigenfunction_phi_seq(const SemigroupParams& p, int n_max, double y);

}  // namespace lagsem
