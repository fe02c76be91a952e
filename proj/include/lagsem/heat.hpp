#pragma once

#include <utility>
#include <vector>

#include "lagsem/params.hpp"
#include "lagsem/quadrature.hpp"
#include "lagsem/tabulated.hpp"

namespace lagsem {

// The two closed-form write-ups of the heat kernel, in the variables
// r = e^{-2t} and s = tanh t.  Both describe the same kernel; the s-form
// isolates the gaussian singularity near t = 0, the r-form the decay for
// large t.  We switch at s = 1/2.
struct HeatParametrization {
    enum class Kind { RForm, SForm };
    Kind kind = Kind::SForm;
    double r = 0.0;
    double s = 0.0;

    static HeatParametrization from_time(double t);
};

// ln e^{-tL}(x,y), assembled fully in log space.
double log_heat_kernel(const SemigroupParams& p, double t, double x, double y);
double heat_kernel(const SemigroupParams& p, double t, double x, double y);

struct SeriesResult {
    double value = 0.0;
    double tail_bound = 0.0;
};

// Truncated eigenfunction series sum_{n<=n_max} e^{-lambda_n t} phi_n(x) phi_n(y)
// with a geometric tail bound built from the empirical sup of |phi_n| at the
// two evaluation points.
SeriesResult heat_kernel_series(const SemigroupParams& p, double t, double x, double y, int n_max);

struct TransformResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

// e^{-tL}f(x) for a callable integrand over [y_lo, y_hi] with optional extra
// panel breakpoints (gaussian-peak breaks at x +- k sqrt(4s) are always added).
TransformResult heat_transform_fn(const SemigroupParams& p, double t, const Fn1& f, double y_lo,
                                  double y_hi, const std::vector<double>& breaks, double x,
                                  const QuadratureConfig& quad);

// e^{-tL}f(x) for tabulated data; the integration window follows the node
// range, extended along the kernel's gaussian decay when f has a power tail.
TransformResult heat_transform(const SemigroupParams& p, double t, const TabulatedFunction& f,
                               double x, const QuadratureConfig& quad);

// Right-hand side of the two-region heat kernel bound: gaussian times
// <xy/s>^{alpha+1/2} in the local band x/2 <= y <= Mx, and
// c(x) <y>^{alpha+1/2} e^{-y^2/(2 gamma tanh 2t)} outside, with
// c(x) = <x>^{-(alpha+3/2)} and M tied to gamma by (M/(M-1))^3 = gamma.
struct HeatBoundEnvelope {
    double gamma = 2.0;
    double big_m = 0.0;

    static HeatBoundEnvelope from_gamma(double gamma);
    double c_of_x(double alpha, double x) const;
};

enum class Region { Local, Global };

std::pair<double, Region> heat_bound_envelope(const SemigroupParams& p,
                                              const HeatBoundEnvelope& env, double t, double x,
                                              double y);
double log_heat_bound_envelope(const SemigroupParams& p, const HeatBoundEnvelope& env, double t,
                               double x, double y, Region* region = nullptr);

// sup over the grid of |e^{-tL}f(x)|, refined once around the grid argmax.
// A lower approximation of the true sup h*_{t0} f(x).
double heat_maximal(const SemigroupParams& p, double t0, const TabulatedFunction& f, double x,
                    const std::vector<double>& t_grid, const QuadratureConfig& quad);

// Admissibility profile of the maximal heat operator at horizon T:
// phi_T(y) = <y>^{alpha+1/2} e^{-y^2 / (2 tanh 2T)}.
double heat_phi_T(double alpha, double T, double y);

}  // namespace lagsem
