#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "lagsem/heat.hpp"
#include "lagsem/params.hpp"
#include "lagsem/quadrature.hpp"
#include "lagsem/report.hpp"
#include "lagsem/tabulated.hpp"

namespace lagsem {

// Quadrature failed to reach its tolerance; carries the error estimate.
struct NumericFailure : std::runtime_error {
    double estimate;
    explicit NumericFailure(const std::string& what, double est)
        : std::runtime_error(what), estimate(est) {}
};

// Data outside L^1(Phi) (or the system's analogue); the transform integral
// does not converge.
struct AdmissibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Phi decay weights (one per Laguerre system).
//
// Base system:  Phi(y) = <y>^{a+1/2} e^{-y^2/2} / [(1+y)^{mu+1/2} log(y+e)^{1+nu}],
// with log power nu instead of 1+nu in the extreme case mu = -(alpha+1).
// The other systems carry the exact transference images of this profile.
double log_phi_weight(SystemKind sys, const SemigroupParams& p, double y);
double phi_weight(SystemKind sys, const SemigroupParams& p, double y);

struct PhiWeight {
    SystemKind system;
    SemigroupParams params;
    double log_at(double y) const { return log_phi_weight(system, params, y); }
    double operator()(double y) const { return phi_weight(system, params, y); }
};

// ---------------------------------------------------------------------------
// Subordination.

// F_t(lambda) = Gamma(nu)^{-1} int_0^inf e^{-v - t^2 lambda/(4v)} v^{nu-1} dv.
// The scalar by which P_t acts on an eigenfunction of eigenvalue lambda;
// equals e^{-t sqrt(lambda)} at nu = 1/2.
double subordination_multiplier(double nu, double t, double lambda);

// Same integral restricted to v in (v_lo, v_hi); inf allowed as v_hi.
double subordination_multiplier_partial(double nu, double t, double lambda, double v_lo,
                                        double v_hi);

// ---------------------------------------------------------------------------
// Poisson kernel.

// Boundary between the small-r and large-r regimes of the subordination
// integral written in the r = e^{-2u} variable.
struct SplitPoint {
    double xy = 0.0;
    double r0 = 0.0;

    static SplitPoint from_xy(double xy) {
        if (!(xy > 0.0)) throw std::domain_error("SplitPoint: require xy > 0");
        SplitPoint s;
        s.xy = xy;
        s.r0 = xy >= 1.0 ? 1.0 / (2.0 * xy) : 1.0 - xy / 2.0;
        return s;
    }
};

struct PoissonEval {
    double value = 0.0;
    double log_value = 0.0;
    double b_part = 0.0;  // integral over r in (0, r0)
    double a_part = 0.0;  // integral over r in (r0, 1)
    double error = 0.0;   // quadrature error estimate, relative scale of value
    bool converged = true;
};

// P_t(x,y) by adaptive quadrature of the subordinated heat kernel in the
// r variable, with panels accumulating at r = 0, r = 1 and the split point.
// The ground eigenmode is handled semi-analytically so the small-r tail is
// exact even at the extreme parameter boundary.
PoissonEval poisson_kernel_eval(const SemigroupParams& p, double t, double x, double y,
                                const QuadratureConfig& quad);
double poisson_kernel(const SemigroupParams& p, double t, double x, double y,
                      const QuadratureConfig& quad);
std::pair<double, double> poisson_split(const SemigroupParams& p, double t, double x, double y,
                                        const QuadratureConfig& quad);

// R(y) = P_t(x,y)/Phi(y) over the grid; passes when R stays positive and
// max R / min R moves by less than 5% under one grid doubling.  Records the
// empirical comparability constants c1 = min R, c2 = max R.
BoundReport poisson_two_sided_check(const SemigroupParams& p, double t, double x,
                                    const std::vector<double>& y_grid,
                                    const QuadratureConfig& quad);

// ---------------------------------------------------------------------------
// Decay envelope: local singular part plus a global Phi-shaped part.
//   C1(x) t^{2nu} e^{-y^2/2} / (t+|x-y|)^{1+2nu} 1{x/2<y<Mx}
//   + C2(x) (t v 1)^{2nu} Phi(y)
// The sharpened variant replaces (t v 1)^{2nu} by t^{2nu} at the price of
// c'(x) = <x>^{-(alpha+3/2+2nu)} inside C2.
struct PoissonEnvelope {
    double big_m = 4.0;

    double c1_of_x(const SemigroupParams& p, double x) const;
    double c2_of_x(const SemigroupParams& p, double x) const;        // uses <x>^{-(a+3/2)}
    double c2_sharp_of_x(const SemigroupParams& p, double x) const;  // uses <x>^{-(a+3/2+2nu)}
};

double log_poisson_envelope(const SemigroupParams& p, const PoissonEnvelope& env, double t,
                            double x, double y, bool sharpened = false);
double poisson_envelope(const SemigroupParams& p, const PoissonEnvelope& env, double t, double x,
                        double y, bool sharpened = false);

// ---------------------------------------------------------------------------
// Transforms and the local maximal operator in t.

struct PhiAdmissibility {
    double l1_phi = 0.0;
    bool admissible = true;
};

// int |f| Phi with window-doubling divergence detection (growth above 1% when
// the window doubles flags divergence).
PhiAdmissibility check_admissible(const TabulatedFunction& f, const SemigroupParams& p,
                                  SystemKind sys = {SystemTag::BasePhi});

// P_t f(x) = int P_t(x,y) f(y) dy, computed by subordinating heat transforms
// in the r variable (one heat transform per quadrature node).
TransformResult poisson_transform(const SemigroupParams& p, double t, const TabulatedFunction& f,
                                  double x, const QuadratureConfig& quad,
                                  bool check_admissibility = true);

// Same transform for a callable datum supported on [y_lo, y_hi]; the caller
// vouches for admissibility.
TransformResult poisson_transform_fn(const SemigroupParams& p, double t, const Fn1& f,
                                     double y_lo, double y_hi, double x,
                                     const QuadratureConfig& quad);

// Precomputed subordination table: heat transforms of a fixed datum f at
// fixed quadrature nodes in r, for a batch of x values.  Evaluating P_t f(x)
// afterwards costs one weighted dot product per (t, x), which makes suprema
// over dense t grids affordable.
class PoissonTransformTable {
public:
    PoissonTransformTable(const SemigroupParams& p, const TabulatedFunction& f,
                          std::vector<double> x_values, double t_min,
                          const QuadratureConfig& quad);

    double eval(double t, size_t x_index) const;
    double sup_over_grid(const std::vector<double>& t_grid, size_t x_index) const;
    const std::vector<double>& x_values() const { return xs_; }

private:
    SemigroupParams p_;
    std::vector<double> xs_;
    std::vector<double> r_nodes_, r_weights_;  // panel-scaled GL nodes in r
    std::vector<double> u_nodes_;
    std::vector<std::vector<double>> h_;  // [node][x] ground-subtracted heat transforms
    std::vector<double> phi0_x_;
    double c0_ = 0.0;  // <f, phi_0>
    double lam0_ = 0.0;
    double nu_ = 0.5;
};

// sup over the t grid of |P_t f(x)|, certified lower approximation of
// P*_{t0} f(x).  Rejects data outside L^1(Phi).
double poisson_sup(const SemigroupParams& p, double t0, const TabulatedFunction& f, double x,
                   const std::vector<double>& t_grid, const QuadratureConfig& quad);

// ---------------------------------------------------------------------------
// Boundary convergence experiment.

struct ConvergenceRow {
    double x = 0.0;
    double t = 0.0;
    double transform = 0.0;
    double target = 0.0;
    double error = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;  // sorted by (x, descending t)
    bool pass = true;                  // per configured rule at every x
};

// |P_t f(x) - f(x)| along a decreasing t sequence.  Passes when the final
// error is below threshold * (1 + |f(x)|) and the last three errors are
// nonincreasing, at every x.
ConvergenceTable convergence_experiment(const SemigroupParams& p, const TabulatedFunction& f,
                                        const std::vector<double>& x_set,
                                        const std::vector<double>& t_sequence,
                                        const QuadratureConfig& quad, double threshold);

}  // namespace lagsem
