#pragma once

#include <functional>
#include <vector>

namespace lagsem {

// Panel layout, tolerances and truncation limits for the improper integrals.
struct QuadratureConfig {
    double rel_tol = 1e-9;     // per-integral relative target
    double abs_floor = 1e-300; // absolute acceptance floor
    int max_depth = 36;        // adaptive bisection depth per panel
    long max_evals = 2000000;  // evaluation budget per integrate call
    double tail_eps = 1e-13;   // improper-tail termination, relative to running total
    int max_tail_panels = 256;

    QuadratureConfig halved() const {
        QuadratureConfig c = *this;
        c.rel_tol *= 0.5;
        c.tail_eps *= 0.5;
        return c;
    }
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // accumulated bisection-difference estimate
    bool converged = true;
    long evals = 0;

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        error += o.error;
        converged = converged && o.converged;
        evals += o.evals;
        return *this;
    }
};

using Fn1 = std::function<double(double)>;

// 15-point Gauss-Legendre rule on [a,b].
double gauss15(const Fn1& f, double a, double b);

// Adaptive bisection on [a,b]: a panel is accepted when the whole-panel and
// split-panel estimates agree to rel_tol of the panel mass (or abs_floor).
QuadResult integrate_adaptive(const Fn1& f, double a, double b, const QuadratureConfig& cfg);

// Adaptive integration with caller-supplied interior breakpoints (sorted or
// not; de-duplicated and clipped to [a,b]).
QuadResult integrate_panels(const Fn1& f, double a, double b,
                            std::vector<double> breaks, const QuadratureConfig& cfg);

// Integral over [a, inf): geometric panels of ratio 2 starting at width
// `scale`, stopping when a panel contributes less than tail_eps of the total.
QuadResult integrate_to_infinity(const Fn1& f, double a, double scale,
                                 const QuadratureConfig& cfg);

// Integral over (0, b] with an integrable singularity (or fast decay) at 0:
// geometric panels shrink from b towards 0 until the last panel contributes
// less than tail_eps of the total.
QuadResult integrate_graded_to_zero(const Fn1& f, double b, const QuadratureConfig& cfg);

// log of integral of exp(log_f) over fixed breakpoints, each panel by GL15 in
// shifted log space.  For positive integrands whose values over/underflow.
double log_integrate_panels(const Fn1& log_f, const std::vector<double>& breaks);

// Geometric grid of n points on [lo, hi] (inclusive endpoints), lo, hi > 0.
std::vector<double> log_grid(double lo, double hi, int n);

// Geometric grid covering (t_min, t0] with the given density per decade,
// always containing t0.
std::vector<double> geometric_t_grid(double t_min, double t0, int per_decade = 64);

}  // namespace lagsem
