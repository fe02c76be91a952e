#include "lagsem/heat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lagsem/special.hpp"

namespace lagsem {

HeatParametrization HeatParametrization::from_time(double t) {
    if (!(t > 0.0)) throw std::domain_error("HeatParametrization: require t > 0");
    HeatParametrization h;
    h.s = std::tanh(t);
    h.r = std::exp(-2.0 * t);
    h.kind = h.s <= 0.5 ? Kind::SForm : Kind::RForm;
    return h;
}

double log_heat_kernel(const SemigroupParams& p, double t, double x, double y) {
    if (!(t > 0.0 && x > 0.0 && y > 0.0))
        throw std::domain_error("heat_kernel: require t, x, y > 0");
    if (x < y) std::swap(x, y);  // kernel is symmetric; fix one evaluation order
    const HeatParametrization h = HeatParametrization::from_time(t);
    if (h.kind == HeatParametrization::Kind::SForm) {
        const double s = h.s;
        const double one_m_s2 = (1.0 - s) * (1.0 + s);
        const double z = one_m_s2 * x * y / (2.0 * s);
        return p.mu * (std::log1p(-s) - std::log1p(s)) +
               0.5 * (std::log(one_m_s2) - std::log(2.0 * s)) + log_bI(p.alpha, z) -
               (x - y) * (x - y) / (4.0 * s) - s * (x + y) * (x + y) / 4.0;
    }
    const double r = h.r;
    const double one_m_r2 = (1.0 - r) * (1.0 + r);
    const double z = 2.0 * r * x * y / one_m_r2;
    return p.mu * std::log(r) + 0.5 * (std::log(2.0 * r) - std::log(one_m_r2)) +
           log_bI(p.alpha, z) - (x - r * y) * (x - r * y) / one_m_r2 +
           0.5 * (x * x - y * y);
}

double heat_kernel(const SemigroupParams& p, double t, double x, double y) {
    return std::exp(log_heat_kernel(p, t, x, y));
}

SeriesResult heat_kernel_series(const SemigroupParams& p, double t, double x, double y,
                                int n_max) {
    if (n_max < 0) throw std::domain_error("heat_kernel_series: require n_max >= 0");
    if (!(t > 0.0)) throw std::domain_error("heat_kernel_series: require t > 0");
    const std::vector<double> px = eigenfunction_phi_seq(p, n_max, x);
    const std::vector<double> py = (x == y) ? px : eigenfunction_phi_seq(p, n_max, y);
    double sum = 0.0, sup_x = 0.0, sup_y = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        sum += std::exp(-p.eigenvalue(n) * t) * px[n] * py[n];
        sup_x = std::max(sup_x, std::fabs(px[n]));
        sup_y = std::max(sup_y, std::fabs(py[n]));
    }
    SeriesResult out;
    out.value = sum;
    out.tail_bound = sup_x * sup_y * std::exp(-p.eigenvalue(n_max + 1) * t) /
                     (1.0 - std::exp(-4.0 * t));
    return out;
}

TransformResult heat_transform_fn(const SemigroupParams& p, double t, const Fn1& f, double y_lo,
                                  double y_hi, const std::vector<double>& breaks, double x,
                                  const QuadratureConfig& quad) {
    TransformResult out;
    if (!(y_hi > y_lo)) return out;
    const double s = std::tanh(t);
    const double w = std::sqrt(4.0 * s);
    std::vector<double> bks = breaks;
    for (double k : {-8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double b = x + k * w;
        if (b > y_lo && b < y_hi) bks.push_back(b);
    }
    auto integrand = [&](double y) { return heat_kernel(p, t, x, y) * f(y); };
    const QuadResult q = integrate_panels(integrand, y_lo, y_hi, std::move(bks), quad);
    out.value = q.value;
    out.error = q.error;
    out.converged = q.converged;
    return out;
}

TransformResult heat_transform(const SemigroupParams& p, double t, const TabulatedFunction& f,
                               double x, const QuadratureConfig& quad) {
    const double s = std::tanh(t);
    // window past which the gaussian factor is below any double
    const double w = std::sqrt(4.0 * s * 750.0);
    double lo = f.support_lo(), hi = f.support_hi();
    if (f.extension() == Extension::PowerTail) {
        lo = std::max(1e-12, std::min(lo, x - w));
        hi = std::max(hi, x + w);
    }
    std::vector<double> bks;
    const auto& nodes = f.nodes();
    if (nodes.size() <= 64) bks.assign(nodes.begin(), nodes.end());
    return heat_transform_fn(p, t, [&](double y) { return f(y); }, lo, hi, bks, x, quad);
}

HeatBoundEnvelope HeatBoundEnvelope::from_gamma(double gamma) {
    if (!(gamma > 1.0)) throw std::domain_error("HeatBoundEnvelope: require gamma > 1");
    HeatBoundEnvelope e;
    e.gamma = gamma;
    const double g3 = std::cbrt(gamma);
    e.big_m = g3 / (g3 - 1.0);  // (M/(M-1))^3 = gamma
    return e;
}

double HeatBoundEnvelope::c_of_x(double alpha, double x) const {
    return std::pow(angle_bracket(x), -(alpha + 1.5));
}

double log_heat_bound_envelope(const SemigroupParams& p, const HeatBoundEnvelope& env, double t,
                               double x, double y, Region* region) {
    if (std::fabs(p.mu) > 1e-12)
        throw std::invalid_argument("heat_bound_envelope: stated for mu = 0 only");
    const double s = std::tanh(t);
    if (!(s > 0.0 && s < 1.0)) throw std::domain_error("heat_bound_envelope: bad t");
    const bool local = (y >= x / 2.0) && (y <= env.big_m * x);
    if (region) *region = local ? Region::Local : Region::Global;
    if (local) {
        const double z = x * y / s;
        return -(x - y) * (x - y) / (4.0 * s) - 0.5 * std::log(s) +
               (p.alpha + 0.5) * std::log(angle_bracket(z));
    }
    const double th2t = std::tanh(2.0 * t);
    return std::log(env.c_of_x(p.alpha, x)) +
           (p.alpha + 0.5) * std::log(angle_bracket(y)) -
           y * y / (2.0 * env.gamma * th2t);
}

std::pair<double, Region> heat_bound_envelope(const SemigroupParams& p,
                                              const HeatBoundEnvelope& env, double t, double x,
                                              double y) {
    Region reg;
    const double lv = log_heat_bound_envelope(p, env, t, x, y, &reg);
    return {std::exp(lv), reg};
}

double heat_maximal(const SemigroupParams& p, double t0, const TabulatedFunction& f, double x,
                    const std::vector<double>& t_grid, const QuadratureConfig& quad) {
    if (t_grid.empty()) throw std::domain_error("heat_maximal: empty t grid");
    double best = 0.0;
    size_t best_i = 0;
    for (size_t i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        if (!(t > 0.0 && t <= t0)) throw std::domain_error("heat_maximal: grid outside (0, t0]");
        const double v = std::fabs(heat_transform(p, t, f, x, quad).value);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    // one refinement pass around the grid argmax
    std::vector<double> extra;
    if (best_i > 0) extra.push_back(std::sqrt(t_grid[best_i - 1] * t_grid[best_i]));
    if (best_i + 1 < t_grid.size())
        extra.push_back(std::sqrt(t_grid[best_i] * t_grid[best_i + 1]));
    for (double t : extra)
        best = std::max(best, std::fabs(heat_transform(p, t, f, x, quad).value));
    return best;
}

double heat_phi_T(double alpha, double T, double y) {
    if (!(y > 0.0 && T > 0.0)) throw std::domain_error("heat_phi_T: require y, T > 0");
    return std::pow(angle_bracket(y), alpha + 0.5) *
           std::exp(-y * y / (2.0 * std::tanh(2.0 * T)));
}

}  // namespace lagsem
