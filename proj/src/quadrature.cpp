#include "lagsem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lagsem {

namespace {

// 15-point Gauss-Legendre nodes/weights on [-1,1].
constexpr double kGL15Nodes[15] = {
    -0.98799251802048542849, -0.93727339240070590431, -0.84820658341042721620,
    -0.72441773136017004742, -0.57097217260853884754, -0.39415134707756336990,
    -0.20119409399743452230, 0.0,
    0.20119409399743452230,  0.39415134707756336990,  0.57097217260853884754,
    0.72441773136017004742,  0.84820658341042721620,  0.93727339240070590431,
    0.98799251802048542849,
};
constexpr double kGL15Weights[15] = {
    0.03075324199611726835, 0.07036604748810812471, 0.10715922046717193501,
    0.13957067792615431445, 0.16626920581699393355, 0.18616100001556221103,
    0.19843148532711157646, 0.20257824192556127288, 0.19843148532711157646,
    0.18616100001556221103, 0.16626920581699393355, 0.13957067792615431445,
    0.10715922046717193501, 0.07036604748810812471, 0.03075324199611726835,
};

struct PanelState {
    const Fn1* f;
    const QuadratureConfig* cfg;
    double global_floor = 0.0;  // absolute floor from the global integral scale
    long evals = 0;
    double err = 0.0;
    bool converged = true;
};

double gl15_raw(PanelState& st, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 15; ++i) s += kGL15Weights[i] * (*st.f)(c + h * kGL15Nodes[i]);
    st.evals += 15;
    return s * h;
}

double adapt(PanelState& st, double a, double b, double whole, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gl15_raw(st, a, m);
    const double right = gl15_raw(st, m, b);
    const double diff = std::fabs(whole - (left + right));
    const double mass = std::fabs(left) + std::fabs(right);
    const double accept =
        std::max({st.cfg->abs_floor, st.cfg->rel_tol * mass, st.global_floor});
    const bool budget_out = depth >= st.cfg->max_depth || st.evals > st.cfg->max_evals;
    if (diff <= accept || budget_out) {
        // unresolved differences land in the error estimate; the caller judges
        st.err += diff;
        return left + right;
    }
    return adapt(st, a, m, left, depth + 1) + adapt(st, m, b, right, depth + 1);
}

}  // namespace

double gauss15(const Fn1& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 15; ++i) s += kGL15Weights[i] * f(c + h * kGL15Nodes[i]);
    return s * h;
}

QuadResult integrate_adaptive(const Fn1& f, double a, double b, const QuadratureConfig& cfg) {
    QuadResult out;
    if (!(b > a)) return out;
    PanelState st{&f, &cfg};
    const double whole = gl15_raw(st, a, b);
    st.global_floor = 0.005 * cfg.rel_tol * std::fabs(whole);
    out.value = adapt(st, a, b, whole, 0);
    out.error = st.err;
    out.converged = st.converged;
    out.evals = st.evals;
    return out;
}

QuadResult integrate_panels(const Fn1& f, double a, double b,
                            std::vector<double> breaks, const QuadratureConfig& cfg) {
    QuadResult out;
    if (!(b > a)) return out;
    breaks.push_back(a);
    breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                                [&](double x) { return x < a || x > b; }),
                 breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    // first sweep fixes the global scale, so panels that are dead relative to
    // the whole integral are accepted without refinement
    PanelState st{&f, &cfg};
    std::vector<double> rough(breaks.size() - 1);
    double total_mass = 0.0;
    for (size_t i = 0; i + 1 < breaks.size(); ++i) {
        rough[i] = gl15_raw(st, breaks[i], breaks[i + 1]);
        total_mass += std::fabs(rough[i]);
    }
    st.global_floor = 0.005 * cfg.rel_tol * total_mass;
    double value = 0.0;
    for (size_t i = 0; i + 1 < breaks.size(); ++i)
        value += adapt(st, breaks[i], breaks[i + 1], rough[i], 0);
    out.value = value;
    out.error = st.err;
    out.converged = st.converged;
    out.evals = st.evals;
    return out;
}

QuadResult integrate_to_infinity(const Fn1& f, double a, double scale,
                                 const QuadratureConfig& cfg) {
    if (!(scale > 0.0)) throw std::domain_error("integrate_to_infinity: scale must be > 0");
    QuadResult out;
    double lo = a, w = scale;
    for (int k = 0; k < cfg.max_tail_panels; ++k) {
        const QuadResult piece = integrate_adaptive(f, lo, lo + w, cfg);
        out += piece;
        if (k > 1 && std::fabs(piece.value) <= cfg.tail_eps * std::fabs(out.value) + cfg.abs_floor)
            return out;
        lo += w;
        w *= 2.0;
    }
    out.converged = false;
    return out;
}

QuadResult integrate_graded_to_zero(const Fn1& f, double b, const QuadratureConfig& cfg) {
    if (!(b > 0.0)) throw std::domain_error("integrate_graded_to_zero: b must be > 0");
    QuadResult out;
    double hi = b;
    for (int k = 0; k < cfg.max_tail_panels; ++k) {
        const double lo = hi * 0.5;
        const QuadResult piece = integrate_adaptive(f, lo, hi, cfg);
        out += piece;
        if (k > 1 && std::fabs(piece.value) <= cfg.tail_eps * std::fabs(out.value) + cfg.abs_floor)
            return out;
        if (lo < 1e-280) break;  // past any representable contribution
        hi = lo;
    }
    return out;
}

double log_integrate_panels(const Fn1& log_f, const std::vector<double>& breaks) {
    if (breaks.size() < 2) return -std::numeric_limits<double>::infinity();
    // Two passes per panel: locate the max of the log-integrand at the GL
    // nodes, then accumulate exp-shifted sums panel by panel.
    double gmax = -std::numeric_limits<double>::infinity();
    std::vector<double> panel_max(breaks.size() - 1, -std::numeric_limits<double>::infinity());
    std::vector<std::vector<double>> panel_logs(breaks.size() - 1);
    for (size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        auto& logs = panel_logs[i];
        logs.resize(15);
        for (int j = 0; j < 15; ++j) {
            logs[j] = log_f(c + h * kGL15Nodes[j]);
            panel_max[i] = std::max(panel_max[i], logs[j]);
        }
        gmax = std::max(gmax, panel_max[i]);
    }
    if (!std::isfinite(gmax)) return -std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double h = 0.5 * (breaks[i + 1] - breaks[i]);
        double s = 0.0;
        for (int j = 0; j < 15; ++j)
            s += kGL15Weights[j] * std::exp(panel_logs[i][j] - gmax);
        total += s * h;
    }
    return gmax + std::log(total);
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi > lo && n >= 2)) throw std::domain_error("log_grid: bad arguments");
    std::vector<double> g(n);
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) g[i] = lo * std::exp(i * step);
    g.back() = hi;
    return g;
}

std::vector<double> geometric_t_grid(double t_min, double t0, int per_decade) {
    if (!(t0 > 0.0 && t_min > 0.0 && t_min < t0))
        throw std::domain_error("geometric_t_grid: require 0 < t_min < t0");
    const double ratio = std::pow(10.0, 1.0 / per_decade);
    std::vector<double> g;
    for (double t = t0; t > t_min; t /= ratio) g.push_back(t);
    std::reverse(g.begin(), g.end());
    return g;
}

}  // namespace lagsem
