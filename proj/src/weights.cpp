#include "lagsem/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "lagsem/quadrature.hpp"
#include "lagsem/special.hpp"

namespace lagsem {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_e_over_bracket(double x) {  // log(e/<x>) = 1 - log(min(x,1)) >= 1
    return 1.0 + std::max(0.0, -std::log(x));
}

}  // namespace

double local_maximal_band(const TabulatedFunction& f, double band_lo, double band_hi, double x,
                          const std::vector<double>& r_grid) {
    if (!(x > 0.0)) throw std::domain_error("local_maximal: require x > 0");
    if (r_grid.empty()) throw std::domain_error("local_maximal: empty radius grid");
    // the r -> 0 limit of the averages is the point value itself
    double best = (x > band_lo && x < band_hi) ? std::fabs(f(x)) : 0.0;
    for (double r : r_grid) {
        if (!(r > 0.0)) continue;
        const double lo = std::max(x - r, band_lo);
        const double hi = std::min(x + r, band_hi);
        const double measure = (x + r) - std::max(x - r, 0.0);
        if (hi > lo && measure > 0.0)
            best = std::max(best, f.integral_abs(lo, hi) / measure);
    }
    return best;
}

double local_maximal(const TabulatedFunction& f, double big_m, double x,
                     const std::vector<double>& r_grid) {
    if (!(big_m > 1.0)) throw std::domain_error("local_maximal: require M > 1");
    return local_maximal_band(f, x / 2.0, big_m * x, x, r_grid);
}

std::vector<double> default_radius_grid(const TabulatedFunction& f, double big_m, double x,
                                        int n) {
    const auto& nodes = f.nodes();
    // local node spacing at x
    double gap = nodes[1] - nodes[0];
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    if (it != nodes.begin() && it != nodes.end()) {
        const size_t i = static_cast<size_t>(it - nodes.begin());
        gap = nodes[i] - nodes[i - 1];
    } else if (it == nodes.end()) {
        gap = nodes.back() - nodes[nodes.size() - 2];
    }
    const double r_lo = std::max(std::min(gap, x) * 0.5, 1e-12 * x);
    const double r_hi = 1.1 * std::max((big_m - 1.0) * x, 0.5 * x);
    return log_grid(r_lo, r_hi, n);
}

double rho_eps(double eps, double x) {
    if (!(eps > 0.0)) throw std::domain_error("rho_eps: require eps > 0");
    if (!(x > 0.0)) throw std::domain_error("rho_eps: require x > 0");
    return std::exp(-std::fabs(eps * std::log(x)));
}

WeightClassSpec WeightClassSpec::dp_phi(double p, SystemKind sys) {
    if (!(p > 1.0)) throw std::domain_error("WeightClassSpec: require p > 1");
    WeightClassSpec s;
    s.kind = WeightClassKind::DpPhi;
    s.p = p;
    s.system = sys;
    return s;
}
WeightClassSpec WeightClassSpec::dp_loc(double p) {
    if (!(p > 1.0)) throw std::domain_error("WeightClassSpec: require p > 1");
    WeightClassSpec s;
    s.kind = WeightClassKind::DpLoc;
    s.p = p;
    return s;
}
WeightClassSpec WeightClassSpec::d0(double p, double beta) {
    if (!(p > 1.0 && beta > -1.0)) throw std::domain_error("WeightClassSpec: bad D0 parameters");
    WeightClassSpec s;
    s.kind = WeightClassKind::D0;
    s.p = p;
    s.beta = beta;
    return s;
}
WeightClassSpec WeightClassSpec::dexp(double p, double a) {
    if (!(p > 1.0 && a > 0.0)) throw std::domain_error("WeightClassSpec: bad Dexp parameters");
    WeightClassSpec s;
    s.kind = WeightClassKind::DExp;
    s.p = p;
    s.a = a;
    return s;
}

namespace {

// log integral of exp(log_g) over [a,b] on a geometric ladder.
double window_log_integral(const std::function<double(double)>& log_g, double a, double b) {
    std::vector<double> breaks{a};
    for (double v = a * 2.0; v < b; v *= 2.0) breaks.push_back(v);
    breaks.push_back(b);
    return log_integrate_panels(log_g, breaks);
}

struct ProbeResult {
    double log_value = kNegInf;
    bool divergent = false;
};

double logsum(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Window-doubling divergence probe.  Contributions of successive dyadic
// windows are tracked directly: geometrically rising contributions mean the
// integrand outruns the window (divergence); decaying contributions settle
// by geometric extrapolation.  Slowly varying log factors can push the
// contributions up for a handful of windows, hence the k >= 4 guard.  An
// undecided integral at the window cap is declared divergent (a documented
// heuristic; no finite procedure decides the boundary cases).
ProbeResult probe_dyadic(const std::function<double(double, double)>& window_log,
                         const std::function<double(double)>& next_window, double w0, double w1,
                         int cap, int min_rises) {
    double cur = window_log(w0, w1);
    double prev_added = kNegInf;
    // the moving boundary: w1 when extending upward, w0 when extending down
    double edge = next_window(w1) > w1 ? w1 : w0;
    for (int k = 0; k < cap; ++k) {
        const double next = next_window(edge);
        const double added = window_log(std::min(edge, next), std::max(edge, next));
        const double merged = logsum(cur, added);
        const double growth = std::exp(merged - cur) - 1.0;
        if (added == kNegInf || growth < 1e-12) return {merged, false};
        if (prev_added > kNegInf) {
            const double rho = std::exp(added - prev_added);
            if (rho >= 1.5 && k >= min_rises) return {merged, true};
            if (rho < 1.0) {
                const double log_remaining = added + std::log(rho / (1.0 - rho));
                if (std::exp(log_remaining - merged) < 1e-8)
                    return {logsum(merged, log_remaining), false};
            }
        }
        prev_added = added;
        cur = merged;
        edge = next;
    }
    return {cur, true};
}

// At infinity a geometrically rising window is divergence outright; near zero
// slowly varying log factors may push the first few windows up, so a longer
// rise is required before giving up.
ProbeResult probe_upper(const std::function<double(double)>& log_g, double lo) {
    auto window = [&](double a, double b) { return window_log_integral(log_g, a, b); };
    return probe_dyadic(window, [](double e) { return e * 2.0; }, lo, std::max(8.0, 2.0 * lo),
                        40, 1);
}

ProbeResult probe_lower(const std::function<double(double)>& log_g, double hi) {
    auto window = [&](double a, double b) { return window_log_integral(log_g, a, b); };
    return probe_dyadic(window, [](double e) { return e * 0.5; }, hi * 0.5, hi, 100, 4);
}

}  // namespace

MembershipResult class_membership(const TabulatedFunction& w, const WeightClassSpec& spec,
                                  const SemigroupParams& params) {
    if (w.extension() == Extension::Zero)
        throw std::domain_error(
            "class_membership: a weight must carry a power-tail extension (w > 0 on (0,inf))");
    const double p = spec.p;
    const double pp = p / (p - 1.0);  // p'
    auto log_w_conj = [&](double y) { return -pp / p * w.log_at(y); };

    MembershipResult out;
    switch (spec.kind) {
        case WeightClassKind::DpPhi: {
            auto g = [&](double y) {
                return log_w_conj(y) + pp * log_phi_weight(spec.system, params, y);
            };
            const ProbeResult up = probe_upper(g, 1.0);
            const ProbeResult down = probe_lower(g, 1.0);
            out.member = !up.divergent && !down.divergent;
            if (out.member) out.norm = std::exp(logsum(up.log_value, down.log_value) / pp);
            return out;
        }
        case WeightClassKind::DpLoc: {
            const double I = std::exp(
                window_log_integral(log_w_conj, w.support_lo(), w.support_hi()));
            out.member = std::isfinite(I);
            out.norm = I;
            return out;
        }
        case WeightClassKind::D0: {
            auto g = [&](double y) {
                return log_w_conj(y) + spec.beta * pp * std::log(angle_bracket(y));
            };
            const ProbeResult down = probe_lower(g, 1.0);
            out.member = !down.divergent;
            if (out.member) out.norm = std::exp(down.log_value / pp);
            return out;
        }
        case WeightClassKind::DExp: {
            auto g = [&](double y) { return log_w_conj(y) - spec.a * pp * y * y; };
            const ProbeResult up = probe_upper(g, 1.0);
            out.member = !up.divergent;
            if (out.member) out.norm = std::exp(up.log_value / pp);
            return out;
        }
    }
    return out;
}

CJWeights carleson_jones(const TabulatedFunction& W, double p, double eps, double big_m) {
    if (!(p > 1.0 && eps > 0.0 && big_m > 1.0))
        throw std::domain_error("carleson_jones: require p > 1, eps > 0, M > 1");
    SemigroupParams dummy = SemigroupParams::make(0.0, 0.0, 0.5);
    const MembershipResult loc = class_membership(W, WeightClassSpec::dp_loc(p), dummy);
    if (!loc.member)
        throw AdmissibilityError("carleson_jones: W^{-p'/p} not locally integrable");

    const double conj_pow = -1.0 / (p - 1.0);  // -p'/p
    const TabulatedFunction g =
        W.map_log_values([&](double, double lw) { return conj_pow * lw; });
    CJWeights out;
    out.p = p;
    out.eps = eps;
    out.big_m = big_m;
    const auto& nodes = W.nodes();
    std::vector<double> logV(nodes.size()), logVe(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
        const double m = local_maximal(g, big_m, nodes[i], default_radius_grid(g, big_m, nodes[i]));
        const double v = std::pow(m, -(p - 1.0));  // [..]^{-p/p'}
        logV[i] = std::log(v);
        logVe[i] = std::log(v * rho_eps(eps, v));
    }
    out.V = TabulatedFunction::positive_natural(nodes, std::move(logV));
    out.V_eps = TabulatedFunction::positive_natural(nodes, std::move(logVe));
    return out;
}

double weight_v2_threshold(SystemKind sys, const SemigroupParams& params, double p,
                           V2Flavor flavor) {
    if (flavor == V2Flavor::Heat) return 1.0;
    switch (sys.tag) {
        case SystemTag::BasePhi:
        case SystemTag::Psi:
            return 1.0 + p * std::fabs(params.mu + 0.5);
        case SystemTag::FrakL:
        case SystemTag::SmallEll:
            return 1.0 + 0.5 * p * (std::fabs(params.mu + 0.5) - 0.5);
        case SystemTag::LaguerrePoly:
            return 1.0 + p * (params.m_parameter() + std::fabs(params.alpha + 0.5));
    }
    return 1.0;
}

TabulatedFunction weight_v2(SystemKind sys, const SemigroupParams& params, double p,
                            V2Flavor flavor, double n_exponent,
                            const std::vector<double>& nodes) {
    if (!(p > 1.0)) throw std::domain_error("weight_v2: require p > 1");
    const double threshold = weight_v2_threshold(sys, params, p, flavor);
    if (!(n_exponent >= threshold))
        throw std::domain_error("weight_v2: exponent below the system threshold");
    const double a = params.alpha;
    auto logv2 = [&](double x) -> double {
        const double lb = std::log(angle_bracket(x));
        const double llog = -2.0 * std::log(log_e_over_bracket(x));
        if (flavor == V2Flavor::Heat)
            return ((a + 1.5) * p - 1.0) * lb + llog - n_exponent * std::log1p(x);
        switch (sys.tag) {
            case SystemTag::BasePhi:
                return ((a + 1.5) * p - 1.0) * lb + llog - 0.5 * p * x * x -
                       n_exponent * std::log1p(x);
            case SystemTag::Psi:
                return ((2.0 * a + 2.0) * p - 1.0) * lb + llog - 0.5 * p * x * x -
                       n_exponent * std::log1p(x);
            case SystemTag::FrakL:
                return ((0.5 * a + 1.0) * p - 1.0) * lb + llog - 0.5 * p * x -
                       n_exponent * std::log1p(x);
            case SystemTag::SmallEll:
                return 0.5 * a * p * std::log(x) + ((0.5 * a + 1.0) * p - 1.0) * lb + llog -
                       0.5 * p * x - n_exponent * std::log1p(x);
            case SystemTag::LaguerrePoly:
                return ((a + 1.0) * p - 1.0) * lb + llog - p * x - n_exponent * std::log1p(x);
        }
        return kNegInf;
    };
    std::vector<double> lv(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) lv[i] = logv2(nodes[i]);
    return TabulatedFunction::positive_natural(nodes, std::move(lv));
}

TabulatedFunction weight_v1eps(const TabulatedFunction& w, SystemKind sys,
                               const SemigroupParams& params, double p, double eps,
                               double big_m) {
    if (!(p > 1.0 && eps > 0.0 && big_m > 1.0))
        throw std::domain_error("weight_v1eps: require p > 1, eps > 0, M > 1");
    const MembershipResult mem = class_membership(w, WeightClassSpec::dp_phi(p, sys), params);
    if (!mem.member) throw AdmissibilityError("weight_v1eps: w outside D_p(Phi)");

    const double pp = p / (p - 1.0);
    const bool square_system = sys.uses_square_map();
    const double band_m = square_system ? big_m * big_m : big_m;
    // exponential profile of the system: gaussian for the base/psi pair,
    // linear exponential for the square-mapped systems
    auto log_expo = [&](double y) -> double {
        switch (sys.tag) {
            case SystemTag::BasePhi:
            case SystemTag::Psi: return -0.5 * y * y;
            case SystemTag::FrakL:
            case SystemTag::SmallEll: return -0.5 * y;
            case SystemTag::LaguerrePoly: return -y;
        }
        return 0.0;
    };
    const TabulatedFunction g = w.map_log_values(
        [&](double y, double lw) { return lw / (1.0 - p) + pp * log_expo(y); });

    const auto& nodes = w.nodes();
    std::vector<double> lv(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
        const double x = nodes[i];
        const double m = local_maximal(g, band_m, x, default_radius_grid(g, band_m, x));
        const double script_v = std::pow(m, 1.0 - p);
        const double nu_pow = square_system ? p * params.nu : 2.0 * p * params.nu;
        lv[i] = p * log_expo(x) - nu_pow * std::log1p(x) + std::log(script_v) +
                std::log(rho_eps(eps, script_v));
    }
    return TabulatedFunction::positive_natural(nodes, std::move(lv));
}

TabulatedFunction weight_v_combined(const TabulatedFunction& v1, const TabulatedFunction& v2) {
    if (!v1.same_nodes(v2))
        throw std::domain_error("weight_v_combined: node sets differ");
    std::vector<double> lv(v1.nodes().size());
    for (size_t i = 0; i < v1.nodes().size(); ++i) {
        const double x = v1.nodes()[i];
        lv[i] = std::min(v1.log_at(x), v2.log_at(x));
    }
    return TabulatedFunction::positive_natural(v1.nodes(), std::move(lv));
}

TabulatedFunction weight_v_phi_w(const TabulatedFunction& w, SystemKind sys,
                                 const SemigroupParams& params, double p, double eps, int n0,
                                 int n1, int n2) {
    if (!(p > 1.0 && eps > 0.0)) throw std::domain_error("weight_v_phi_w: require p > 1, eps > 0");
    const MembershipResult mem = class_membership(w, WeightClassSpec::dp_phi(p, sys), params);
    if (!mem.member) throw AdmissibilityError("weight_v_phi_w: w outside D_p(Phi)");
    if (n0 < 0)
        n0 = static_cast<int>(
            std::ceil(2.0 + p * (std::fabs(params.mu + 0.5) + params.alpha + 1.5)));

    const double pp = p / (p - 1.0);
    const TabulatedFunction g = w.map_log_values([&](double y, double lw) {
        return -lw / (p - 1.0) + pp * log_phi_weight(sys, params, y);
    });
    const double big_m = 4.0;  // band parameter of the maximal function
    const auto& nodes = w.nodes();
    std::vector<double> lv(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
        const double x = nodes[i];
        const double lphi = log_phi_weight(sys, params, x);
        const double m = local_maximal(g, big_m, x, default_radius_grid(g, big_m, x));
        const double logS = -(p - 1.0) * std::log(m);  // ln [m]^{-p/p'}
        const double S = std::exp(logS);
        const double log_upsilon = eps * n1 * std::log(angle_bracket(x)) -
                                   n2 * std::log1p(x) + std::log(rho_eps(eps, S));
        const double branch1 = p * lphi + logS + log_upsilon;
        const double branch2 = (p - 1.0) * std::log(angle_bracket(x)) -
                               2.0 * std::log(log_e_over_bracket(x)) + p * lphi -
                               n0 * std::log1p(x);
        lv[i] = std::min(branch1, branch2);
    }
    return TabulatedFunction::positive_natural(nodes, std::move(lv));
}

double lp_norm(const TabulatedFunction& f, const TabulatedFunction& weight, double p) {
    if (!(p >= 1.0)) throw std::domain_error("lp_norm: require p >= 1");
    auto log_g = [&](double y) { return p * f.log_at(y) + weight.log_at(y); };

    double lo = std::min(f.support_lo(), weight.support_lo());
    double hi = std::max(f.support_hi(), weight.support_hi());
    if (f.extension() == Extension::Zero) {
        lo = std::max(lo, f.support_lo());
        hi = std::min(hi, f.support_hi());
    }
    if (weight.extension() == Extension::Zero) {
        lo = std::max(lo, weight.support_lo());
        hi = std::min(hi, weight.support_hi());
    }
    if (!(hi > lo)) return 0.0;

    std::vector<double> breaks;
    breaks.push_back(lo);
    auto add_nodes = [&](const std::vector<double>& ns) {
        for (double n : ns)
            if (n > lo && n < hi) breaks.push_back(n);
    };
    add_nodes(f.nodes());
    add_nodes(weight.nodes());
    for (double v = lo * 2.0; v < hi; v *= 2.0) breaks.push_back(v);
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    double logI = log_integrate_panels(log_g, breaks);

    // both tails open: extend until settled
    if (f.extension() == Extension::PowerTail && weight.extension() == Extension::PowerTail) {
        for (int k = 0; k < 24; ++k) {
            const double hi2 = hi * 2.0;
            const double piece = window_log_integral(log_g, hi, hi2);
            const double m = std::max(logI, piece);
            const double merged = m + std::log(std::exp(logI - m) + std::exp(piece - m));
            if (std::exp(merged - logI) - 1.0 < 1e-12) {
                logI = merged;
                break;
            }
            if (k == 23) throw NumericFailure("lp_norm: divergent tail", std::exp(piece));
            logI = merged;
            hi = hi2;
        }
    }
    return std::exp(logI / p);
}

std::vector<TabulatedFunction> random_piecewise_linear(std::uint64_t seed, int count,
                                                       double knot_lo, double knot_hi,
                                                       double value_max) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> n_knots(10, 40);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double llo = std::log(knot_lo), lhi = std::log(knot_hi);
    std::vector<TabulatedFunction> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        const int k = n_knots(rng);
        std::set<double> knots;
        while (static_cast<int>(knots.size()) < k)
            knots.insert(std::exp(llo + (lhi - llo) * unif(rng)));
        std::vector<double> nodes(knots.begin(), knots.end());
        std::vector<double> values(nodes.size());
        for (double& v : values) v = value_max * unif(rng);
        out.push_back(TabulatedFunction::linear(std::move(nodes), std::move(values)));
    }
    return out;
}

namespace {

double cj_sup_ratio(const std::function<double(double)>& W_callable, double p, double eps,
                    double big_m, std::uint64_t seed, int n_funcs, double y_max, int n_nodes) {
    const std::vector<double> nodes = log_grid(1e-4, y_max, n_nodes);
    const TabulatedFunction W = TabulatedFunction::weight_from_log_callable(
        [&](double y) { return std::log(W_callable(y)); }, nodes);
    const CJWeights cj = carleson_jones(W, p, eps, big_m);
    const std::vector<TabulatedFunction> fs =
        random_piecewise_linear(seed, n_funcs, 0.01, y_max);
    double sup_ratio = 0.0;
    for (const TabulatedFunction& f : fs) {
        std::vector<double> lm(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i) {
            const double m =
                local_maximal(f, big_m, nodes[i], default_radius_grid(f, big_m, nodes[i]));
            lm[i] = m;
        }
        const TabulatedFunction Mf = TabulatedFunction::linear(nodes, std::move(lm));
        const double num = lp_norm(Mf, cj.V_eps, p);
        const double den = lp_norm(f, W, p);
        if (den > 0.0) sup_ratio = std::max(sup_ratio, num / den);
    }
    return sup_ratio;
}

}  // namespace

FittedConstant carleson_jones_experiment(const std::function<double(double)>& W_callable,
                                         double p, double eps, double big_m,
                                         std::uint64_t seed, int n_funcs, double y_max,
                                         int n_nodes) {
    FittedConstant out;
    out.fitted = cj_sup_ratio(W_callable, p, eps, big_m, seed, n_funcs, y_max, n_nodes);
    out.refitted =
        cj_sup_ratio(W_callable, p, eps, big_m, seed, n_funcs * 2, y_max, n_nodes * 2);
    out.drift = std::fabs(out.refitted / out.fitted - 1.0);
    out.pass = out.fitted > 0.0 && std::isfinite(out.fitted) && out.drift < 0.05;
    return out;
}

}  // namespace lagsem
