#include "lagsem/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "lagsem/heat.hpp"
#include "lagsem/poisson.hpp"
#include "lagsem/quadrature.hpp"
#include "lagsem/report.hpp"
#include "lagsem/special.hpp"
#include "lagsem/transference.hpp"
#include "lagsem/weights.hpp"

namespace lagsem {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

SemigroupParams params_from(const ExperimentConfig& cfg) {
    const double alpha = cfg.num("alpha", 0.0);
    double mu = cfg.num("mu", 0.0);
    if (cfg.str("extreme", "0") == "1") mu = -(alpha + 1.0);
    return SemigroupParams::make(alpha, mu, cfg.num("nu", 0.5));
}

QuadratureConfig quad_from(const ExperimentConfig& cfg) {
    QuadratureConfig q;
    q.rel_tol = cfg.num("quad_rel_tol", 1e-9);
    return q;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    ExperimentConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("bad config line (expected key=value): " + t);
        cfg.kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return cfg;
}

void ExperimentConfig::apply_override(const std::string& key_eq_value) {
    const auto eq = key_eq_value.find('=');
    if (eq == std::string::npos)
        throw std::runtime_error("bad --set (expected key=value): " + key_eq_value);
    kv[trim(key_eq_value.substr(0, eq))] = trim(key_eq_value.substr(eq + 1));
}

std::string ExperimentConfig::str(const std::string& key, const std::string& fallback) const {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

double ExperimentConfig::num(const std::string& key, double fallback) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size())
        throw std::runtime_error("bad numeric config value for " + key + ": " + it->second);
    return v;
}

int ExperimentConfig::integer(const std::string& key, int fallback) const {
    return static_cast<int>(num(key, fallback));
}

std::uint64_t ExperimentConfig::seed(std::uint64_t fallback) const {
    const auto it = kv.find("seed");
    return it == kv.end() ? fallback : std::stoull(it->second);
}

std::vector<double> ExperimentConfig::num_list(const std::string& key,
                                               const std::string& fallback) const {
    const std::string raw = str(key, fallback);
    std::vector<double> out;
    std::istringstream is(raw);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

namespace {

void echo_config(std::ostream& out, const ExperimentConfig& cfg) {
    for (const auto& [k, v] : cfg.kv) out << "# " << k << "=" << v << "\n";
}

std::vector<double> grid_from(const ExperimentConfig& cfg) {
    const int n = cfg.integer("grid_n", 8);
    const double lo = cfg.num("grid_lo", 0.1), hi = cfg.num("grid_hi", 4.0);
    if (n <= 1) return {lo};
    return log_grid(lo, hi, n);
}

}  // namespace

// ---------------------------------------------------------------------------
// kernel: heat/Poisson kernel values against their oracles over a grid.

int run_kernel(const ExperimentConfig& cfg, std::ostream& out) {
    const SemigroupParams p = params_from(cfg);
    const QuadratureConfig quad = quad_from(cfg);
    const std::vector<double> ts = cfg.num_list("t_list", "0.05,0.2,1");
    const std::vector<double> grid = grid_from(cfg);
    const int series_n = cfg.integer("series_n", 80);

    echo_config(out, cfg);
    out << "t,x,y,heat,heat_series,series_tail,poisson,b_part,a_part,phi,ratio\n";
    bool all_ok = true;
    for (double t : ts)
        for (double x : grid)
            for (double y : grid) {
                const double hk = heat_kernel(p, t, x, y);
                const SeriesResult sr = heat_kernel_series(p, t, x, y, series_n);
                const PoissonEval pe = poisson_kernel_eval(p, t, x, y, quad);
                if (!pe.converged) {
                    out << "# numeric failure at t=" << fmt17(t) << " x=" << fmt17(x)
                        << " y=" << fmt17(y) << " estimate=" << fmt17(pe.error) << "\n";
                    return kExitNumericFailure;
                }
                const double phi = phi_weight({SystemTag::BasePhi}, p, y);
                const double ratio = std::exp(pe.log_value -
                                              log_phi_weight({SystemTag::BasePhi}, p, y));
                const double delta = std::fabs(hk - sr.value);
                const bool ok = delta <= std::max(1e-9 * std::fabs(hk), sr.tail_bound) &&
                                ratio > 0.0 && std::isfinite(ratio);
                all_ok = all_ok && ok;
                out << fmt17(t) << "," << fmt17(x) << "," << fmt17(y) << "," << fmt17(hk) << ","
                    << fmt17(sr.value) << "," << fmt17(sr.tail_bound) << "," << fmt17(pe.value)
                    << "," << fmt17(pe.b_part) << "," << fmt17(pe.a_part) << "," << fmt17(phi)
                    << "," << fmt17(ratio) << "\n";
            }
    out << "# pass=" << (all_ok ? 1 : 0) << "\n";
    return all_ok ? kExitPass : kExitNumericFailure;
}

// ---------------------------------------------------------------------------
// converge: |P_t f - f| (and the heat analogue) along t -> 0.

namespace {

TabulatedFunction make_datum(const std::string& name, const SemigroupParams& p) {
    if (name == "phi0") {
        return TabulatedFunction::from_callable(
            [&p](double y) { return eigenfunction_phi(p, 0, y); }, log_grid(1e-4, 12.0, 1200),
            Interp::LinearInLog);
    }
    if (name == "indicator") {
        // smoothed indicator of [1, 2]
        return TabulatedFunction::linear({0.90, 1.10, 1.90, 2.10}, {0.0, 1.0, 1.0, 0.0});
    }
    if (name == "growing") {
        // e^{y^2/2} / [(1+y)^{mu+3/2} log(e+y)^{2+nu}]
        auto logf = [&p](double y) {
            return 0.5 * y * y - (p.mu + 1.5) * std::log1p(y) -
                   (2.0 + p.nu) * std::log(std::log(std::exp(1.0) + y));
        };
        return TabulatedFunction::from_log_callable(logf, log_grid(1e-4, 34.0, 4000));
    }
    if (name == "inadmissible") {
        // e^{y^2}: outside L^1(Phi), the transform must be rejected
        return TabulatedFunction::from_log_callable([](double y) { return y * y; },
                                                    log_grid(1e-4, 34.0, 2000),
                                                    Extension::PowerTail, 2.0);
    }
    throw std::runtime_error("unknown datum: " + name);
}

}  // namespace

int run_converge(const ExperimentConfig& cfg, std::ostream& out) {
    const SemigroupParams p = params_from(cfg);
    const QuadratureConfig quad = quad_from(cfg);
    const std::vector<double> xs = cfg.num_list("x_list", "0.5,1,2");
    std::vector<double> ts = cfg.num_list("t_list", "0.05,0.025,0.0125");
    std::sort(ts.rbegin(), ts.rend());
    const double threshold = cfg.num("threshold", 1e-2);
    const TabulatedFunction f = make_datum(cfg.str("f", "phi0"), p);

    const PhiAdmissibility adm = check_admissible(f, p);
    if (!adm.admissible) {
        out << "# rejected: datum outside L^1(Phi)\n";
        return kExitAdmissibilityRejection;
    }

    echo_config(out, cfg);
    out << "x,t,poisson_transform,heat_transform,f_x,err_poisson,err_heat\n";
    bool all_ok = true;
    for (double x : xs) {
        const double fx = f(x);
        std::vector<double> errs;
        for (double t : ts) {
            const double pv = poisson_transform(p, t, f, x, quad, false).value;
            const double hv = heat_transform(p, t, f, x, quad).value;
            const double ep = std::fabs(pv - fx), eh = std::fabs(hv - fx);
            errs.push_back(ep);
            out << fmt17(x) << "," << fmt17(t) << "," << fmt17(pv) << "," << fmt17(hv) << ","
                << fmt17(fx) << "," << fmt17(ep) << "," << fmt17(eh) << "\n";
        }
        const size_t n = errs.size();
        const bool mono = n < 3 || (errs[n - 1] <= errs[n - 2] * (1.0 + 1e-9) &&
                                    errs[n - 2] <= errs[n - 3] * (1.0 + 1e-9));
        const bool small = errs.back() <= threshold * (1.0 + std::fabs(fx));
        all_ok = all_ok && mono && small;
    }
    out << "# pass=" << (all_ok ? 1 : 0) << "\n";
    return all_ok ? kExitPass : kExitNumericFailure;
}

// ---------------------------------------------------------------------------
// weights: the full two-weight pipeline, JSON report.

namespace {

struct NamedWeight {
    std::string name;
    std::function<double(double)> log_w;
};

NamedWeight make_weight(const std::string& name, double p) {
    if (name == "gauss")  // e^{p y^2/2}
        return {name, [p](double y) { return 0.5 * p * y * y; }};
    if (name == "poly_gauss")  // (1+y)^p e^{p y^2/2}
        return {name, [p](double y) { return p * std::log1p(y) + 0.5 * p * y * y; }};
    if (name == "one") return {name, [](double) { return 0.0; }};
    if (name == "cubic") return {name, [](double y) { return 3.0 * std::log1p(y); }};
    if (name == "power_gauss_quarter")  // y^{-0.3} e^{y^2/4}
        return {name, [](double y) { return -0.3 * std::log(y) + 0.25 * y * y; }};
    throw std::runtime_error("unknown weight: " + name);
}

}  // namespace

int run_weights(const ExperimentConfig& cfg, std::ostream& out) {
    using nlohmann::json;
    const SemigroupParams p = params_from(cfg);
    const QuadratureConfig quad = quad_from(cfg);
    const double pexp = cfg.num("p", 2.0);
    const double q_target = cfg.num("q", pexp + 0.5);
    const double eps = cfg.num("eps", 0.1);
    const double big_m = cfg.num("big_m", 2.0);
    const double t0 = cfg.num("t0", 0.5);
    const double y_max = cfg.num("y_max", 30.0);
    const int n_nodes = cfg.integer("n_nodes", 240);
    const int n_funcs = cfg.integer("n_funcs", 30);
    const int n_x = cfg.integer("n_x", 20);
    const std::uint64_t seed = cfg.seed();
    const NamedWeight w_sel = make_weight(cfg.str("w", "gauss"), pexp);

    json rep;
    rep["config"] = json::object();
    for (const auto& [k, v] : cfg.kv) rep["config"][k] = v;
    rep["config"]["w"] = w_sel.name;
    bool pass = true;

    const std::vector<double> nodes = log_grid(1e-4, y_max, n_nodes);
    const TabulatedFunction w =
        TabulatedFunction::weight_from_log_callable(w_sel.log_w, nodes);

    // membership of the input weight
    const MembershipResult w_mem =
        class_membership(w, WeightClassSpec::dp_phi(pexp, {SystemTag::BasePhi}), p);
    rep["membership"]["w_in_dp_phi"] = w_mem.member;
    rep["membership"]["w_dp_phi_norm"] = w_mem.norm;
    pass = pass && w_mem.member;

    // conjugated weight W = w e^{p x^2/2} and its local/exponential classes
    const TabulatedFunction W = w.map_log_values(
        [pexp](double y, double lw) { return lw + 0.5 * pexp * y * y; });
    const MembershipResult w0 =
        class_membership(W, WeightClassSpec::d0(pexp, p.alpha + 0.5), p);
    const MembershipResult wexp = class_membership(W, WeightClassSpec::dexp(pexp, 0.25), p);
    rep["membership"]["W_in_d0"] = w0.member;
    rep["membership"]["W_in_dexp"] = wexp.member;
    pass = pass && w0.member && wexp.member;

    // constructed weights
    const double n_v2 = cfg.num(
        "v2_exponent",
        std::ceil(weight_v2_threshold({SystemTag::BasePhi}, p, pexp, V2Flavor::Poisson)) + 1.0);
    const TabulatedFunction v2 =
        weight_v2({SystemTag::BasePhi}, p, pexp, V2Flavor::Poisson, n_v2, nodes);
    const TabulatedFunction v1 = weight_v1eps(w, {SystemTag::BasePhi}, p, pexp, eps, big_m);
    const TabulatedFunction v = weight_v_combined(v1, v2);
    const TabulatedFunction v_alt = weight_v_phi_w(w, {SystemTag::BasePhi}, p, pexp, eps);

    const MembershipResult v_mem =
        class_membership(v, WeightClassSpec::dp_phi(q_target, {SystemTag::BasePhi}), p);
    rep["membership"]["v_in_dq_phi"] = v_mem.member;
    rep["membership"]["q"] = q_target;
    pass = pass && v_mem.member;

    // Carleson-Jones propagation at the stated exponents plus 0.1 slack
    {
        const double pp = pexp / (pexp - 1.0);
        const double beta = p.alpha + 0.5;
        const CJWeights cj = carleson_jones(W, pexp, eps, big_m);
        const double q0 =
            pexp + eps * (pexp / pp) * std::fabs(1.0 + beta * pp) / (1.0 + beta) + 0.1;
        const double qe = pexp * (1.0 + eps) * big_m * big_m + 0.1;  // b = a
        const MembershipResult m0 = class_membership(cj.V_eps, WeightClassSpec::d0(q0, beta), p);
        const MembershipResult me =
            class_membership(cj.V_eps, WeightClassSpec::dexp(qe, 0.25), p);
        rep["propagation"]["d0_q"] = q0;
        rep["propagation"]["d0_member"] = m0.member;
        rep["propagation"]["dexp_q"] = qe;
        rep["propagation"]["dexp_member"] = me.member;
        pass = pass && m0.member && me.member;
    }

    // sup-ratio sweep ||P*_{t0} f||_{L^p(v)} / ||f||_{L^p(w)}
    auto sup_ratio = [&](int count, int nx) {
        const std::vector<double> x_nodes = log_grid(0.05, 8.0, nx);
        const std::vector<double> t_grid = geometric_t_grid(t0 / 100.0, t0);
        const std::vector<TabulatedFunction> fs =
            random_piecewise_linear(seed, count, 0.01, y_max);
        double best = 0.0;
        json rows = json::array();
        for (const TabulatedFunction& f : fs) {
            PoissonTransformTable table(p, f, x_nodes, t_grid.front(), quad);
            std::vector<double> sup_vals(x_nodes.size());
            for (size_t j = 0; j < x_nodes.size(); ++j)
                sup_vals[j] = table.sup_over_grid(t_grid, j);
            const TabulatedFunction psup = TabulatedFunction::linear(x_nodes, sup_vals);
            const double num = lp_norm(psup, v, pexp);
            const double den = lp_norm(f, w, pexp);
            const double ratio = den > 0.0 ? num / den : 0.0;
            rows.push_back(ratio);
            best = std::max(best, ratio);
        }
        return std::pair<double, json>(best, rows);
    };

    auto [c_fit, rows] = sup_ratio(n_funcs, n_x);
    auto [c_refit, rows2] = sup_ratio(n_funcs * 2, n_x * 2);
    const double drift = std::fabs(c_refit / c_fit - 1.0);
    rep["rows"] = rows;
    rep["fitted"]["sup_ratio"] = c_fit;
    rep["fitted"]["sup_ratio_refit"] = c_refit;
    rep["fitted"]["drift"] = drift;
    rep["fitted"]["v_alt_finite"] = true;
    for (double x : v_alt.nodes())
        if (!std::isfinite(v_alt.log_at(x))) rep["fitted"]["v_alt_finite"] = false;
    pass = pass && c_fit > 0.0 && std::isfinite(c_fit) && drift < 0.05 &&
           rep["fitted"]["v_alt_finite"].get<bool>();

    rep["pass"] = pass;
    out << rep.dump(2) << "\n";
    return pass ? kExitPass : kExitNumericFailure;
}

// ---------------------------------------------------------------------------
// transfer: kernel relations, eigenfunction transport, Phi consistency.

int run_transfer(const ExperimentConfig& cfg, std::ostream& out) {
    const SemigroupParams p = params_from(cfg);
    const QuadratureConfig quad = quad_from(cfg);
    const int n_samples = cfg.integer("n_samples", 12);
    std::mt19937_64 rng(cfg.seed());
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    echo_config(out, cfg);
    out << "check,system,t,x,y,lhs,rhs,delta,pass\n";
    bool all_ok = true;
    auto emit = [&](const std::string& check, const std::string& sys, double t, double x,
                    double y, double lhs, double rhs, double tol) {
        const double delta = std::fabs(lhs - rhs) / std::max({std::fabs(lhs), std::fabs(rhs),
                                                              1e-300});
        const bool ok = delta <= tol;
        all_ok = all_ok && ok;
        out << check << "," << sys << "," << fmt17(t) << "," << fmt17(x) << "," << fmt17(y)
            << "," << fmt17(lhs) << "," << fmt17(rhs) << "," << fmt17(delta) << ","
            << (ok ? 1 : 0) << "\n";
    };

    const std::vector<SystemKind> systems = {{SystemTag::Psi},
                                             {SystemTag::FrakL},
                                             {SystemTag::SmallEll},
                                             {SystemTag::LaguerrePoly}};
    // kernel relations: series oracle vs transferred quadrature kernel
    for (int i = 0; i < n_samples; ++i) {
        const double t = 0.5 + 1.5 * unif(rng);
        const double x = 0.4 + 1.8 * unif(rng);
        const double y = 0.4 + 1.8 * unif(rng);
        for (const SystemKind& sys : systems) {
            const double lhs = poisson_kernel_series(sys, p, t, x, y);
            const double rhs = transfer_poisson_kernel(sys, p, t, x, y, quad);
            emit("kernel_relation", sys.name(), t, x, y, lhs, rhs, 1e-6);
        }
    }
    // identity system: same code path, zero delta
    {
        const double t = 0.7, x = 1.1, y = 0.9;
        const double lhs = transfer_poisson_kernel({SystemTag::BasePhi}, p, t, x, y, quad);
        emit("kernel_relation", "base_phi", t, x, y, lhs, poisson_kernel(p, t, x, y, quad), 0.0);
    }
    // eigenfunction transport
    for (const SystemKind& sys : systems)
        for (int n = 0; n <= 6; n += 2)
            for (double y : {0.3, 1.0, 2.7}) {
                const double lhs = system_eigenfunction(sys, p, n, y);
                const double rhs = system_eigenfunction_via_maps(sys, p, n, y);
                emit("eigen_transport", sys.name(), 0.0, 0.0, y, lhs, rhs, 1e-10);
            }
    // Phi consistency
    const std::vector<double> y_grid = log_grid(1e-3, 20.0, 40);
    for (const SystemKind& sys : systems) {
        const BoundReport rep = phi_consistency(sys, p, y_grid);
        emit("phi_consistency", sys.name(), 0.0, 0.0, 0.0, 1.0 + rep.fitted.at("spread"), 1.0,
             1e-8);
    }
    out << "# pass=" << (all_ok ? 1 : 0) << "\n";
    return all_ok ? kExitPass : kExitNumericFailure;
}

}  // namespace lagsem
