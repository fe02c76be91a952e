#include "lagsem/transference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lagsem/special.hpp"
#include "lagsem/weights.hpp"

namespace lagsem {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

TabulatedFunction square_map(const TabulatedFunction& f) {
    const auto& nodes = f.nodes();
    std::vector<double> new_nodes(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) new_nodes[i] = std::sqrt(nodes[i]);
    // Af(x) = sqrt(2x) f(x^2): value at sqrt(u_i) from the value at u_i
    if (f.positive_typed()) {
        std::vector<double> lv(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i)
            lv[i] = 0.5 * std::log(2.0 * new_nodes[i]) + f.log_at(nodes[i]);
        return TabulatedFunction::positive(std::move(new_nodes), std::move(lv), f.extension(),
                                           2.0 * f.tail_exponent() + 0.5);
    }
    std::vector<double> v(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i)
        v[i] = std::sqrt(2.0 * new_nodes[i]) * f(nodes[i]);
    return TabulatedFunction::linear(std::move(new_nodes), std::move(v), f.extension(),
                                     2.0 * f.tail_exponent() + 0.5);
}

TabulatedFunction square_map_inverse(const TabulatedFunction& g) {
    const auto& nodes = g.nodes();
    std::vector<double> new_nodes(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) new_nodes[i] = nodes[i] * nodes[i];
    // A^{-1}g(y) = (4y)^{-1/4} g(sqrt y)
    if (g.positive_typed()) {
        std::vector<double> lv(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i)
            lv[i] = -0.25 * std::log(4.0 * new_nodes[i]) + g.log_at(nodes[i]);
        return TabulatedFunction::positive(std::move(new_nodes), std::move(lv), g.extension(),
                                           0.5 * g.tail_exponent() - 0.25);
    }
    std::vector<double> v(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i)
        v[i] = std::pow(4.0 * new_nodes[i], -0.25) * g(nodes[i]);
    return TabulatedFunction::linear(std::move(new_nodes), std::move(v), g.extension(),
                                     0.5 * g.tail_exponent() - 0.25);
}

double system_eigenvalue(SystemKind sys, const SemigroupParams& p, int n) {
    return sys.uses_square_map() ? p.half_system_eigenvalue(n) : p.eigenvalue(n);
}

double system_eigenfunction(SystemKind sys, const SemigroupParams& p, int n, double y) {
    if (!(y > 0.0)) throw std::domain_error("system_eigenfunction: require y > 0");
    switch (sys.tag) {
        case SystemTag::BasePhi:
            return eigenfunction_phi(p, n, y);
        case SystemTag::Psi:
            return std::pow(y, -p.alpha - 0.5) * eigenfunction_phi(p, n, y);
        case SystemTag::FrakL: {
            const double lag = laguerre_normalized(p.alpha, n, y)[n];
            if (lag == 0.0) return 0.0;
            return std::copysign(
                std::exp(0.5 * p.alpha * std::log(y) - 0.5 * y + std::log(std::fabs(lag))), lag);
        }
        case SystemTag::SmallEll: {
            const double lag = laguerre_normalized(p.alpha, n, y)[n];
            if (lag == 0.0) return 0.0;
            return std::copysign(std::exp(-0.5 * y + std::log(std::fabs(lag))), lag);
        }
        case SystemTag::LaguerrePoly:
            return laguerre_normalized(p.alpha, n, y)[n];
    }
    return 0.0;
}

double system_eigenfunction_via_maps(SystemKind sys, const SemigroupParams& p, int n, double y) {
    switch (sys.tag) {
        case SystemTag::BasePhi:
            return eigenfunction_phi(p, n, y);
        case SystemTag::Psi:
            return sys.multiplier_a(y, p.alpha) * eigenfunction_phi(p, n, y);
        case SystemTag::FrakL:
            return std::pow(4.0 * y, -0.25) * eigenfunction_phi(p, n, std::sqrt(y));
        case SystemTag::SmallEll:
        case SystemTag::LaguerrePoly:
            return sys.multiplier_a(y, p.alpha) * std::pow(4.0 * y, -0.25) *
                   eigenfunction_phi(p, n, std::sqrt(y));
    }
    return 0.0;
}

namespace {

// f multiplied by exp(log_m(y)), preserving the representation.
TabulatedFunction multiply_log(const TabulatedFunction& f,
                               const std::function<double(double)>& log_m) {
    if (f.positive_typed())
        return f.map_log_values([&](double y, double lv) { return lv + log_m(y); });
    return f.map_values([&](double y, double v) { return v * std::exp(log_m(y)); });
}

}  // namespace

double transfer_poisson(SystemKind sys, const SemigroupParams& p, double t,
                        const TabulatedFunction& f, double x, const QuadratureConfig& quad) {
    if (!(t > 0.0 && x > 0.0)) throw std::domain_error("transfer_poisson: require t, x > 0");
    const PhiAdmissibility adm = check_admissible(f, p, sys);
    if (!adm.admissible)
        throw AdmissibilityError("transfer_poisson: datum outside L^1(Phi) of the system");
    const double a = p.alpha;
    switch (sys.tag) {
        case SystemTag::BasePhi:
            return poisson_transform(p, t, f, x, quad, false).value;
        case SystemTag::Psi: {
            const TabulatedFunction g =
                multiply_log(f, [a](double y) { return (a + 0.5) * std::log(y); });
            return std::pow(x, -a - 0.5) * poisson_transform(p, t, g, x, quad, false).value;
        }
        case SystemTag::FrakL: {
            const TabulatedFunction g = square_map(f);
            return std::pow(4.0 * x, -0.25) *
                   poisson_transform(p, t / 2.0, g, std::sqrt(x), quad, false).value;
        }
        case SystemTag::SmallEll: {
            const TabulatedFunction g =
                square_map(multiply_log(f, [a](double y) { return 0.5 * a * std::log(y); }));
            return std::pow(x, -0.5 * a) * std::pow(4.0 * x, -0.25) *
                   poisson_transform(p, t / 2.0, g, std::sqrt(x), quad, false).value;
        }
        case SystemTag::LaguerrePoly: {
            const TabulatedFunction g = square_map(
                multiply_log(f, [a](double y) { return 0.5 * a * std::log(y) - 0.5 * y; }));
            return std::pow(x, -0.5 * a) * std::exp(0.5 * x) * std::pow(4.0 * x, -0.25) *
                   poisson_transform(p, t / 2.0, g, std::sqrt(x), quad, false).value;
        }
    }
    return 0.0;
}

double poisson_kernel_series(SystemKind sys, const SemigroupParams& p, double t, double x,
                             double y, int n_max, double rel_tail) {
    if (!(t > 0.0 && x > 0.0 && y > 0.0))
        throw std::domain_error("poisson_kernel_series: require t, x, y > 0");
    const int cap = n_max >= 0 ? n_max : 2000;
    const int block = 64;
    double sum = 0.0, sup_x = 0.0, sup_y = 0.0;
    int n = 0;
    int quiet = 0;  // consecutive terms below the tail target
    while (n <= cap) {
        const int hi = std::min(cap, n + block - 1);
        for (int m = n; m <= hi; ++m) {
            const double ex = system_eigenfunction(sys, p, m, x);
            const double ey = system_eigenfunction(sys, p, m, y);
            const double lam = system_eigenvalue(sys, p, m);
            const double F = lam > 0.0 ? subordination_multiplier_partial(p.nu, t, lam, 0.0,
                                                                          std::numeric_limits<double>::infinity())
                                       : 1.0;
            sum += F * ex * ey;
            sup_x = std::max(sup_x, std::fabs(ex));
            sup_y = std::max(sup_y, std::fabs(ey));
            const double bound = F * sup_x * sup_y;
            if (n_max < 0) {
                quiet = bound < rel_tail * std::fabs(sum) ? quiet + 1 : 0;
                if (quiet >= 4 && m >= 16) return sum;
            }
        }
        n = hi + 1;
    }
    return sum;
}

double transfer_poisson_kernel(SystemKind sys, const SemigroupParams& p, double t, double x,
                               double y, const QuadratureConfig& quad) {
    const double a = p.alpha;
    switch (sys.tag) {
        case SystemTag::BasePhi:
            return poisson_kernel(p, t, x, y, quad);
        case SystemTag::Psi:
            return std::pow(x * y, -a - 0.5) * poisson_kernel(p, t, x, y, quad);
        case SystemTag::FrakL:
            return std::pow(16.0 * x * y, -0.25) *
                   poisson_kernel(p, t / 2.0, std::sqrt(x), std::sqrt(y), quad);
        case SystemTag::SmallEll:
            return std::pow(x * y, -0.5 * a) * std::pow(16.0 * x * y, -0.25) *
                   poisson_kernel(p, t / 2.0, std::sqrt(x), std::sqrt(y), quad);
        case SystemTag::LaguerrePoly:
            return std::pow(x * y, -0.5 * a) * std::exp(0.5 * (x + y)) *
                   std::pow(16.0 * x * y, -0.25) *
                   poisson_kernel(p, t / 2.0, std::sqrt(x), std::sqrt(y), quad);
    }
    return 0.0;
}

BoundReport phi_consistency(SystemKind sys, const SemigroupParams& p,
                            const std::vector<double>& y_grid) {
    BoundReport rep;
    rep.input_names = {"y"};
    rep.meta["system"] = sys.name();
    const double a = p.alpha;
    auto log_image = [&](double y) -> double {
        const SystemKind base{SystemTag::BasePhi};
        switch (sys.tag) {
            case SystemTag::BasePhi:
                return log_phi_weight(base, p, y);
            case SystemTag::Psi:
                return (a + 0.5) * std::log(y) + log_phi_weight(base, p, y);
            case SystemTag::FrakL:
                return -0.25 * std::log(4.0 * y) + log_phi_weight(base, p, std::sqrt(y));
            case SystemTag::SmallEll:
                return 0.5 * a * std::log(y) - 0.25 * std::log(4.0 * y) +
                       log_phi_weight(base, p, std::sqrt(y));
            case SystemTag::LaguerrePoly:
                return 0.5 * a * std::log(y) - 0.5 * y - 0.25 * std::log(4.0 * y) +
                       log_phi_weight(base, p, std::sqrt(y));
        }
        return kNegInf;
    };

    double lo = std::numeric_limits<double>::infinity(), hi = kNegInf;
    for (double y : y_grid) {
        const double lp = log_phi_weight(sys, p, y);
        const double li = log_image(y);
        const double lr = lp - li;
        lo = std::min(lo, lr);
        hi = std::max(hi, lr);
        BoundRow row;
        row.inputs = {y};
        row.computed = std::exp(lp);
        row.reference = std::exp(li);
        row.ratio = std::exp(lr);
        row.pass = std::isfinite(lr);
        rep.rows.push_back(row);
    }
    const double spread = std::exp(hi - lo) - 1.0;
    rep.fitted["ratio"] = std::exp(0.5 * (hi + lo));
    rep.fitted["spread"] = spread;
    rep.pass = std::isfinite(spread) && spread < 1e-8;
    return rep;
}

std::pair<double, double> local_maximal_transport_check(const TabulatedFunction& g, double big_m,
                                                        double x) {
    if (!(x > 0.0 && big_m > 1.0))
        throw std::domain_error("local_maximal_transport_check: require x > 0, M > 1");
    // h(y) = g(y^2) on the square-rooted node set
    const auto& nodes = g.nodes();
    std::vector<double> hn(nodes.size()), hv(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
        hn[i] = std::sqrt(nodes[i]);
        hv[i] = g(nodes[i]);
    }
    const TabulatedFunction h = TabulatedFunction::linear(std::move(hn), std::move(hv));
    const double rx = std::sqrt(x);
    const double lhs = local_maximal(h, big_m, rx, default_radius_grid(h, big_m, rx));
    // the change of variables widens the band to (x/4, M^2 x)
    const double m2 = big_m * big_m;
    const double rhs = local_maximal_band(g, x / 4.0, m2 * x, x,
                                          default_radius_grid(g, std::max(m2, 1.35), x));
    return {lhs, rhs};
}

}  // namespace lagsem
