#include "lagsem/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lagsem {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Lanczos coefficients, g = 607/128, n = 15 (Godfrey's set).  Good for a
// relative error of about 1e-15 over the positive axis.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr double kLanczos[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("log_gamma: require x > 0, got " + std::to_string(x));
    double acc = kLanczos[0];
    for (int k = 1; k < 15; ++k) acc += kLanczos[k] / (x - 1.0 + k);
    const double base = x + kLanczosG - 0.5;
    return 0.5 * std::log(2.0 * kPi) + (x - 0.5) * std::log(base) - base + std::log(acc);
}

namespace {

// Power series of e^{-z} I_alpha(z); all terms positive.  The leading term
// carries the e^{-z} damping in log space, the rest follow by the
// multiplicative recurrence t_{k+1} = t_k z^2 / (4 (k+1)(k+alpha+1)).
double bessel_i_scaled_series(double alpha, double z) {
    double term = std::exp(alpha * std::log(z / 2.0) - log_gamma(alpha + 1.0) - z);
    double sum = term;
    const double z24 = z * z / 4.0;
    for (int k = 0; k < 400; ++k) {
        term *= z24 / ((k + 1.0) * (k + 1.0 + alpha));
        sum += term;
        if (k > 2 && term < sum * 1e-18) break;
    }
    return sum;
}

// Asymptotic expansion e^{-z} I_alpha(z) ~ (2 pi z)^{-1/2} sum_k t_k,
// t_0 = 1, t_k = -t_{k-1} (mu - (2k-1)^2)/(8 z k), mu = 4 alpha^2.
// Truncated at the smallest term; the omitted reflection piece is of size
// e^{-2z}, below 1e-12 for z >= 15.
double bessel_i_scaled_asymptotic(double alpha, double z) {
    const double mu = 4.0 * alpha * alpha;
    double term = 1.0, sum = 1.0;
    double prev = std::numeric_limits<double>::max();
    for (int k = 1; k <= 60; ++k) {
        term *= -(mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * z * k);
        const double mag = std::fabs(term);
        if (mag >= prev) break;  // divergent tail reached
        sum += term;
        prev = mag;
        if (mag < 1e-18 * std::fabs(sum)) break;
    }
    return sum / std::sqrt(2.0 * kPi * z);
}

inline double bessel_crossover(double alpha) {
    return std::max(15.0, 2.0 * alpha * alpha);
}

}  // namespace

double bessel_i_scaled(double alpha, double z) {
    if (!(alpha > -1.0))
        throw std::domain_error("bessel_i_scaled: require alpha > -1");
    if (z < 0.0)
        throw std::domain_error("bessel_i_scaled: require z >= 0, got " + std::to_string(z));
    if (z == 0.0) {
        if (alpha == 0.0) return 1.0;
        if (alpha > 0.0) return 0.0;
        return std::numeric_limits<double>::infinity();
    }
    return z <= bessel_crossover(alpha) ? bessel_i_scaled_series(alpha, z)
                                        : bessel_i_scaled_asymptotic(alpha, z);
}

double bI(double alpha, double z) {
    if (z < 0.0)
        throw std::domain_error("bI: require z >= 0");
    if (z == 0.0) {
        if (alpha > -0.5) return 0.0;
        if (alpha == -0.5) return std::sqrt(2.0 / kPi);
        throw std::domain_error("bI: no finite limit at z = 0 for alpha < -1/2");
    }
    return std::sqrt(z) * bessel_i_scaled(alpha, z);
}

double log_bI(double alpha, double z) {
    if (!(z > 0.0))
        throw std::domain_error("log_bI: require z > 0");
    if (z <= bessel_crossover(alpha)) {
        // small z: factor out the leading power z^{alpha+1/2}/(2^alpha Gamma(alpha+1))
        // so the log never sees an underflowed product
        const double lead =
            (alpha + 0.5) * std::log(z) - alpha * std::log(2.0) - log_gamma(alpha + 1.0) - z;
        const double z24 = z * z / 4.0;
        double term = 1.0, rest = 1.0;  // sum_k (z^2/4)^k / (k! (alpha+1)...(alpha+k))
        for (int k = 0; k < 400; ++k) {
            term *= z24 / ((k + 1.0) * (k + 1.0 + alpha));
            rest += term;
            if (k > 2 && term < rest * 1e-18) break;
        }
        return lead + std::log(rest);
    }
    return 0.5 * std::log(z) + std::log(bessel_i_scaled_asymptotic(alpha, z));
}

std::pair<double, double> bI_bracket_range(double alpha, double z_lo, double z_hi, int n_grid) {
    if (!(z_lo > 0.0 && z_hi > z_lo)) throw std::domain_error("bI_bracket_range: bad range");
    double lo = std::numeric_limits<double>::max(), hi = 0.0;
    const double step = std::log(z_hi / z_lo) / (n_grid - 1);
    for (int i = 0; i < n_grid; ++i) {
        const double z = z_lo * std::exp(i * step);
        const double ratio =
            std::exp(log_bI(alpha, z) - (alpha + 0.5) * std::log(angle_bracket(z)));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    return {lo, hi};
}

std::vector<double> laguerre_normalized(double alpha, int n_max, double x) {
    if (n_max < 0)
        throw std::domain_error("laguerre_normalized: require n_max >= 0");
    if (x < 0.0)
        throw std::domain_error("laguerre_normalized: require x >= 0");
    if (!(alpha > -1.0))
        throw std::domain_error("laguerre_normalized: require alpha > -1");
    std::vector<double> out(n_max + 1);
    // classical recurrence (n+1) L_{n+1} = (2n+1+alpha-x) L_n - (n+alpha) L_{n-1}
    double lm1 = 0.0, l = 1.0;
    for (int n = 0; n <= n_max; ++n) {
        out[n] = l * std::exp(0.5 * (log_gamma(n + 1.0) - log_gamma(n + alpha + 1.0)));
        const double lp1 = ((2.0 * n + 1.0 + alpha - x) * l - (n + alpha) * lm1) / (n + 1.0);
        lm1 = l;
        l = lp1;
    }
    return out;
}

std::vector<double> eigenfunction_phi_seq(const SemigroupParams& p, int n_max, double y) {
    if (!(y > 0.0))
        throw std::domain_error("eigenfunction_phi: require y > 0");
    const std::vector<double> lag = laguerre_normalized(p.alpha, n_max, y * y);
    // log prefactor keeps the gaussian factor from underflowing prematurely
    const double lpre = 0.5 * std::log(2.0) + (p.alpha + 0.5) * std::log(y) - 0.5 * y * y;
    std::vector<double> out(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        const double a = std::fabs(lag[n]);
        out[n] = (a == 0.0) ? 0.0
                            : std::copysign(std::exp(lpre + std::log(a)), lag[n]);
    }
    return out;
}

double eigenfunction_phi(const SemigroupParams& p, int n, double y) {
    if (n == 0) {
        if (!(y > 0.0)) throw std::domain_error("eigenfunction_phi: require y > 0");
        return std::exp(0.5 * std::log(2.0) + (p.alpha + 0.5) * std::log(y) - 0.5 * y * y -
                        0.5 * log_gamma(p.alpha + 1.0));
    }
    return eigenfunction_phi_seq(p, n, y)[n];
}

double SystemKind::multiplier_a(double y, double alpha) const {
    switch (tag) {
        case SystemTag::BasePhi: return 1.0;
        case SystemTag::Psi: return std::pow(y, -alpha - 0.5);
        case SystemTag::FrakL: return 1.0;
        case SystemTag::SmallEll: return std::pow(y, -alpha / 2.0);
        case SystemTag::LaguerrePoly: return std::pow(y, -alpha / 2.0) * std::exp(y / 2.0);
    }
    return 1.0;
}

double SystemKind::reference_density(double y, double alpha) const {
    const double a = multiplier_a(y, alpha);
    return 1.0 / (a * a);
}

SystemKind SystemKind::parse(const std::string& s) {
    if (s == "base_phi" || s == "base") return {SystemTag::BasePhi};
    if (s == "psi") return {SystemTag::Psi};
    if (s == "frak_l") return {SystemTag::FrakL};
    if (s == "small_ell") return {SystemTag::SmallEll};
    if (s == "laguerre_poly" || s == "laguerre") return {SystemTag::LaguerrePoly};
    throw std::invalid_argument("unknown system: " + s);
}

}  // namespace lagsem
