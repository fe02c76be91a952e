#pragma once

#include <stdexcept>
#include <string>

namespace lagsem {

// Truncation <z> = min{z,1}; governs the small-argument size of the scaled
// Bessel factor and of the decay weights.
inline double angle_bracket(double z) { return z < 1.0 ? z : 1.0; }

// Fixed analytic parameters of the Laguerre-type operator
//   L = -d^2/dy^2 + y^2 + (alpha^2 - 1/4)/y^2 + 2 mu
// together with the subordination order nu.  Eigenvalues are
// lambda_n = 4n + 2(alpha + 1 + mu).  The boundary case mu = -(alpha+1)
// makes lambda_0 = 0 and changes the logarithmic exponent of the decay
// weight; we track it explicitly.
struct SemigroupParams {
    double alpha = 0.0;  // alpha > -1
    double mu = 0.0;     // mu >= -(alpha+1)
    double nu = 0.5;     // nu > 0
    bool extreme_case = false;

    static constexpr double kExtremeTol = 1e-12;

    static SemigroupParams make(double alpha, double mu, double nu) {
        if (!(alpha > -1.0))
            throw std::domain_error("SemigroupParams: require alpha > -1, got " + std::to_string(alpha));
        if (!(mu >= -(alpha + 1.0) - kExtremeTol))
            throw std::domain_error("SemigroupParams: require mu >= -(alpha+1), got " + std::to_string(mu));
        if (!(nu > 0.0))
            throw std::domain_error("SemigroupParams: require nu > 0, got " + std::to_string(nu));
        SemigroupParams p;
        p.alpha = alpha;
        p.mu = mu;
        p.nu = nu;
        p.extreme_case = (mu + alpha + 1.0) < kExtremeTol;
        return p;
    }

    // mu at the exact boundary -(alpha+1), i.e. lambda_0 = 0.
    static SemigroupParams make_extreme(double alpha, double nu) {
        return make(alpha, -(alpha + 1.0), nu);
    }

    double eigenvalue(int n) const { return 4.0 * n + 2.0 * (alpha + 1.0 + mu); }

    // Eigenvalue of the square-mapped operators: n + (alpha+1+mu)/2.
    double half_system_eigenvalue(int n) const { return eigenvalue(n) / 4.0; }

    // The parameter m of the classical Laguerre-polynomial operator.
    double m_parameter() const { return (alpha + 1.0 + mu) / 2.0; }
};

// The five Laguerre-type systems.  BasePhi is the reference system
// (eigenfunctions phi_n, operator L); the others are reached through a
// multiplier a(y), optionally composed with the squaring isometry
// Af(x) = sqrt(2x) f(x^2).
enum class SystemTag { BasePhi, Psi, FrakL, SmallEll, LaguerrePoly };

struct SystemKind {
    SystemTag tag = SystemTag::BasePhi;

    bool uses_square_map() const {
        return tag == SystemTag::FrakL || tag == SystemTag::SmallEll ||
               tag == SystemTag::LaguerrePoly;
    }

    // Multiplier relative to the parent system: Psi relative to BasePhi,
    // SmallEll and LaguerrePoly relative to FrakL.  FrakL itself is pure
    // square map (multiplier 1).
    double multiplier_a(double y, double alpha) const;

    // Density of the system's reference measure against Lebesgue dy.
    double reference_density(double y, double alpha) const;

    const char* name() const {
        switch (tag) {
            case SystemTag::BasePhi: return "base_phi";
            case SystemTag::Psi: return "psi";
            case SystemTag::FrakL: return "frak_l";
            case SystemTag::SmallEll: return "small_ell";
            case SystemTag::LaguerrePoly: return "laguerre_poly";
        }
        return "?";
    }

    static SystemKind parse(const std::string& s);
};

}  // namespace lagsem
