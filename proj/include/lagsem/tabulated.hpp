#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace lagsem {

enum class Interp { LinearInLog, Linear };
enum class Extension { Zero, PowerTail };

// A function of one positive real variable held on a graded grid.
//
// LinearInLog stores ln f and interpolates it linearly in ln x (exact on pure
// powers); it requires f > 0.  Linear stores plain values with piecewise
// linear interpolation and admits sign changes.  Outside the node range the
// function is either zero or continued by a power law: on the right with the
// configured tail exponent, on the left with the slope of the first segment.
class TabulatedFunction {
public:
    TabulatedFunction() = default;

    static TabulatedFunction linear(std::vector<double> nodes, std::vector<double> values,
                                    Extension ext = Extension::Zero, double tail_exponent = 0.0);
    static TabulatedFunction positive(std::vector<double> nodes, std::vector<double> log_values,
                                      Extension ext = Extension::Zero, double tail_exponent = 0.0);
    // Positive tabulation continued by the power law of its last segment;
    // the right representation for weights, which must stay positive on all
    // of (0, inf).
    static TabulatedFunction positive_natural(std::vector<double> nodes,
                                              std::vector<double> log_values);

    // Sample a callable on the given nodes.  For LinearInLog the callable
    // must be strictly positive on the nodes.
    static TabulatedFunction from_callable(const std::function<double(double)>& f,
                                           const std::vector<double>& nodes, Interp interp,
                                           Extension ext = Extension::Zero,
                                           double tail_exponent = 0.0);
    // Sample a callable returning ln f directly (avoids under/overflow).
    static TabulatedFunction from_log_callable(const std::function<double(double)>& log_f,
                                               const std::vector<double>& nodes,
                                               Extension ext = Extension::Zero,
                                               double tail_exponent = 0.0);
    static TabulatedFunction weight_from_log_callable(
        const std::function<double(double)>& log_f, const std::vector<double>& nodes);

    double operator()(double x) const;
    // ln|f|(x); -inf where f vanishes.
    double log_at(double x) const;
    double sign_at(double x) const;

    const std::vector<double>& nodes() const { return nodes_; }
    Interp interp() const { return interp_; }
    Extension extension() const { return ext_; }
    double tail_exponent() const { return tail_exponent_; }
    bool positive_typed() const { return interp_ == Interp::LinearInLog; }
    double support_lo() const { return nodes_.front(); }
    double support_hi() const { return nodes_.back(); }
    bool same_nodes(const TabulatedFunction& o) const;

    // Exact integral of the interpolant (including extensions) over [a,b].
    double integral(double a, double b) const;
    // Same with |f|; equals integral() for positive-typed instances.
    double integral_abs(double a, double b) const;

    // Pointwise transforms that keep the node set.
    TabulatedFunction map_values(const std::function<double(double, double)>& g) const;
    // For positive-typed instances: new ln f = g(x, ln f).
    TabulatedFunction map_log_values(const std::function<double(double, double)>& g) const;

    // Two-column CSV with header "# nodes=<n> interp=<kind> ext=<kind>".
    void write_csv(std::ostream& os) const;
    static TabulatedFunction read_csv(std::istream& is);

private:
    std::vector<double> nodes_;
    std::vector<double> values_;    // Linear
    std::vector<double> logvals_;   // LinearInLog
    Interp interp_ = Interp::Linear;
    Extension ext_ = Extension::Zero;
    double tail_exponent_ = 0.0;

    mutable std::vector<double> prefix_abs_;  // cumulative integral of |f| over segments

    void validate() const;
    void build_prefix() const;
    size_t segment_of(double x) const;  // index i with nodes_[i] <= x <= nodes_[i+1]
    double segment_integral_abs(size_t i, double u, double v) const;
    double segment_integral(size_t i, double u, double v) const;
    double left_extension_integral(double a, double b) const;
    double right_extension_integral(double a, double b) const;
    double left_exponent() const;
};

}  // namespace lagsem
