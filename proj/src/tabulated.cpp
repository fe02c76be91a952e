#include "lagsem/tabulated.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lagsem {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// integral of c (x/x0)^b over [u,v], 0 < u <= v
double power_integral(double c, double x0, double b, double u, double v) {
    if (c == 0.0 || v <= u) return 0.0;
    if (std::fabs(b + 1.0) < 1e-12)
        return c * x0 * std::log(v / u);
    return c * x0 / (b + 1.0) *
           (std::pow(v / x0, b + 1.0) - std::pow(u / x0, b + 1.0));
}
}  // namespace

TabulatedFunction TabulatedFunction::linear(std::vector<double> nodes, std::vector<double> values,
                                            Extension ext, double tail_exponent) {
    TabulatedFunction f;
    f.nodes_ = std::move(nodes);
    f.values_ = std::move(values);
    f.interp_ = Interp::Linear;
    f.ext_ = ext;
    f.tail_exponent_ = tail_exponent;
    f.validate();
    return f;
}

TabulatedFunction TabulatedFunction::positive(std::vector<double> nodes,
                                              std::vector<double> log_values, Extension ext,
                                              double tail_exponent) {
    TabulatedFunction f;
    f.nodes_ = std::move(nodes);
    f.logvals_ = std::move(log_values);
    f.interp_ = Interp::LinearInLog;
    f.ext_ = ext;
    f.tail_exponent_ = tail_exponent;
    f.validate();
    return f;
}

TabulatedFunction TabulatedFunction::from_callable(const std::function<double(double)>& f,
                                                   const std::vector<double>& nodes, Interp interp,
                                                   Extension ext, double tail_exponent) {
    if (interp == Interp::Linear) {
        std::vector<double> v(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i) v[i] = f(nodes[i]);
        return linear(nodes, std::move(v), ext, tail_exponent);
    }
    std::vector<double> lv(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
        const double y = f(nodes[i]);
        if (!(y > 0.0))
            throw std::domain_error("TabulatedFunction: LinearInLog requires positive values");
        lv[i] = std::log(y);
    }
    return positive(nodes, std::move(lv), ext, tail_exponent);
}

TabulatedFunction TabulatedFunction::from_log_callable(const std::function<double(double)>& log_f,
                                                       const std::vector<double>& nodes,
                                                       Extension ext, double tail_exponent) {
    std::vector<double> lv(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) lv[i] = log_f(nodes[i]);
    return positive(nodes, std::move(lv), ext, tail_exponent);
}

TabulatedFunction TabulatedFunction::positive_natural(std::vector<double> nodes,
                                                      std::vector<double> log_values) {
    const size_t n = nodes.size();
    if (n < 2) throw std::domain_error("TabulatedFunction: need at least 2 nodes");
    const double tail =
        (log_values[n - 1] - log_values[n - 2]) / std::log(nodes[n - 1] / nodes[n - 2]);
    return positive(std::move(nodes), std::move(log_values), Extension::PowerTail, tail);
}

TabulatedFunction TabulatedFunction::weight_from_log_callable(
    const std::function<double(double)>& log_f, const std::vector<double>& nodes) {
    std::vector<double> lv(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) lv[i] = log_f(nodes[i]);
    return positive_natural(nodes, std::move(lv));
}

void TabulatedFunction::validate() const {
    const size_t n = nodes_.size();
    if (n < 2) throw std::domain_error("TabulatedFunction: need at least 2 nodes");
    if (nodes_.front() <= 0.0) throw std::domain_error("TabulatedFunction: nodes must be positive");
    for (size_t i = 1; i < n; ++i)
        if (!(nodes_[i] > nodes_[i - 1]))
            throw std::domain_error("TabulatedFunction: nodes must be strictly increasing");
    if (interp_ == Interp::Linear && values_.size() != n)
        throw std::domain_error("TabulatedFunction: node/value size mismatch");
    if (interp_ == Interp::LinearInLog) {
        if (logvals_.size() != n)
            throw std::domain_error("TabulatedFunction: node/value size mismatch");
        for (double lv : logvals_)
            if (std::isnan(lv) || lv == std::numeric_limits<double>::infinity())
                throw std::domain_error("TabulatedFunction: bad log value");
    }
}

bool TabulatedFunction::same_nodes(const TabulatedFunction& o) const {
    return nodes_ == o.nodes_;
}

size_t TabulatedFunction::segment_of(double x) const {
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    size_t i = static_cast<size_t>(it - nodes_.begin());
    if (i == 0) return 0;
    if (i >= nodes_.size()) return nodes_.size() - 2;
    return i - 1;
}

double TabulatedFunction::left_exponent() const {
    if (interp_ == Interp::LinearInLog)
        return (logvals_[1] - logvals_[0]) / std::log(nodes_[1] / nodes_[0]);
    // slope of the first log-log segment where meaningful, else flat
    if (values_[0] > 0.0 && values_[1] > 0.0)
        return std::log(values_[1] / values_[0]) / std::log(nodes_[1] / nodes_[0]);
    return 0.0;
}

double TabulatedFunction::log_at(double x) const {
    if (!(x > 0.0)) throw std::domain_error("TabulatedFunction: argument must be positive");
    if (x < nodes_.front()) {
        if (ext_ == Extension::Zero) return kNegInf;
        const double l0 = interp_ == Interp::LinearInLog
                              ? logvals_[0]
                              : (values_[0] > 0 ? std::log(values_[0]) : kNegInf);
        return l0 + left_exponent() * std::log(x / nodes_.front());
    }
    if (x > nodes_.back()) {
        if (ext_ == Extension::Zero) return kNegInf;
        const double ln = interp_ == Interp::LinearInLog
                              ? logvals_.back()
                              : (values_.back() > 0 ? std::log(values_.back()) : kNegInf);
        return ln + tail_exponent_ * std::log(x / nodes_.back());
    }
    const size_t i = segment_of(x);
    if (interp_ == Interp::LinearInLog) {
        const double w = std::log(x / nodes_[i]) / std::log(nodes_[i + 1] / nodes_[i]);
        return logvals_[i] + w * (logvals_[i + 1] - logvals_[i]);
    }
    const double v = (*this)(x);
    return v == 0.0 ? kNegInf : std::log(std::fabs(v));
}

double TabulatedFunction::sign_at(double x) const {
    if (interp_ == Interp::LinearInLog) return 1.0;
    const double v = (*this)(x);
    return v < 0.0 ? -1.0 : 1.0;
}

double TabulatedFunction::operator()(double x) const {
    if (!(x > 0.0)) throw std::domain_error("TabulatedFunction: argument must be positive");
    if (x < nodes_.front() || x > nodes_.back()) {
        if (ext_ == Extension::Zero) return 0.0;
        const double lv = log_at(x);
        return lv == kNegInf ? 0.0 : std::exp(lv);
    }
    const size_t i = segment_of(x);
    if (interp_ == Interp::Linear) {
        const double w = (x - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
        return values_[i] + w * (values_[i + 1] - values_[i]);
    }
    return std::exp(log_at(x));
}

double TabulatedFunction::segment_integral(size_t i, double u, double v) const {
    if (v <= u) return 0.0;
    if (interp_ == Interp::Linear) {
        const double x0 = nodes_[i], x1 = nodes_[i + 1];
        const double d = (values_[i + 1] - values_[i]) / (x1 - x0);
        auto prim = [&](double x) {
            const double dx = x - x0;
            return values_[i] * dx + 0.5 * d * dx * dx;
        };
        return prim(v) - prim(u);
    }
    const double b = (logvals_[i + 1] - logvals_[i]) / std::log(nodes_[i + 1] / nodes_[i]);
    return power_integral(std::exp(logvals_[i]), nodes_[i], b, u, v);
}

double TabulatedFunction::segment_integral_abs(size_t i, double u, double v) const {
    if (interp_ == Interp::LinearInLog) return segment_integral(i, u, v);
    const double x0 = nodes_[i], x1 = nodes_[i + 1];
    const double y0 = values_[i], y1 = values_[i + 1];
    if (y0 * y1 >= 0.0) return std::fabs(segment_integral(i, u, v));
    // split the segment at the sign change
    const double xc = x0 + (x1 - x0) * (y0 / (y0 - y1));
    double acc = 0.0;
    if (u < xc) acc += std::fabs(segment_integral(i, u, std::min(v, xc)));
    if (v > xc) acc += std::fabs(segment_integral(i, std::max(u, xc), v));
    return acc;
}

double TabulatedFunction::left_extension_integral(double a, double b) const {
    if (ext_ == Extension::Zero || b <= a) return 0.0;
    const double c = interp_ == Interp::LinearInLog ? std::exp(logvals_[0]) : values_[0];
    return power_integral(c, nodes_.front(), left_exponent(), a, b);
}

double TabulatedFunction::right_extension_integral(double a, double b) const {
    if (ext_ == Extension::Zero || b <= a) return 0.0;
    const double c = interp_ == Interp::LinearInLog ? std::exp(logvals_.back()) : values_.back();
    return power_integral(c, nodes_.back(), tail_exponent_, a, b);
}

void TabulatedFunction::build_prefix() const {
    if (!prefix_abs_.empty()) return;
    prefix_abs_.resize(nodes_.size(), 0.0);
    for (size_t i = 0; i + 1 < nodes_.size(); ++i)
        prefix_abs_[i + 1] =
            prefix_abs_[i] + segment_integral_abs(i, nodes_[i], nodes_[i + 1]);
}

double TabulatedFunction::integral_abs(double a, double b) const {
    if (!(a > 0.0)) a = std::min(1e-300, nodes_.front());
    if (b <= a) return 0.0;
    build_prefix();
    double acc = 0.0;
    const double lo = nodes_.front(), hi = nodes_.back();
    acc += std::fabs(left_extension_integral(std::min(a, lo), std::min(b, lo)));
    acc += std::fabs(right_extension_integral(std::max(a, hi), std::max(b, hi)));
    const double u = std::max(a, lo), v = std::min(b, hi);
    if (v > u) {
        const size_t iu = segment_of(u), iv = segment_of(v);
        if (iu == iv) {
            acc += segment_integral_abs(iu, u, v);
        } else {
            acc += segment_integral_abs(iu, u, nodes_[iu + 1]);
            acc += prefix_abs_[iv] - prefix_abs_[iu + 1];
            acc += segment_integral_abs(iv, nodes_[iv], v);
        }
    }
    return acc;
}

double TabulatedFunction::integral(double a, double b) const {
    if (interp_ == Interp::LinearInLog) return integral_abs(a, b);
    if (!(a > 0.0)) a = std::min(1e-300, nodes_.front());
    if (b <= a) return 0.0;
    double acc = 0.0;
    const double lo = nodes_.front(), hi = nodes_.back();
    acc += left_extension_integral(std::min(a, lo), std::min(b, lo));
    acc += right_extension_integral(std::max(a, hi), std::max(b, hi));
    const double u = std::max(a, lo), v = std::min(b, hi);
    for (size_t i = segment_of(u); v > u && i <= segment_of(v) && i + 1 < nodes_.size(); ++i)
        acc += segment_integral(i, std::max(u, nodes_[i]), std::min(v, nodes_[i + 1]));
    return acc;
}

TabulatedFunction TabulatedFunction::map_values(
    const std::function<double(double, double)>& g) const {
    TabulatedFunction out = *this;
    out.prefix_abs_.clear();
    if (interp_ == Interp::Linear) {
        for (size_t i = 0; i < nodes_.size(); ++i) out.values_[i] = g(nodes_[i], values_[i]);
    } else {
        for (size_t i = 0; i < nodes_.size(); ++i) {
            const double v = g(nodes_[i], std::exp(logvals_[i]));
            if (!(v > 0.0))
                throw std::domain_error("map_values: positive-typed function went non-positive");
            out.logvals_[i] = std::log(v);
        }
    }
    return out;
}

TabulatedFunction TabulatedFunction::map_log_values(
    const std::function<double(double, double)>& g) const {
    if (interp_ != Interp::LinearInLog)
        throw std::domain_error("map_log_values: requires positive-typed function");
    TabulatedFunction out = *this;
    out.prefix_abs_.clear();
    for (size_t i = 0; i < nodes_.size(); ++i) out.logvals_[i] = g(nodes_[i], logvals_[i]);
    return out;
}

void TabulatedFunction::write_csv(std::ostream& os) const {
    char buf[64];
    os << "# nodes=" << nodes_.size()
       << " interp=" << (interp_ == Interp::LinearInLog ? "linear_in_log" : "linear");
    if (ext_ == Extension::Zero) {
        os << " ext=zero\n";
    } else {
        std::snprintf(buf, sizeof buf, "%.17g", tail_exponent_);
        os << " ext=power_tail:" << buf << "\n";
    }
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const double v = interp_ == Interp::LinearInLog ? std::exp(logvals_[i]) : values_[i];
        std::snprintf(buf, sizeof buf, "%.17g", nodes_[i]);
        os << buf << ",";
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << "\n";
    }
}

TabulatedFunction TabulatedFunction::read_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("# nodes=", 0) != 0)
        throw std::runtime_error("TabulatedFunction: bad CSV header");
    Interp interp = header.find("interp=linear_in_log") != std::string::npos
                        ? Interp::LinearInLog
                        : Interp::Linear;
    Extension ext = Extension::Zero;
    double tail = 0.0;
    const auto pt = header.find("ext=power_tail:");
    if (pt != std::string::npos) {
        ext = Extension::PowerTail;
        tail = std::strtod(header.c_str() + pt + 15, nullptr);
    }
    std::vector<double> nodes, vals;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b))
            throw std::runtime_error("TabulatedFunction: bad CSV row");
        nodes.push_back(std::strtod(a.c_str(), nullptr));
        vals.push_back(std::strtod(b.c_str(), nullptr));
    }
    if (interp == Interp::Linear) return linear(std::move(nodes), std::move(vals), ext, tail);
    std::vector<double> lv(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) {
        if (!(vals[i] > 0.0))
            throw std::runtime_error("TabulatedFunction: non-positive value in positive-typed CSV");
        lv[i] = std::log(vals[i]);
    }
    return positive(std::move(nodes), std::move(lv), ext, tail);
}

}  // namespace lagsem
