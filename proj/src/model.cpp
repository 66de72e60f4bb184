#include "gapspectra/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gapspectra {

Sign sign_from_int(int v) {
    if (v == 1) return Sign::plus;
    if (v == -1) return Sign::minus;
    throw std::invalid_argument("sign must be +1 or -1");
}

TreeParams make_tree(int b) {
    if (b < 2) throw std::invalid_argument("branching number must be >= 2");
    TreeParams t;
    t.b = b;
    const double rb = std::sqrt(static_cast<double>(b));
    t.R = 0.5 * (rb + 1.0 / rb);
    t.theta = std::acos(1.0 / t.R);
    t.beta = std::log(static_cast<double>(b));
    return t;
}

long long multiplicity(const TreeParams& tree, int k) {
    if (k < 0) throw std::invalid_argument("multiplicity: k must be >= 0");
    if (k == 0) return 1;
    long long p = 1;
    for (int i = 1; i < k; ++i) {
        if (p > std::numeric_limits<long long>::max() / tree.b)
            throw std::overflow_error("multiplicity overflows 64 bits; use tree-level big sums");
        p *= tree.b;
    }
    return p * (tree.b - 1);
}

Interval make_interval(double r1, double r2) {
    if (!(r1 >= 0.0)) throw std::invalid_argument("interval must start at r1 >= 0");
    if (!(r1 < r2)) throw std::invalid_argument("interval requires r1 < r2");
    return Interval{r1, r2};
}

GapWindow make_gap_window(const TreeParams& tree, int l) {
    if (l < 0) throw std::invalid_argument("gap index must be >= 0");
    GapWindow w;
    w.l = l;
    if (l == 0) {
        w.lambda_minus = -kInf;
        w.lambda_plus = tree.theta * tree.theta;
    } else {
        const double lo = M_PI * l - tree.theta;
        const double hi = M_PI * l + tree.theta;
        w.lambda_minus = lo * lo;
        w.lambda_plus = hi * hi;
        w.mid = M_PI * l * M_PI * l;
    }
    return w;
}

Potential Potential::power(double gamma, double scale) {
    if (!(gamma > 0)) throw std::invalid_argument("power profile requires gamma > 0");
    if (!(scale >= 0)) throw std::invalid_argument("profile scale must be >= 0");
    Potential q;
    q.kind_ = ProfileKind::power;
    q.gamma_ = gamma;
    q.scale_ = scale;
    return q;
}

Potential Potential::exponential(double kappa, double scale) {
    if (!(kappa > 0)) throw std::invalid_argument("exponential profile requires kappa > 0");
    if (!(scale >= 0)) throw std::invalid_argument("profile scale must be >= 0");
    Potential q;
    q.kind_ = ProfileKind::exponential;
    q.kappa_ = kappa;
    q.scale_ = scale;
    return q;
}

Potential Potential::tabulated(std::vector<double> grid, std::vector<double> values,
                               bool extend_constant) {
    if (grid.size() < 2 || grid.size() != values.size())
        throw std::invalid_argument("tabulated profile needs matching grid/value arrays, size >= 2");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw std::invalid_argument("tabulated grid must be ascending");
    for (double v : values)
        if (!(v >= 0) || !std::isfinite(v))
            throw std::invalid_argument("tabulated profile values must be finite and >= 0");
    Potential q;
    q.kind_ = ProfileKind::tabulated;
    q.grid_ = std::move(grid);
    q.values_ = std::move(values);
    q.extend_constant_ = extend_constant;
    return q;
}

double Potential::gamma() const {
    if (kind_ != ProfileKind::power) throw std::logic_error("gamma: not a power profile");
    return gamma_;
}

double Potential::kappa() const {
    if (kind_ != ProfileKind::exponential) throw std::logic_error("kappa: not an exponential profile");
    return kappa_;
}

namespace {

// Index of the segment [grid[i], grid[i+1]] containing s, or -1 / grid size - 1
// beyond the ends.
std::size_t table_segment(const std::vector<double>& grid, double s) {
    auto it = std::upper_bound(grid.begin(), grid.end(), s);
    if (it == grid.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
    return std::min(i, grid.size() - 2);
}

} // namespace

double Potential::operator()(double t) const {
    if (!(t >= 0)) throw std::domain_error("potential evaluated at t < 0");
    const double s = t + shift_;
    switch (kind_) {
    case ProfileKind::power:
        return scale_ * std::pow(1.0 + s, -2.0 * gamma_);
    case ProfileKind::exponential:
        return scale_ * std::exp(-2.0 * kappa_ * s);
    case ProfileKind::tabulated: {
        if (s < grid_.front() - 1e-12 || s > grid_.back() + 1e-12) {
            if (extend_constant_ && s > grid_.back()) return values_.back();
            std::ostringstream os;
            os << "tabulated potential queried at t+k=" << s << " outside grid ["
               << grid_.front() << ", " << grid_.back() << "]";
            throw std::domain_error(os.str());
        }
        const std::size_t i = table_segment(grid_, s);
        const double w = (s - grid_[i]) / (grid_[i + 1] - grid_[i]);
        return values_[i] + std::clamp(w, 0.0, 1.0) * (values_[i + 1] - values_[i]);
    }
    }
    return 0;
}

double Potential::slope(double t) const {
    const double s = t + shift_;
    switch (kind_) {
    case ProfileKind::power:
        return scale_ * -2.0 * gamma_ * std::pow(1.0 + s, -2.0 * gamma_ - 1.0);
    case ProfileKind::exponential:
        return -2.0 * kappa_ * scale_ * std::exp(-2.0 * kappa_ * s);
    case ProfileKind::tabulated: {
        if (s > grid_.back()) {
            if (extend_constant_) return 0.0;
            throw std::domain_error("tabulated potential slope outside grid");
        }
        const std::size_t i = table_segment(grid_, s);
        return (values_[i + 1] - values_[i]) / (grid_[i + 1] - grid_[i]);
    }
    }
    return 0;
}

double Potential::tail_sup(double T) const {
    if (T < 0) T = 0;
    const double s = T + shift_;
    switch (kind_) {
    case ProfileKind::power:
        return scale_ * std::pow(1.0 + s, -2.0 * gamma_); // nonincreasing
    case ProfileKind::exponential:
        return scale_ * std::exp(-2.0 * kappa_ * s);
    case ProfileKind::tabulated: {
        double m = 0.0;
        if (s <= grid_.back()) {
            const std::size_t i0 = table_segment(grid_, s);
            m = (*this)(T);
            for (std::size_t i = i0 + 1; i < values_.size(); ++i) m = std::max(m, values_[i]);
        }
        if (extend_constant_) m = std::max(m, values_.back());
        return m;
    }
    }
    return 0;
}

Potential Potential::shifted(int m) const {
    if (m < 0) throw std::invalid_argument("shift must be >= 0");
    Potential q = *this;
    q.shift_ += m;
    return q;
}

Potential shift(const Potential& q, int k) { return q.shifted(k); }

std::string Potential::describe() const {
    std::ostringstream os;
    switch (kind_) {
    case ProfileKind::power: os << "power(gamma=" << gamma_ << ")"; break;
    case ProfileKind::exponential: os << "exp(kappa=" << kappa_ << ")"; break;
    case ProfileKind::tabulated: os << "table[" << grid_.size() << "]"; break;
    }
    if (scale_ != 1.0) os << "*" << scale_;
    if (shift_ != 0) os << " shifted by " << shift_;
    return os.str();
}

ScaleParams make_scale(const Potential& q, double g) {
    if (!(g > 0)) throw std::invalid_argument("coupling g must be > 0");
    ScaleParams s;
    s.g = g;
    switch (q.kind()) {
    case ProfileKind::power:
        s.alpha = std::pow(g, 1.0 / (2.0 * q.gamma()));
        break;
    case ProfileKind::exponential:
        if (!(g > 1.0))
            throw std::invalid_argument("exponential scale alpha = ln(g)/(2 kappa) needs g > 1");
        s.alpha = std::log(g) / (2.0 * q.kappa());
        break;
    case ProfileKind::tabulated:
        throw std::invalid_argument("tabulated profiles carry no decay scale alpha");
    }
    return s;
}

} // namespace gapspectra
