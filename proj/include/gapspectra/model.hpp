#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace gapspectra {

/// Sign of the perturbation V = sign * g * q with q >= 0.
enum class Sign : int { plus = +1, minus = -1 };

inline int to_int(Sign s) { return static_cast<int>(s); }
Sign sign_from_int(int v);

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Geometry constants of the homogeneous metric tree with branching number b.
/// All derived values are fixed at construction.
struct TreeParams {
    int b = 2;        // branching number, >= 2
    double R = 0;     // (b^{1/2} + b^{-1/2}) / 2, > 1
    double theta = 0; // arccos(1/R), in (0, pi/2)
    double beta = 0;  // ln b
};

TreeParams make_tree(int b);

/// Multiplicity of the k-th half-line component: n_0 = 1, n_k = b^k - b^{k-1}.
/// Overflows past k ~ 62/log2(b); tree-level sums use big integers instead.
long long multiplicity(const TreeParams& tree, int k);

struct Interval {
    double r1 = 0.0;
    double r2 = kInf; // +inf for half-line problems

    bool bounded() const { return r2 < kInf; }
    double length() const { return r2 - r1; }
};

Interval make_interval(double r1, double r2);

/// Spectral gap of the whole-line periodic operator. Gap 0 is (-inf, theta^2);
/// gap l >= 1 is ((pi l - theta)^2, (pi l + theta)^2) with the simple half-line
/// eigenvalue (pi l)^2 sitting inside it.
struct GapWindow {
    int l = 0;
    double lambda_minus = -kInf;
    double lambda_plus = 0;
    std::optional<double> mid; // (pi l)^2 for l >= 1

    bool contains(double lambda) const {
        return lambda > lambda_minus && lambda < lambda_plus;
    }
    bool in_closure(double lambda) const {
        return lambda >= lambda_minus && lambda <= lambda_plus;
    }
};

GapWindow make_gap_window(const TreeParams& tree, int l);

enum class ProfileKind { power, exponential, tabulated };

/// Nonnegative decay profile q(t), t >= 0, together with an integer shift k
/// producing q_k(t) = q(t + k). The perturbation sign is carried separately;
/// counting operations take it explicitly.
///
/// Profiles:
///   power:       scale * (1 + t)^{-2 gamma},  gamma > 0
///   exponential: scale * exp(-2 kappa t),     kappa > 0
///   tabulated:   linear interpolation on a grid; queries beyond the grid are
///                errors unless extend_constant is set (then the last value).
class Potential {
public:
    static Potential power(double gamma, double scale = 1.0);
    static Potential exponential(double kappa, double scale = 1.0);
    static Potential tabulated(std::vector<double> grid, std::vector<double> values,
                               bool extend_constant = false);

    ProfileKind kind() const { return kind_; }
    double gamma() const;
    double kappa() const;
    double scale() const { return scale_; }
    int shift_k() const { return shift_; }
    bool extend_constant() const { return extend_constant_; }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }

    /// q_k(t) for t >= 0.
    double operator()(double t) const;

    /// d/dt q_k(t); for tabulated profiles the slope of the current segment.
    double slope(double t) const;

    /// sup_{t >= T} q_k(t). T = 0 gives the global sup.
    double tail_sup(double T) const;
    double sup() const { return tail_sup(0.0); }

    /// Shift by m >= 0 more units: (q_k)_m = q_{k+m}.
    Potential shifted(int m) const;

    /// True when the profile is exactly scale * e^{-2 kappa t}, so that
    /// q_k = e^{-2 kappa k} q and per-k counts reduce to rescaled couplings.
    bool exact_exponential() const { return kind_ == ProfileKind::exponential; }

    std::string describe() const;

private:
    Potential() = default;

    ProfileKind kind_ = ProfileKind::power;
    double gamma_ = 0, kappa_ = 0, scale_ = 1;
    int shift_ = 0;
    std::vector<double> grid_, values_;
    bool extend_constant_ = false;
};

Potential shift(const Potential& q, int k);

/// Coupling-dependent scales: alpha = g^{1/(2 gamma)} for power profiles,
/// alpha = ln(g)/(2 kappa) for exponential ones; beta_k = (k+1)/alpha.
struct ScaleParams {
    double g = 0;
    double alpha = 0;

    double beta_k(int k) const { return (k + 1) / alpha; }
};

ScaleParams make_scale(const Potential& q, double g);

} // namespace gapspectra
