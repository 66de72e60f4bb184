#pragma once

#include "gapspectra/sturm.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace gapspectra {

using BigInt = boost::multiprecision::cpp_int;

/// ln of a nonnegative big integer (-inf for 0).
double log_big(const BigInt& v);

/// Thread-safe memo for per-k half-line counts. Renewal sweeps over exact
/// exponential profiles reuse shifted couplings heavily; a cache instance is
/// tied to one (tree, sign, profile) context by the caller.
class CountCache {
public:
    using Key = std::tuple<int, int, double, double, double>; // kind, k, g, l1, l2

    bool get(const Key& k, CountResult& out) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = map_.find(k);
        if (it == map_.end()) return false;
        out = it->second;
        return true;
    }
    void put(const Key& k, const CountResult& v) {
        std::lock_guard<std::mutex> lock(mu_);
        map_.emplace(k, v);
    }
    std::size_t size() const {
        std::lock_guard<std::mutex> lock(mu_);
        return map_.size();
    }

private:
    mutable std::mutex mu_;
    std::map<Key, CountResult> map_;
};

struct TreeOptions {
    int threads = 0; // <= 0: GAPSPECTRA_THREADS env var, else the OpenMP default;
                     // 1 runs the serial reference path
    bool keep_per_k = false;
    SturmOptions sturm{};
    CountCache* cache = nullptr;
};

int resolve_threads(int requested);

struct TreeCountResult {
    BigInt value;
    int kmax = 0;                 // per-k counts vanish for k >= kmax
    double truncation_radius = 0; // max over contributing k
    std::vector<long long> per_k; // populated when TreeOptions::keep_per_k
    std::vector<std::string> warnings;

    double ln_value() const { return log_big(value); }
};

/// Smallest k with g * sup q_k below the crossing distance; every per-k count
/// with k >= k_max is zero. Throws when lambda sits at a gap edge (or at the
/// mid eigenvalue) where no finite threshold exists.
int k_max(const TreeParams& tree, Sign sign, const Potential& q, double g,
          const GapWindow& window, double lambda);

/// Window variant: per-k window counts vanish for k >= the returned index.
int k_max_window(const TreeParams& tree, Sign sign, const Potential& q, double g,
                 const GapWindow& window, double lambda1, double lambda2);

/// M(lambda; tree operator) = M_0 + sum_{k>=1} (b^k - b^{k-1}) M_k with
/// M_k = M(lambda; A_{sign g q_k}) on the half-line.
TreeCountResult tree_M(const TreeParams& tree, Sign sign, const Potential& q, double g,
                       double lambda, const GapWindow& window, const TreeOptions& opts = {});

/// N(lambda1, lambda2; tree operator), same exponential weights.
TreeCountResult tree_N(const TreeParams& tree, Sign sign, const Potential& q, double g,
                       double lambda1, double lambda2, const GapWindow& window,
                       const TreeOptions& opts = {});

/// Flattened sums without the multiplicities n_k.
TreeCountResult tilde_M(const TreeParams& tree, Sign sign, const Potential& q, double g,
                        double lambda, const GapWindow& window, const TreeOptions& opts = {});
TreeCountResult tilde_N(const TreeParams& tree, Sign sign, const Potential& q, double g,
                        double lambda1, double lambda2, const GapWindow& window,
                        const TreeOptions& opts = {});

/// Geometric coupling grid with a fixed number of points per decade.
std::vector<double> geometric_grid(double g_min, double g_max, int points_per_decade);

} // namespace gapspectra
