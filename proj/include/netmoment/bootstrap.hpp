#pragma once

// Network bootstrap baselines for the distribution of the studentized
// moment: node sub-sampling without replacement and node re-sampling with
// replacement.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netmoment/error.hpp"
#include "netmoment/graph.hpp"
#include "netmoment/moments.hpp"
#include "netmoment/motif.hpp"
#include "netmoment/rng.hpp"

namespace netmoment {

class EmpiricalCdf {
public:
    EmpiricalCdf() = default;
    explicit EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
        std::sort(sorted_.begin(), sorted_.end());
    }

    std::size_t size() const noexcept { return sorted_.size(); }
    bool empty() const noexcept { return sorted_.empty(); }
    const std::vector<double>& sorted_samples() const noexcept { return sorted_; }

    /// Lower alpha-quantile: the smallest sample x with F(x) >= alpha.
    double quantile(double alpha) const {
        if (empty()) throw Error(ErrorKind::InvalidSize, "empty empirical CDF");
        if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::Parameter, "alpha must lie in (0,1]");
        const auto b = static_cast<double>(sorted_.size());
        auto k = static_cast<std::size_t>(std::ceil(alpha * b));
        k = std::clamp<std::size_t>(k, 1, sorted_.size());
        return sorted_[k - 1];
    }

private:
    std::vector<double> sorted_;
};

/// F(u) = #{samples <= u} / B.
inline double cdf_eval(const EmpiricalCdf& f, double u) {
    if (f.empty()) throw Error(ErrorKind::InvalidSize, "empty empirical CDF");
    const auto& s = f.sorted_samples();
    const auto it = std::upper_bound(s.begin(), s.end(), u);
    return static_cast<double>(it - s.begin()) / static_cast<double>(s.size());
}

enum class BootstrapScheme { Subsample, Resample };

inline const char* to_string(BootstrapScheme s) { return s == BootstrapScheme::Subsample ? "subsample" : "resample"; }

enum class ReplicateVariance { Projection, Jackknife };

struct BootstrapOptions {
    /// Variance estimator used inside each replicate.
    ReplicateVariance variance = ReplicateVariance::Projection;
    CostCaps caps;
};

struct BootstrapResult {
    EmpiricalCdf cdf;
    std::size_t requested = 0;
    /// Replicates with S* = 0, excluded from the CDF.
    std::size_t dropped = 0;
    double u_hat = 0.0;

    double drop_fraction() const noexcept {
        return requested == 0 ? 0.0 : static_cast<double>(dropped) / static_cast<double>(requested);
    }

    /// Throws when more than `limit` of the replicates were degenerate.
    void check_drop_rate(double limit = 0.1) const {
        if (drop_fraction() > limit) {
            throw Error(ErrorKind::Degeneracy, std::to_string(dropped) + " of " + std::to_string(requested) +
                                                   " bootstrap replicates were degenerate");
        }
    }
};

namespace detail {

inline std::optional<double> replicate_statistic(const AdjacencyMatrix& sub, const Motif& motif, double u_hat,
                                                 const BootstrapOptions& opts) {
    if (sub.size() < motif.nodes()) return std::nullopt;
    const auto c = count_motif(sub, motif, CountDepth::PerNode, opts.caps);
    if (std::all_of(c.per_node.begin(), c.per_node.end(), [&](auto v) { return v == c.per_node.front(); })) {
        return std::nullopt;
    }
    const std::size_t r = motif.nodes();
    const double u_star = static_cast<double>(c.total) / static_cast<double>(binomial(sub.size(), r));
    double s2 = 0.0;
    if (opts.variance == ReplicateVariance::Projection) {
        s2 = variance_estimator(local_projection_from_counts(c, r), r);
    } else {
        if (sub.size() < r + 1) return std::nullopt;
        const auto loo = leave_one_out_moments(c, r);
        std::vector<double> sq(loo.size());
        for (std::size_t i = 0; i < loo.size(); ++i) sq[i] = (loo[i] - u_star) * (loo[i] - u_star);
        const auto nd = static_cast<double>(sub.size());
        s2 = (nd - 1.0) / nd * sorted_sum(std::move(sq));
    }
    if (!(s2 > 0.0)) return std::nullopt;
    return (u_star - u_hat) / std::sqrt(s2);
}

template <typename Draw>
BootstrapResult run_bootstrap(const AdjacencyMatrix& a, const Motif& motif, std::size_t replicates,
                              const BootstrapOptions& opts, Draw&& draw) {
    if (replicates < 1) throw Error(ErrorKind::Parameter, "need at least one bootstrap replicate");
    BootstrapResult res;
    res.requested = replicates;
    res.u_hat = sample_moment(a, motif, opts.caps);
    std::vector<double> values;
    values.reserve(replicates);
    std::vector<std::size_t> nodes;
    for (std::size_t b = 0; b < replicates; ++b) {
        draw(b, nodes);
        const auto t = replicate_statistic(a.induced(nodes), motif, res.u_hat, opts);
        if (t) {
            values.push_back(*t);
        } else {
            ++res.dropped;
        }
    }
    res.cdf = EmpiricalCdf(std::move(values));
    return res;
}

}  // namespace detail

/// Studentized statistic of one replicate built from the listed nodes of `a`
/// (repeats allowed); empty when the replicate's S* is zero.
inline std::optional<double> bootstrap_replicate(const AdjacencyMatrix& a, const Motif& motif,
                                                 std::span<const std::size_t> nodes, double u_hat,
                                                 const BootstrapOptions& opts = {}) {
    return detail::replicate_statistic(a.induced(nodes), motif, u_hat, opts);
}

/// Scheme (a): each replicate keeps n_star distinct nodes drawn without
/// replacement and studentizes the induced moment around U_hat.
inline BootstrapResult subsample_distribution(const AdjacencyMatrix& a, const Motif& motif, std::size_t n_star,
                                              std::size_t replicates, std::uint64_t seed,
                                              const BootstrapOptions& opts = {}) {
    const std::size_t n = a.size();
    if (n_star < motif.nodes() || n_star >= n) {
        throw Error(ErrorKind::Parameter, "n_star must satisfy r <= n_star < n");
    }
    std::vector<std::size_t> pool(n);
    return detail::run_bootstrap(a, motif, replicates, opts, [&](std::size_t b, std::vector<std::size_t>& nodes) {
        RandomStream rs(seed, "subsample", b);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        // partial Fisher-Yates
        for (std::size_t k = 0; k < n_star; ++k) {
            const std::size_t j = k + static_cast<std::size_t>(rs.below(n - k));
            std::swap(pool[k], pool[j]);
        }
        nodes.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_star));
    });
}

/// Scheme (b): each replicate draws n node indices with replacement; repeated
/// indices are distinct nodes of the replicate that are never joined to each other.
inline BootstrapResult resample_distribution(const AdjacencyMatrix& a, const Motif& motif, std::size_t replicates,
                                             std::uint64_t seed, const BootstrapOptions& opts = {}) {
    const std::size_t n = a.size();
    if (n < motif.nodes()) throw Error(ErrorKind::InvalidSize, "network smaller than motif");
    return detail::run_bootstrap(a, motif, replicates, opts, [&](std::size_t b, std::vector<std::size_t>& nodes) {
        RandomStream rs(seed, "resample", b);
        nodes.resize(n);
        for (auto& v : nodes) v = static_cast<std::size_t>(rs.below(n));
    });
}

}  // namespace netmoment
