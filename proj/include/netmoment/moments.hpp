#pragma once

// Sample network moments as U-statistics over r-node subsets, and the
// empirical Hoeffding projections used for studentization and for the
// Edgeworth coefficients.
//
// Everything is counted in 64-bit integers first: for each motif we need
//   total        #{r-subsets S : h(A_S) = 1}
//   per_node[i]  #{S containing i : h(A_S) = 1}
//   per_pair[ij] #{S containing i and j : h(A_S) = 1}
// and all estimators are ratios of these counts.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "netmoment/error.hpp"
#include "netmoment/graph.hpp"
#include "netmoment/motif.hpp"

namespace netmoment {

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

/// Limits on the combinatorial work a single call may do.
struct CostCaps {
    /// Generic subset enumeration visits at most this many r-subsets.
    std::uint64_t max_subsets = 100'000'000;
    /// Pair projections that need a full subset pass (generic motifs with r >= 4)
    /// are refused beyond this many nodes.
    std::size_t pair_projection_node_cap = 256;
    /// Ignore both limits.
    bool override_caps = false;
};

/// Dense symmetric n x n matrix, row-major.
struct SymmetricMatrix {
    std::size_t n = 0;
    std::vector<double> values;

    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t size) : n(size), values(size * size, 0.0) {}

    double operator()(std::size_t i, std::size_t j) const noexcept { return values[i * n + j]; }
    void set(std::size_t i, std::size_t j, double v) noexcept {
        values[i * n + j] = v;
        values[j * n + i] = v;
    }
};

struct MotifCounts {
    std::size_t n = 0;
    std::uint64_t total = 0;
    std::vector<std::uint64_t> per_node;
    /// Row-major n x n, symmetric, zero diagonal. Empty unless requested.
    std::vector<std::uint64_t> per_pair;

    std::uint64_t pair(std::size_t i, std::size_t j) const noexcept { return per_pair[i * n + j]; }
};

enum class CountDepth { Total, PerNode, PerPair };

namespace detail {

inline void check_size(const AdjacencyMatrix& a, const Motif& motif) {
    if (a.size() < motif.nodes()) {
        throw Error(ErrorKind::InvalidSize, "network has " + std::to_string(a.size()) + " nodes but motif needs " +
                                                std::to_string(motif.nodes()));
    }
}

/// Enumerates all r-subsets in lexicographic order, building the subgraph's
/// pair mask incrementally and pruning branches that cannot reach s edges.
class SubsetEnumerator {
public:
    SubsetEnumerator(const AdjacencyMatrix& a, const Motif& motif, CountDepth depth, MotifCounts& out)
        : a_(a), motif_(motif), r_(motif.nodes()), depth_(depth), out_(out) {}

    void run() { descend(0, 0, 0, 0); }

private:
    void descend(std::size_t level, std::size_t start, std::uint32_t mask, std::size_t edges) {
        const std::size_t n = a_.size();
        if (level == r_) {
            if (motif_.contained_in(mask)) record();
            return;
        }
        if (level >= kMaxMotifNodes) return;
        // pairs touching a node at this level or deeper are still undecided
        const std::size_t remaining_pairs = pair_count(r_) - pair_count(level);
        if (edges + remaining_pairs < motif_.edges()) return;
        for (std::size_t v = start; v + (r_ - level) <= n; ++v) {
            std::uint32_t m = mask;
            std::size_t e = edges;
            for (std::size_t k = 0; k < level; ++k) {
                if (a_.has_edge(chosen_[k], v)) {
                    m |= 1u << pair_bit(k, level, r_);
                    ++e;
                }
            }
            chosen_[level] = v;
            descend(level + 1, v + 1, m, e);
        }
    }

    void record() {
        ++out_.total;
        if (depth_ == CountDepth::Total) return;
        for (std::size_t k = 0; k < r_; ++k) ++out_.per_node[chosen_[k]];
        if (depth_ == CountDepth::PerNode) return;
        const std::size_t n = out_.n;
        for (std::size_t k = 0; k < r_; ++k) {
            for (std::size_t l = k + 1; l < r_; ++l) {
                ++out_.per_pair[chosen_[k] * n + chosen_[l]];
                ++out_.per_pair[chosen_[l] * n + chosen_[k]];
            }
        }
    }

    const AdjacencyMatrix& a_;
    const Motif& motif_;
    std::size_t r_;
    CountDepth depth_;
    MotifCounts& out_;
    std::array<std::size_t, kMaxMotifNodes> chosen_{};
};

/// Triangles through each node via sorted neighbor-list intersection over
/// oriented edges i < j < k.
inline std::vector<std::uint64_t> triangles_per_node(const AdjacencyMatrix& a, std::uint64_t& total) {
    const std::size_t n = a.size();
    std::vector<std::uint64_t> t(n, 0);
    total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto ni = a.neighbors(i);
        for (std::uint32_t j : ni) {
            if (j <= i) continue;
            const auto nj = a.neighbors(j);
            // merge over neighbors k > j
            auto p = std::upper_bound(ni.begin(), ni.end(), j);
            auto q = std::upper_bound(nj.begin(), nj.end(), j);
            while (p != ni.end() && q != nj.end()) {
                if (*p < *q) {
                    ++p;
                } else if (*q < *p) {
                    ++q;
                } else {
                    ++total;
                    ++t[i];
                    ++t[j];
                    ++t[*p];
                    ++p;
                    ++q;
                }
            }
        }
    }
    return t;
}

}  // namespace detail

/// Integer motif counts at the requested depth, using closed forms for the
/// edge, triangle and V-shape and subset enumeration otherwise.
inline MotifCounts count_motif(const AdjacencyMatrix& a, const Motif& motif, CountDepth depth,
                               const CostCaps& caps = {}) {
    detail::check_size(a, motif);
    const std::size_t n = a.size();
    MotifCounts c;
    c.n = n;
    if (depth != CountDepth::Total) c.per_node.assign(n, 0);
    if (depth == CountDepth::PerPair) c.per_pair.assign(n * n, 0);

    auto common = [&](std::size_t i, std::size_t j) { return a.common_neighbors(i, j); };

    switch (motif.kind()) {
        case Motif::Kind::Edge: {
            c.total = a.edge_count();
            if (depth != CountDepth::Total) {
                for (std::size_t i = 0; i < n; ++i) c.per_node[i] = a.degree(i);
            }
            if (depth == CountDepth::PerPair) {
                for (std::size_t i = 0; i < n; ++i) {
                    for (auto j : a.neighbors(i)) c.per_pair[i * n + j] = 1;
                }
            }
            return c;
        }
        case Motif::Kind::Triangle: {
            auto t = detail::triangles_per_node(a, c.total);
            if (depth != CountDepth::Total) c.per_node = std::move(t);
            if (depth == CountDepth::PerPair) {
                for (std::size_t i = 0; i < n; ++i) {
                    for (auto j : a.neighbors(i)) {
                        if (j > i) {
                            const auto cij = common(i, j);
                            c.per_pair[i * n + j] = cij;
                            c.per_pair[j * n + i] = cij;
                        }
                    }
                }
            }
            return c;
        }
        case Motif::Kind::Vshape: {
            // A 3-subset contains a 2-path iff it spans at least two edges:
            // #paths centred anywhere minus 2 per triangle (counted 3 times).
            std::uint64_t triangles = 0;
            const auto t = detail::triangles_per_node(a, triangles);
            std::uint64_t paths = 0;
            for (std::size_t i = 0; i < n; ++i) paths += binomial(a.degree(i), 2);
            c.total = paths - 2 * triangles;
            if (depth != CountDepth::Total) {
                for (std::size_t i = 0; i < n; ++i) {
                    std::uint64_t as_end = 0;
                    for (auto j : a.neighbors(i)) as_end += a.degree(j) - 1;
                    c.per_node[i] = binomial(a.degree(i), 2) + as_end - 2 * t[i];
                }
            }
            if (depth == CountDepth::PerPair) {
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = i + 1; j < n; ++j) {
                        const auto cij = common(i, j);
                        const std::uint64_t v =
                            a.has_edge(i, j) ? (a.degree(i) - 1) + (a.degree(j) - 1) - cij : cij;
                        c.per_pair[i * n + j] = v;
                        c.per_pair[j * n + i] = v;
                    }
                }
            }
            return c;
        }
        case Motif::Kind::Generic:
            break;
    }

    const std::uint64_t subsets = binomial(n, motif.nodes());
    if (!caps.override_caps && subsets > caps.max_subsets) {
        throw Error(ErrorKind::CostCap, "subset enumeration over " + std::to_string(subsets) +
                                            " subsets exceeds the cap of " + std::to_string(caps.max_subsets));
    }
    if (depth == CountDepth::PerPair && motif.nodes() >= 4 && !caps.override_caps &&
        n > caps.pair_projection_node_cap) {
        throw Error(ErrorKind::CostCap, "pair projection for a " + std::to_string(motif.nodes()) +
                                            "-node motif is capped at " +
                                            std::to_string(caps.pair_projection_node_cap) + " nodes");
    }
    detail::SubsetEnumerator(a, motif, depth, c).run();
    return c;
}

/// U_hat = #{subsets containing the motif} / C(n, r).
inline double sample_moment(const AdjacencyMatrix& a, const Motif& motif, const CostCaps& caps = {}) {
    const auto c = count_motif(a, motif, CountDepth::Total, caps);
    return static_cast<double>(c.total) / static_cast<double>(binomial(a.size(), motif.nodes()));
}

/// g1_hat[i] = per_node[i] / C(n-1, r-1) - U_hat, evaluated as one exact
/// integer numerator over n * C(n-1, r-1) (using C(n,r) = n/r * C(n-1,r-1)).
inline std::vector<double> local_projection_from_counts(const MotifCounts& c, std::size_t r) {
    const std::size_t n = c.n;
    const auto denom = static_cast<double>(n) * static_cast<double>(binomial(n - 1, r - 1));
    std::vector<double> g1(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto num = static_cast<std::int64_t>(n * c.per_node[i]) - static_cast<std::int64_t>(r * c.total);
        g1[i] = static_cast<double>(num) / denom;
    }
    return g1;
}

inline std::vector<double> local_projection(const AdjacencyMatrix& a, const Motif& motif, const CostCaps& caps = {}) {
    return local_projection_from_counts(count_motif(a, motif, CountDepth::PerNode, caps), motif.nodes());
}

inline SymmetricMatrix pair_projection_from_counts(const MotifCounts& c, std::size_t r, std::span<const double> g1,
                                                   double u_hat) {
    const std::size_t n = c.n;
    if (g1.size() != n) throw Error(ErrorKind::DimensionMismatch, "g1 length does not match the network");
    const auto denom = static_cast<double>(binomial(n - 2, r - 2));
    SymmetricMatrix g2(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double inner = static_cast<double>(c.pair(i, j)) / denom;
            g2.set(i, j, inner - u_hat - (g1[i] + g1[j]));
        }
    }
    return g2;
}

/// g2_hat[i][j] = per_pair[ij] / C(n-2, r-2) - U_hat - g1_hat[i] - g1_hat[j].
inline SymmetricMatrix pair_projection(const AdjacencyMatrix& a, const Motif& motif, std::span<const double> g1,
                                       double u_hat, const CostCaps& caps = {}) {
    if (a.size() < 2) throw Error(ErrorKind::InvalidSize, "need at least two nodes");
    return pair_projection_from_counts(count_motif(a, motif, CountDepth::PerPair, caps), motif.nodes(), g1, u_hat);
}

namespace detail {
/// Order-independent sum: sorting first makes the result invariant to node
/// relabeling, bit for bit.
inline double sorted_sum(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
}
}  // namespace detail

/// S_hat^2 = (r^2 / n^2) * sum_i g1_hat[i]^2.
inline double variance_estimator(std::span<const double> g1, std::size_t r) {
    if (g1.empty()) throw Error(ErrorKind::InvalidSize, "empty projection vector");
    std::vector<double> sq(g1.size());
    std::transform(g1.begin(), g1.end(), sq.begin(), [](double v) { return v * v; });
    const auto n = static_cast<double>(g1.size());
    const auto rd = static_cast<double>(r);
    return rd * rd / (n * n) * detail::sorted_sum(std::move(sq));
}

/// Leave-one-node-out moments: U_hat^(-i) = (total - per_node[i]) / C(n-1, r).
inline std::vector<double> leave_one_out_moments(const MotifCounts& c, std::size_t r) {
    const auto denom = static_cast<double>(binomial(c.n - 1, r));
    std::vector<double> out(c.n);
    for (std::size_t i = 0; i < c.n; ++i) out[i] = static_cast<double>(c.total - c.per_node[i]) / denom;
    return out;
}

/// Jackknife variance: n * S^2 = (n-1) * sum_i (U_hat^(-i) - U_hat)^2.
///
/// U_hat^(-i) is read off the per-node counts rather than recounted on each
/// node-deleted graph, so the cost is one counting pass.
inline double jackknife_variance(const AdjacencyMatrix& a, const Motif& motif, const CostCaps& caps = {}) {
    const std::size_t n = a.size();
    if (n < motif.nodes() + 1) throw Error(ErrorKind::InvalidSize, "jackknife needs n >= r + 1");
    const auto c = count_motif(a, motif, CountDepth::PerNode, caps);
    const double u_hat = static_cast<double>(c.total) / static_cast<double>(binomial(n, motif.nodes()));
    const auto loo = leave_one_out_moments(c, motif.nodes());
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (loo[i] - u_hat) * (loo[i] - u_hat);
    const auto nd = static_cast<double>(n);
    return (nd - 1.0) / nd * detail::sorted_sum(std::move(sq));
}

struct EmpiricalMoments {
    double xi1_hat_sq = 0.0;
    double e_g1_cubed = 0.0;
    double e_g1g1g2 = 0.0;
};

/// Plug-in moments of the projections:
///   xi1^2 = mean(g1^2), E[g1^3] = mean(g1^3),
///   E[g1 g1 g2] = C(n,2)^{-1} sum_{i<j} g1[i] g1[j] g2[i][j].
inline EmpiricalMoments edgeworth_coefficients(std::span<const double> g1, const SymmetricMatrix& g2) {
    const std::size_t n = g1.size();
    if (g2.n != n) throw Error(ErrorKind::DimensionMismatch, "g1 and g2 sizes differ");
    if (n < 2) throw Error(ErrorKind::InvalidSize, "need at least two nodes");
    std::vector<double> sq(n), cu(n);
    for (std::size_t i = 0; i < n; ++i) {
        sq[i] = g1[i] * g1[i];
        cu[i] = sq[i] * g1[i];
    }
    std::vector<double> cross;
    cross.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) cross.push_back((g1[i] * g1[j]) * g2(i, j));
    }
    const auto nd = static_cast<double>(n);
    EmpiricalMoments m;
    m.xi1_hat_sq = detail::sorted_sum(std::move(sq)) / nd;
    m.e_g1_cubed = detail::sorted_sum(std::move(cu)) / nd;
    m.e_g1g1g2 = detail::sorted_sum(std::move(cross)) / static_cast<double>(binomial(n, 2));
    return m;
}

/// Everything the inference layer needs from one observed network.
struct MomentStats {
    std::size_t n = 0;
    Motif motif;
    double u_hat = 0.0;
    double s_hat_sq = 0.0;
    std::vector<double> g1_hat;
    SymmetricMatrix g2_hat;
    double xi1_hat_sq = 0.0;
    double e_g1_cubed = 0.0;
    double e_g1g1g2 = 0.0;
    /// Set when every node has the same local count, so S_hat = 0 and the
    /// statistic cannot be studentized.
    bool degenerate = false;

    double s_hat() const noexcept { return std::sqrt(s_hat_sq); }
};

struct StatsOptions {
    /// Skip g2 (and E[g1 g1 g2]) when only U_hat and S_hat are needed.
    bool pair_projection = true;
    CostCaps caps;
};

inline MomentStats compute_stats(const AdjacencyMatrix& a, const Motif& motif, const StatsOptions& opts = {}) {
    detail::check_size(a, motif);
    const std::size_t n = a.size();
    const std::size_t r = motif.nodes();
    const bool pairs = opts.pair_projection && n >= 2;
    const auto c = count_motif(a, motif, pairs ? CountDepth::PerPair : CountDepth::PerNode, opts.caps);

    MomentStats s;
    s.n = n;
    s.motif = motif;
    s.u_hat = static_cast<double>(c.total) / static_cast<double>(binomial(n, r));
    s.g1_hat = local_projection_from_counts(c, r);
    s.s_hat_sq = variance_estimator(s.g1_hat, r);
    s.degenerate = std::all_of(c.per_node.begin(), c.per_node.end(),
                               [&](std::uint64_t v) { return v == c.per_node.front(); });
    if (pairs) {
        s.g2_hat = pair_projection_from_counts(c, r, s.g1_hat, s.u_hat);
        const auto m = edgeworth_coefficients(s.g1_hat, s.g2_hat);
        s.xi1_hat_sq = m.xi1_hat_sq;
        s.e_g1_cubed = m.e_g1_cubed;
        s.e_g1g1g2 = m.e_g1g1g2;
    } else {
        std::vector<double> sq(n), cu(n);
        for (std::size_t i = 0; i < n; ++i) {
            sq[i] = s.g1_hat[i] * s.g1_hat[i];
            cu[i] = sq[i] * s.g1_hat[i];
        }
        s.xi1_hat_sq = detail::sorted_sum(std::move(sq)) / static_cast<double>(n);
        s.e_g1_cubed = detail::sorted_sum(std::move(cu)) / static_cast<double>(n);
    }
    return s;
}

}  // namespace netmoment
