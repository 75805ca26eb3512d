#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <bit>
#include <string>
#include <utility>
#include <vector>

#include "netmoment/error.hpp"

namespace netmoment {

inline constexpr std::size_t kMaxMotifNodes = 5;

enum class ShapeClass { Acyclic, Cyclic };

inline const char* to_string(ShapeClass s) { return s == ShapeClass::Acyclic ? "acyclic" : "cyclic"; }

/// Bit position of the unordered pair (a,b), a != b, among r nodes in
/// row-major upper-triangle order: (0,1),(0,2),...,(0,r-1),(1,2),...
constexpr std::size_t pair_bit(std::size_t a, std::size_t b, std::size_t r) noexcept {
    if (a > b) std::swap(a, b);
    return a * (2 * r - a - 1) / 2 + (b - a - 1);
}

constexpr std::size_t pair_count(std::size_t r) noexcept { return r * (r - 1) / 2; }

/// Symmetric hollow 0/1 matrix on at most five nodes.
using SmallMatrix = std::vector<std::vector<int>>;

namespace detail {

inline std::uint32_t encode(const SmallMatrix& m) {
    const std::size_t r = m.size();
    std::uint32_t mask = 0;
    for (std::size_t a = 0; a < r; ++a) {
        for (std::size_t b = a + 1; b < r; ++b) {
            if (m[a][b]) mask |= 1u << pair_bit(a, b, r);
        }
    }
    return mask;
}

inline std::array<int, kMaxMotifNodes> degrees_of(std::uint32_t mask, std::size_t r) {
    std::array<int, kMaxMotifNodes> deg{};
    for (std::size_t a = 0; a < r; ++a) {
        for (std::size_t b = a + 1; b < r; ++b) {
            if ((mask >> pair_bit(a, b, r)) & 1u) {
                ++deg[a];
                ++deg[b];
            }
        }
    }
    return deg;
}

/// Does the pattern `sub` contain `motif` under some relabeling of the motif?
/// Both are pair masks over r nodes.
inline bool contains_by_permutation(std::uint32_t sub, std::uint32_t motif, std::size_t r) {
    if (std::popcount(sub) < std::popcount(motif)) return false;
    // Degree-sequence dominance: sorted degrees of sub must dominate those of the motif.
    auto ds = degrees_of(sub, r);
    auto dm = degrees_of(motif, r);
    std::sort(ds.begin(), ds.begin() + static_cast<std::ptrdiff_t>(r), std::greater<>());
    std::sort(dm.begin(), dm.begin() + static_cast<std::ptrdiff_t>(r), std::greater<>());
    for (std::size_t k = 0; k < r; ++k) {
        if (ds[k] < dm[k]) return false;
    }
    std::array<std::size_t, kMaxMotifNodes> perm{};
    std::iota(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(r), std::size_t{0});
    do {
        bool ok = true;
        for (std::size_t a = 0; a < r && ok; ++a) {
            for (std::size_t b = a + 1; b < r; ++b) {
                if (((motif >> pair_bit(a, b, r)) & 1u) &&
                    !((sub >> pair_bit(perm[a], perm[b], r)) & 1u)) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(r)));
    return false;
}

inline void check_small_matrix(const SmallMatrix& m) {
    const std::size_t r = m.size();
    for (std::size_t a = 0; a < r; ++a) {
        if (m[a].size() != r) throw Error(ErrorKind::InvalidMatrix, "matrix is not square");
        if (m[a][a] != 0) throw Error(ErrorKind::InvalidMatrix, "self-loop in motif matrix");
        for (std::size_t b = 0; b < r; ++b) {
            if (m[a][b] != 0 && m[a][b] != 1) throw Error(ErrorKind::InvalidMatrix, "entries must be 0/1");
            if (m[a][b] != m[b][a]) throw Error(ErrorKind::InvalidMatrix, "matrix is not symmetric");
        }
    }
}

}  // namespace detail

/// A connected pattern graph R on 2..5 nodes.
///
/// Besides the adjacency it precomputes the containment table over all
/// 2^C(r,2) edge patterns of an r-node subgraph, so h(A_subset) is a single
/// lookup during counting.
class Motif {
public:
    /// Structural fast-path category; detected from the adjacency, not the name.
    enum class Kind { Edge, Triangle, Vshape, Generic };

    std::size_t nodes() const noexcept { return r_; }
    std::size_t edges() const noexcept { return s_; }
    ShapeClass shape_class() const noexcept { return shape_; }
    const std::string& name() const noexcept { return name_; }
    Kind kind() const noexcept { return kind_; }
    std::uint32_t mask() const noexcept { return mask_; }
    bool has_edge(std::size_t a, std::size_t b) const noexcept {
        return a != b && ((mask_ >> pair_bit(a, b, r_)) & 1u);
    }

    SmallMatrix adjacency() const {
        SmallMatrix m(r_, std::vector<int>(r_, 0));
        for (std::size_t a = 0; a < r_; ++a) {
            for (std::size_t b = 0; b < r_; ++b) m[a][b] = has_edge(a, b) ? 1 : 0;
        }
        return m;
    }

    std::vector<std::pair<std::size_t, std::size_t>> edge_list() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t a = 0; a < r_; ++a) {
            for (std::size_t b = a + 1; b < r_; ++b) {
                if (has_edge(a, b)) out.emplace_back(a, b);
            }
        }
        return out;
    }

    /// h on an r-node pattern given as a pair mask.
    bool contained_in(std::uint32_t pattern) const noexcept { return table_[pattern] != 0; }

    friend Motif make_motif(const SmallMatrix& adjacency, std::string name);

private:
    std::size_t r_ = 0;
    std::size_t s_ = 0;
    std::uint32_t mask_ = 0;
    ShapeClass shape_ = ShapeClass::Acyclic;
    Kind kind_ = Kind::Generic;
    std::string name_;
    std::vector<std::uint8_t> table_;
};

/// Validates a motif adjacency and classifies it. A connected graph is
/// acyclic exactly when it is a tree, i.e. s = r - 1.
inline Motif make_motif(const SmallMatrix& adjacency, std::string name = {}) {
    const std::size_t r = adjacency.size();
    if (r > kMaxMotifNodes) {
        throw Error(ErrorKind::SizeCap, "motifs are limited to " + std::to_string(kMaxMotifNodes) + " nodes");
    }
    if (r < 2) throw Error(ErrorKind::InvalidMatrix, "a motif needs at least two nodes");
    detail::check_small_matrix(adjacency);

    // connectivity by flood fill
    std::vector<bool> seen(r, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const std::size_t a = stack.back();
        stack.pop_back();
        for (std::size_t b = 0; b < r; ++b) {
            if (adjacency[a][b] && !seen[b]) {
                seen[b] = true;
                stack.push_back(b);
            }
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw Error(ErrorKind::NotConnected, "motif must be connected");
    }

    Motif m;
    m.r_ = r;
    m.mask_ = detail::encode(adjacency);
    m.s_ = static_cast<std::size_t>(std::popcount(m.mask_));
    m.shape_ = (m.s_ == r - 1) ? ShapeClass::Acyclic : ShapeClass::Cyclic;
    m.name_ = std::move(name);
    if (r == 2) {
        m.kind_ = Motif::Kind::Edge;
    } else if (r == 3) {
        m.kind_ = m.s_ == 3 ? Motif::Kind::Triangle : Motif::Kind::Vshape;
    }
    const std::uint32_t patterns = 1u << pair_count(r);
    m.table_.resize(patterns);
    for (std::uint32_t p = 0; p < patterns; ++p) {
        m.table_[p] = detail::contains_by_permutation(p, m.mask_, r) ? 1 : 0;
    }
    return m;
}

inline Motif motif_from_edges(std::size_t r, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                              std::string name = {}) {
    if (r > kMaxMotifNodes) {
        throw Error(ErrorKind::SizeCap, "motifs are limited to " + std::to_string(kMaxMotifNodes) + " nodes");
    }
    SmallMatrix m(r, std::vector<int>(r, 0));
    for (auto [a, b] : edges) {
        if (a >= r || b >= r) throw Error(ErrorKind::InvalidMatrix, "motif edge endpoint out of range");
        if (a == b) throw Error(ErrorKind::InvalidMatrix, "self-loop in motif");
        m[a][b] = m[b][a] = 1;
    }
    return make_motif(m, std::move(name));
}

namespace motifs {
inline Motif edge() { return motif_from_edges(2, {{0, 1}}, "edge"); }
inline Motif triangle() { return motif_from_edges(3, {{0, 1}, {0, 2}, {1, 2}}, "triangle"); }
inline Motif vshape() { return motif_from_edges(3, {{0, 1}, {0, 2}}, "vshape"); }
inline Motif threestar() { return motif_from_edges(4, {{0, 1}, {0, 2}, {0, 3}}, "threestar"); }
}  // namespace motifs

inline Motif builtin_motif(const std::string& name) {
    if (name == "edge") return motifs::edge();
    if (name == "triangle") return motifs::triangle();
    if (name == "vshape") return motifs::vshape();
    if (name == "threestar") return motifs::threestar();
    throw Error(ErrorKind::Parameter, "unknown motif '" + name + "'");
}

/// h(sub): 1 iff some relabeling of the motif is an edge-subgraph of `sub`.
inline int contains(const SmallMatrix& sub, const Motif& motif) {
    if (sub.size() != motif.nodes()) {
        throw Error(ErrorKind::DimensionMismatch, "subgraph and motif have different node counts");
    }
    detail::check_small_matrix(sub);
    return detail::contains_by_permutation(detail::encode(sub), motif.mask(), motif.nodes()) ? 1 : 0;
}

/// E[h(A_sub) | W_sub]: sums the containment indicator over every edge
/// pattern weighted by its Bernoulli probability.
template <typename Matrix>
double conditional_expectation_h(const Matrix& w, const Motif& motif) {
    const std::size_t r = motif.nodes();
    if (static_cast<std::size_t>(w.size()) != r) {
        throw Error(ErrorKind::DimensionMismatch, "probability subgraph and motif have different node counts");
    }
    std::array<double, pair_count(kMaxMotifNodes)> p{};
    for (std::size_t a = 0; a < r; ++a) {
        for (std::size_t b = a + 1; b < r; ++b) {
            const double v = w[a][b];
            if (!(v >= 0.0 && v <= 1.0)) {
                throw Error(ErrorKind::Parameter, "edge probabilities must lie in [0,1]");
            }
            p[pair_bit(a, b, r)] = v;
        }
    }
    const std::size_t k = pair_count(r);
    double total = 0.0;
    for (std::uint32_t pattern = 0; pattern < (1u << k); ++pattern) {
        if (!motif.contained_in(pattern)) continue;
        double prob = 1.0;
        for (std::size_t e = 0; e < k; ++e) prob *= ((pattern >> e) & 1u) ? p[e] : 1.0 - p[e];
        total += prob;
    }
    return total;
}

/// Same as conditional_expectation_h, for probabilities already laid out in
/// pair-bit order. Skips validation; used in Monte-Carlo inner loops.
inline double conditional_expectation_h_pairs(std::span<const double> p, const Motif& motif) noexcept {
    const std::size_t k = pair_count(motif.nodes());
    double total = 0.0;
    for (std::uint32_t pattern = 0; pattern < (1u << k); ++pattern) {
        if (!motif.contained_in(pattern)) continue;
        double prob = 1.0;
        for (std::size_t e = 0; e < k; ++e) prob *= ((pattern >> e) & 1u) ? p[e] : 1.0 - p[e];
        total += prob;
    }
    return total;
}

}  // namespace netmoment
