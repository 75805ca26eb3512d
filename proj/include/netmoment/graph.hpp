#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "netmoment/error.hpp"

namespace netmoment {

/// Simple undirected graph on nodes 0..n-1 without self-loops.
///
/// Holds a dense bit matrix (one row of 64-bit words per node) for O(1)
/// adjacency queries and word-parallel neighborhood intersections, plus sorted
/// neighbor lists for sparse traversals.
class AdjacencyMatrix {
public:
    AdjacencyMatrix() = default;

    explicit AdjacencyMatrix(std::size_t n)
        : n_(n), words_((n + 63) / 64), bits_(n * words_, 0), neighbors_(n) {}

    /// Builds from an undirected edge list with 0-based ids. Duplicates are ignored.
    static AdjacencyMatrix from_edges(std::size_t n,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
        AdjacencyMatrix g(n);
        for (auto [u, v] : edges) {
            if (u >= n || v >= n) {
                throw Error(ErrorKind::InvalidMatrix, "edge endpoint out of range");
            }
            if (u == v) {
                throw Error(ErrorKind::InvalidMatrix, "self-loop on node " + std::to_string(u));
            }
            g.set_bit(u, v);
            g.set_bit(v, u);
        }
        g.rebuild_lists();
        return g;
    }

    /// Builds from a dense 0/1 matrix; rejects asymmetry and nonzero diagonal.
    static AdjacencyMatrix from_dense(const std::vector<std::vector<int>>& a) {
        const std::size_t n = a.size();
        AdjacencyMatrix g(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (a[i].size() != n) throw Error(ErrorKind::InvalidMatrix, "matrix is not square");
            if (a[i][i] != 0) throw Error(ErrorKind::InvalidMatrix, "nonzero diagonal");
            for (std::size_t j = 0; j < n; ++j) {
                if (a[i][j] != 0 && a[i][j] != 1) {
                    throw Error(ErrorKind::InvalidMatrix, "entries must be 0 or 1");
                }
                if (a[i][j] != a[j][i]) throw Error(ErrorKind::InvalidMatrix, "matrix is not symmetric");
                if (a[i][j]) g.set_bit(i, j);
            }
        }
        g.rebuild_lists();
        return g;
    }

    std::size_t size() const noexcept { return n_; }

    bool has_edge(std::size_t i, std::size_t j) const noexcept {
        return (bits_[i * words_ + (j >> 6)] >> (j & 63)) & 1ULL;
    }

    std::span<const std::uint32_t> neighbors(std::size_t i) const noexcept { return neighbors_[i]; }
    std::size_t degree(std::size_t i) const noexcept { return neighbors_[i].size(); }

    std::vector<std::size_t> degrees() const {
        std::vector<std::size_t> d(n_);
        for (std::size_t i = 0; i < n_; ++i) d[i] = degree(i);
        return d;
    }

    std::uint64_t edge_count() const noexcept {
        std::uint64_t twice = 0;
        for (const auto& nb : neighbors_) twice += nb.size();
        return twice / 2;
    }

    /// |N(i) ∩ N(j)| by word-parallel AND.
    std::uint64_t common_neighbors(std::size_t i, std::size_t j) const noexcept {
        const std::uint64_t* a = &bits_[i * words_];
        const std::uint64_t* b = &bits_[j * words_];
        std::uint64_t c = 0;
        for (std::size_t w = 0; w < words_; ++w) c += std::popcount(a[w] & b[w]);
        return c;
    }

    /// Graph on the listed nodes: entry (a,b) is A[nodes[a], nodes[b]], and a
    /// repeated node paired with itself contributes no edge.
    AdjacencyMatrix induced(std::span<const std::size_t> nodes) const {
        AdjacencyMatrix g(nodes.size());
        for (std::size_t a = 0; a < nodes.size(); ++a) {
            for (std::size_t b = a + 1; b < nodes.size(); ++b) {
                if (nodes[a] != nodes[b] && has_edge(nodes[a], nodes[b])) {
                    g.set_bit(a, b);
                    g.set_bit(b, a);
                }
            }
        }
        g.rebuild_lists();
        return g;
    }

    AdjacencyMatrix without_node(std::size_t removed) const {
        std::vector<std::size_t> keep;
        keep.reserve(n_ - 1);
        for (std::size_t i = 0; i < n_; ++i) {
            if (i != removed) keep.push_back(i);
        }
        return induced(keep);
    }

    AdjacencyMatrix with_edge(std::size_t i, std::size_t j) const {
        AdjacencyMatrix g = *this;
        if (i != j && !has_edge(i, j)) {
            g.set_bit(i, j);
            g.set_bit(j, i);
            g.rebuild_lists();
        }
        return g;
    }

    /// Relabels node i as perm[i].
    AdjacencyMatrix permuted(std::span<const std::size_t> perm) const {
        AdjacencyMatrix g(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (auto j : neighbors_[i]) g.set_bit(perm[i], perm[j]);
        }
        g.rebuild_lists();
        return g;
    }

    friend bool operator==(const AdjacencyMatrix& a, const AdjacencyMatrix& b) {
        return a.n_ == b.n_ && a.bits_ == b.bits_;
    }

    /// Incremental construction; call finalize() once all edges are in.
    void add_edge_unchecked(std::size_t i, std::size_t j) noexcept {
        set_bit(i, j);
        set_bit(j, i);
    }
    void finalize() { rebuild_lists(); }

private:
    void set_bit(std::size_t i, std::size_t j) noexcept {
        bits_[i * words_ + (j >> 6)] |= (1ULL << (j & 63));
    }

    void rebuild_lists() {
        for (std::size_t i = 0; i < n_; ++i) {
            auto& nb = neighbors_[i];
            nb.clear();
            for (std::size_t w = 0; w < words_; ++w) {
                std::uint64_t word = bits_[i * words_ + w];
                while (word) {
                    nb.push_back(static_cast<std::uint32_t>(w * 64 + std::countr_zero(word)));
                    word &= word - 1;
                }
            }
        }
    }

    std::size_t n_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<std::vector<std::uint32_t>> neighbors_;
};

/// Reads an undirected edge list: one "u v" or "u,v" pair per line with 1-based
/// ids. Blank lines and lines starting with '#' are skipped, except that a
/// "# nodes N" line fixes the node count. Otherwise the count is the largest
/// id seen, or `nodes` when given and larger.
inline AdjacencyMatrix read_edge_list(std::istream& in, std::size_t nodes = 0) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::size_t max_id = 0;
    std::size_t declared = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::replace(line.begin(), line.end(), '\t', ' ');
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first[0] == '#') {
            std::string key;
            long long value = 0;
            if (ls >> key >> value && key == "nodes" && value > 0) {
                declared = static_cast<std::size_t>(value);
            }
            continue;
        }
        long long u = 0;
        long long v = 0;
        std::istringstream fs(first);
        if (!(fs >> u) || !(ls >> v)) {
            throw Error(ErrorKind::Io, "malformed edge on line " + std::to_string(line_no));
        }
        if (u < 1 || v < 1) {
            throw Error(ErrorKind::Io, "node ids are 1-based (line " + std::to_string(line_no) + ")");
        }
        if (u == v) {
            throw Error(ErrorKind::InvalidMatrix, "self-loop on line " + std::to_string(line_no));
        }
        edges.emplace_back(static_cast<std::size_t>(u - 1), static_cast<std::size_t>(v - 1));
        max_id = std::max<std::size_t>(max_id, static_cast<std::size_t>(std::max(u, v)));
    }
    const std::size_t n = std::max({max_id, declared, nodes});
    return AdjacencyMatrix::from_edges(n, edges);
}

inline void write_edge_list(std::ostream& out, const AdjacencyMatrix& g) {
    out << "# nodes " << g.size() << '\n';
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (auto j : g.neighbors(i)) {
            if (j > i) out << (i + 1) << ' ' << (j + 1) << '\n';
        }
    }
}

}  // namespace netmoment
