#pragma once

// Graphon models: latent positions X_i ~ U[0,1], edge probabilities
// W_ij = rho * f(X_i, X_j), and adjacency A_ij | W ~ Bernoulli(W_ij).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <variant>
#include <utility>
#include <vector>

#include "netmoment/error.hpp"
#include "netmoment/graph.hpp"
#include "netmoment/motif.hpp"
#include "netmoment/rng.hpp"

namespace netmoment {

enum class GraphonKind { BlockModel, SmoothGraphon, NonSmoothGraphon, Custom };

inline const char* to_string(GraphonKind k) {
    switch (k) {
        case GraphonKind::BlockModel: return "BlockModel";
        case GraphonKind::SmoothGraphon: return "SmoothGraphon";
        case GraphonKind::NonSmoothGraphon: return "NonSmoothGraphon";
        case GraphonKind::Custom: return "Custom";
    }
    return "?";
}

class Graphon {
public:
    using Evaluator = std::function<double(double, double)>;

    /// Stochastic block model: node i falls in block k with probability pi[k]
    /// (by partitioning [0,1] into consecutive intervals of those lengths).
    static Graphon block_model(std::vector<double> pi, std::vector<std::vector<double>> b) {
        const std::size_t k = pi.size();
        if (k == 0) throw Error(ErrorKind::Parameter, "block model needs at least one block");
        if (b.size() != k) throw Error(ErrorKind::DimensionMismatch, "B must be K x K");
        double total = 0.0;
        for (double p : pi) {
            if (!(p >= 0.0)) throw Error(ErrorKind::Parameter, "membership probabilities must be nonnegative");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw Error(ErrorKind::Parameter, "membership probabilities must sum to 1");
        }
        for (std::size_t i = 0; i < k; ++i) {
            if (b[i].size() != k) throw Error(ErrorKind::DimensionMismatch, "B must be K x K");
            for (std::size_t j = 0; j < k; ++j) {
                if (!(b[i][j] >= 0.0 && b[i][j] <= 1.0)) {
                    throw Error(ErrorKind::Parameter, "B entries must lie in [0,1]");
                }
                if (b[i][j] != b[j][i]) throw Error(ErrorKind::Parameter, "B must be symmetric");
            }
        }
        Graphon g(GraphonKind::BlockModel, "BlockModel");
        g.cumulative_.resize(k);
        std::partial_sum(pi.begin(), pi.end(), g.cumulative_.begin());
        g.pi_ = std::move(pi);
        g.b_ = std::move(b);
        return g;
    }

    /// f(u,v) = (u^2+v^2)/3 * cos(1/(u^2+v^2)) + 0.15, extended by continuity
    /// to 0.15 at the origin.
    static Graphon smooth() { return Graphon(GraphonKind::SmoothGraphon, "SmoothGraphon"); }

    /// f(u,v) = 0.5 cos{0.1 / ((u-1/2)^2 + (v-1/2)^2)^{-1} + 0.01} max{u,v}^{2/3} + 0.4,
    /// transcribed literally. Note that "0.1 / (d^2)^{-1}" equals 0.1 * d^2, which
    /// is not a high-fluctuation region; nonsmooth_reciprocal() gives the
    /// 0.1 / d^2 reading.
    static Graphon nonsmooth() { return Graphon(GraphonKind::NonSmoothGraphon, "NonSmoothGraphon"); }

    /// User-supplied symmetric f into [0,1]; symmetry and range are checked on
    /// pseudo-random pairs.
    static Graphon custom(Evaluator f, std::string name = "Custom") {
        Graphon g(GraphonKind::Custom, std::move(name));
        g.custom_ = std::move(f);
        RandomStream rs(0x5eedULL, "graphon-check");
        for (int t = 0; t < 256; ++t) {
            const double u = rs.uniform();
            const double v = rs.uniform();
            const double a = g.custom_(u, v);
            const double b = g.custom_(v, u);
            if (!(a >= 0.0 && a <= 1.0)) throw Error(ErrorKind::Parameter, "graphon values must lie in [0,1]");
            if (std::abs(a - b) > 1e-12) throw Error(ErrorKind::Parameter, "graphon must be symmetric");
        }
        return g;
    }

    static Graphon constant(double c) {
        if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorKind::Parameter, "constant graphon needs c in [0,1]");
        return custom([c](double, double) { return c; }, "Constant");
    }

    /// The alternative reading 0.5 cos{0.1/((u-1/2)^2+(v-1/2)^2) + 0.01} max{u,v}^{2/3} + 0.4.
    static Graphon nonsmooth_reciprocal() {
        return custom(
            [](double u, double v) {
                const double d2 = (u - 0.5) * (u - 0.5) + (v - 0.5) * (v - 0.5);
                if (d2 == 0.0) return 0.4;
                return 0.5 * std::cos(0.1 / d2 + 0.01) * std::pow(std::max(u, v), 2.0 / 3.0) + 0.4;
            },
            "NonSmoothReciprocal");
    }

    GraphonKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    std::size_t blocks() const noexcept { return pi_.size(); }
    const std::vector<double>& block_probabilities() const noexcept { return pi_; }
    const std::vector<std::vector<double>>& block_matrix() const noexcept { return b_; }

    std::size_t block_of(double u) const noexcept {
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        const auto k = static_cast<std::size_t>(it - cumulative_.begin());
        return std::min(k, pi_.size() - 1);
    }

    double operator()(double u, double v) const {
        switch (kind_) {
            case GraphonKind::BlockModel:
                return b_[block_of(u)][block_of(v)];
            case GraphonKind::SmoothGraphon: {
                const double s = u * u + v * v;
                if (s == 0.0) return 0.15;
                return s / 3.0 * std::cos(1.0 / s) + 0.15;
            }
            case GraphonKind::NonSmoothGraphon: {
                const double d2 = (u - 0.5) * (u - 0.5) + (v - 0.5) * (v - 0.5);
                return 0.5 * std::cos(0.1 / std::pow(d2, -1.0) + 0.01) * std::pow(std::max(u, v), 2.0 / 3.0) +
                       0.4;
            }
            case GraphonKind::Custom:
                return custom_(u, v);
        }
        return 0.0;
    }

private:
    Graphon(GraphonKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

    GraphonKind kind_;
    std::string name_;
    std::vector<double> pi_;
    std::vector<double> cumulative_;
    std::vector<std::vector<double>> b_;
    Evaluator custom_;
};

/// The two-block model used throughout the experiments: equal blocks,
/// B = (0.6, 0.2; 0.2, 0.2).
inline Graphon default_block_model() { return Graphon::block_model({0.5, 0.5}, {{0.6, 0.2}, {0.2, 0.2}}); }

struct LatentSample {
    std::vector<double> positions;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return positions.size(); }
};

struct ProbabilityMatrix {
    std::size_t n = 0;
    double rho = 1.0;
    std::vector<double> values;  // row-major n x n

    double operator()(std::size_t i, std::size_t j) const noexcept { return values[i * n + j]; }
};

inline void check_rho(double rho) {
    if (!(rho > 0.0 && rho <= 1.0)) throw Error(ErrorKind::Parameter, "rho must lie in (0,1]");
}

inline LatentSample sample_latent(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw Error(ErrorKind::InvalidSize, "need at least two nodes");
    LatentSample x{std::vector<double>(n), seed};
    RandomStream rs(seed, "latent");
    for (auto& v : x.positions) v = rs.uniform();
    return x;
}

inline ProbabilityMatrix probability_matrix(const Graphon& g, const LatentSample& x, double rho) {
    check_rho(rho);
    const std::size_t n = x.size();
    ProbabilityMatrix w{n, rho, std::vector<double>(n * n, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double p = rho * g(x.positions[i], x.positions[j]);
            if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::Parameter, "edge probability outside [0,1]");
            w.values[i * n + j] = p;
            w.values[j * n + i] = p;
        }
    }
    return w;
}

inline AdjacencyMatrix sample_adjacency(const ProbabilityMatrix& w, std::uint64_t seed) {
    AdjacencyMatrix a(w.n);
    RandomStream rs(seed, "adjacency");
    for (std::size_t i = 0; i < w.n; ++i) {
        for (std::size_t j = i + 1; j < w.n; ++j) {
            if (rs.bernoulli(w(i, j))) a.add_edge_unchecked(i, j);
        }
    }
    a.finalize();
    return a;
}

/// Latent positions, probability matrix and adjacency from one seed.
inline AdjacencyMatrix sample_network(const Graphon& g, double rho, std::size_t n, std::uint64_t seed) {
    const auto x = sample_latent(n, derive_seed(seed, "network-latent"));
    return sample_adjacency(probability_matrix(g, x, rho), derive_seed(seed, "network-edges"));
}

// ---------------------------------------------------------------------------
// Population quantities
// ---------------------------------------------------------------------------

struct ExactBlockModel {};
struct MonteCarlo {
    std::size_t draws = 100000;
    std::uint64_t seed = 0;
    /// Inner draws per conditional expectation (population coefficients only).
    std::size_t inner_draws = 1000;
};
using PopulationMethod = std::variant<ExactBlockModel, MonteCarlo>;

struct Estimate {
    double value = 0.0;
    double standard_error = 0.0;  // zero for exact methods
};

namespace detail {

/// Fills pair probabilities (pair-bit order) for latent positions u[0..r).
inline void pair_probabilities(const Graphon& g, double rho, std::span<const double> u, std::size_t r,
                               std::span<double> out) {
    for (std::size_t a = 0; a < r; ++a) {
        for (std::size_t b = a + 1; b < r; ++b) out[pair_bit(a, b, r)] = rho * g(u[a], u[b]);
    }
}

/// Calls visit(weight, block assignment) for all K^r assignments of r nodes
/// whose first `fixed.size()` nodes are pinned to the given blocks.
template <typename Visit>
void for_each_assignment(const Graphon& g, std::size_t r, std::span<const std::size_t> fixed, Visit&& visit) {
    const std::size_t k = g.blocks();
    std::array<std::size_t, kMaxMotifNodes> labels{};
    for (std::size_t i = 0; i < fixed.size(); ++i) labels[i] = fixed[i];
    const std::size_t free = r - fixed.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < free; ++i) total *= k;
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        double weight = 1.0;
        for (std::size_t i = fixed.size(); i < r; ++i) {
            labels[i] = c % k;
            c /= k;
            weight *= g.block_probabilities()[labels[i]];
        }
        visit(weight, std::span<const std::size_t>(labels.data(), r));
    }
}

inline double block_h(const Graphon& g, double rho, const Motif& motif, std::span<const std::size_t> labels) {
    const std::size_t r = motif.nodes();
    std::array<double, pair_count(kMaxMotifNodes)> p{};
    for (std::size_t a = 0; a < r; ++a) {
        for (std::size_t b = a + 1; b < r; ++b) {
            p[pair_bit(a, b, r)] = rho * g.block_matrix()[labels[a]][labels[b]];
        }
    }
    return conditional_expectation_h_pairs(p, motif);
}

}  // namespace detail

/// mu_n = E[h(W_{1..r})].
inline Estimate population_moment(const Graphon& g, double rho, const Motif& motif, const PopulationMethod& method) {
    check_rho(rho);
    const std::size_t r = motif.nodes();
    if (std::holds_alternative<ExactBlockModel>(method)) {
        if (g.kind() != GraphonKind::BlockModel) {
            throw Error(ErrorKind::Parameter, "exact enumeration requires a block model");
        }
        double mu = 0.0;
        detail::for_each_assignment(g, r, {}, [&](double w, std::span<const std::size_t> labels) {
            mu += w * detail::block_h(g, rho, motif, labels);
        });
        return {mu, 0.0};
    }
    const auto& mc = std::get<MonteCarlo>(method);
    if (mc.draws < 10000) throw Error(ErrorKind::Parameter, "Monte-Carlo moment needs at least 1e4 draws");
    RandomStream rs(mc.seed, "population-moment");
    std::array<double, kMaxMotifNodes> u{};
    std::array<double, pair_count(kMaxMotifNodes)> p{};
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t t = 0; t < mc.draws; ++t) {
        for (std::size_t a = 0; a < r; ++a) u[a] = rs.uniform();
        detail::pair_probabilities(g, rho, u, r, p);
        const double h = conditional_expectation_h_pairs(p, motif);
        sum += h;
        sum_sq += h * h;
    }
    const double m = static_cast<double>(mc.draws);
    const double mean = sum / m;
    const double var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));
    return {mean, std::sqrt(var / m)};
}

/// Population Edgeworth coefficients of the degree-1 and degree-2 Hoeffding
/// projections: xi1 = sd(g1(X1)), E[g1^3], E[g1(X1) g1(X2) g2(X1,X2)].
struct PopulationCoefficients {
    double xi1 = 0.0;
    double e_g1_cubed = 0.0;
    double e_g1g1g2 = 0.0;
    double mu = 0.0;
    /// Sample mean of g1 over the outer draws and its standard error
    /// (both zero for exact enumeration).
    double mean_g1 = 0.0;
    double mean_g1_se = 0.0;
};

inline PopulationCoefficients population_edgeworth_coefficients(const Graphon& g, double rho, const Motif& motif,
                                                                const PopulationMethod& method) {
    check_rho(rho);
    const std::size_t r = motif.nodes();
    const double floor = 1e-10 * std::pow(rho, static_cast<double>(motif.edges()));
    PopulationCoefficients out;

    if (std::holds_alternative<ExactBlockModel>(method)) {
        if (g.kind() != GraphonKind::BlockModel) {
            throw Error(ErrorKind::Parameter, "exact enumeration requires a block model");
        }
        const std::size_t k = g.blocks();
        const auto& pi = g.block_probabilities();
        const double mu = population_moment(g, rho, motif, ExactBlockModel{}).value;
        std::vector<double> g1(k, 0.0);
        for (std::size_t a = 0; a < k; ++a) {
            const std::array<std::size_t, 1> fixed{a};
            double cond = 0.0;
            detail::for_each_assignment(g, r, fixed, [&](double w, std::span<const std::size_t> labels) {
                cond += w * detail::block_h(g, rho, motif, labels);
            });
            g1[a] = cond - mu;
        }
        double var = 0.0;
        double third = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
            var += pi[a] * g1[a] * g1[a];
            third += pi[a] * g1[a] * g1[a] * g1[a];
        }
        double cross = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) {
                const std::array<std::size_t, 2> fixed{a, b};
                double cond = 0.0;
                detail::for_each_assignment(g, r, fixed, [&](double w, std::span<const std::size_t> labels) {
                    cond += w * detail::block_h(g, rho, motif, labels);
                });
                const double g2 = cond - mu - g1[a] - g1[b];
                cross += pi[a] * pi[b] * g1[a] * g1[b] * g2;
            }
        }
        out.mu = mu;
        out.xi1 = std::sqrt(var);
        out.e_g1_cubed = third;
        out.e_g1g1g2 = cross;
    } else {
        const auto& mc = std::get<MonteCarlo>(method);
        if (mc.draws < 10000) throw Error(ErrorKind::Parameter, "Monte-Carlo coefficients need at least 1e4 draws");
        if (mc.inner_draws < 1) throw Error(ErrorKind::Parameter, "inner_draws must be positive");
        RandomStream outer(mc.seed, "coefficients-outer");
        RandomStream inner(mc.seed, "coefficients-inner");
        std::array<double, kMaxMotifNodes> u{};
        std::array<double, pair_count(kMaxMotifNodes)> p{};

        // Conditional expectation of h with the first `pinned` positions fixed.
        auto conditional = [&](std::size_t pinned) {
            if (pinned == r) {
                detail::pair_probabilities(g, rho, u, r, p);
                return conditional_expectation_h_pairs(p, motif);
            }
            double s = 0.0;
            for (std::size_t t = 0; t < mc.inner_draws; ++t) {
                for (std::size_t a = pinned; a < r; ++a) u[a] = inner.uniform();
                detail::pair_probabilities(g, rho, u, r, p);
                s += conditional_expectation_h_pairs(p, motif);
            }
            return s / static_cast<double>(mc.inner_draws);
        };

        const std::size_t m = mc.draws;
        std::vector<double> x(m), y(m), cond1x(m), cond1y(m), cond2(m);
        for (std::size_t t = 0; t < m; ++t) {
            x[t] = outer.uniform();
            y[t] = outer.uniform();
        }
        double grand = 0.0;
        for (std::size_t t = 0; t < m; ++t) {
            u[0] = x[t];
            cond1x[t] = conditional(1);
            u[0] = y[t];
            cond1y[t] = conditional(1);
            u[0] = x[t];
            u[1] = y[t];
            cond2[t] = conditional(2);
            grand += cond1x[t] + cond1y[t];
        }
        const double mu = grand / (2.0 * static_cast<double>(m));
        double s1 = 0.0, s2 = 0.0, s3 = 0.0, cross = 0.0;
        for (std::size_t t = 0; t < m; ++t) {
            const double gx = cond1x[t] - mu;
            const double gy = cond1y[t] - mu;
            const double g2 = cond2[t] - mu - gx - gy;
            s1 += gx;
            s2 += gx * gx;
            s3 += gx * gx * gx;
            cross += gx * gy * g2;
        }
        const double md = static_cast<double>(m);
        out.mu = mu;
        out.mean_g1 = s1 / md;
        out.xi1 = std::sqrt(s2 / md);
        out.mean_g1_se = out.xi1 / std::sqrt(md);
        out.e_g1_cubed = s3 / md;
        out.e_g1g1g2 = cross / md;
    }
    if (!(out.xi1 > floor)) {
        throw Error(ErrorKind::Degeneracy, "g1(X1) is degenerate (xi1 = " + std::to_string(out.xi1) + ")");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sparsity specification
// ---------------------------------------------------------------------------

/// rho as a literal in (0,1] or one of the symbolic rates "1", "n^-1/4",
/// "n^-1/2", "n^-1" resolved against the network size.
class RhoSpec {
public:
    static RhoSpec literal(double rho) {
        check_rho(rho);
        RhoSpec s;
        s.literal_ = rho;
        s.text_ = std::to_string(rho);
        return s;
    }

    static RhoSpec parse(const std::string& text) {
        RhoSpec s;
        s.text_ = text;
        if (text == "1") {
            s.exponent_ = 0.0;
        } else if (text == "n^-1/4") {
            s.exponent_ = -0.25;
        } else if (text == "n^-1/2") {
            s.exponent_ = -0.5;
        } else if (text == "n^-1") {
            s.exponent_ = -1.0;
        } else {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(text, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != text.size() || used == 0) {
                throw Error(ErrorKind::Parameter, "unrecognized rho specification '" + text + "'");
            }
            auto lit = literal(v);
            lit.text_ = text;
            return lit;
        }
        return s;
    }

    double resolve(std::size_t n) const {
        if (literal_ > 0.0) return literal_;
        return std::pow(static_cast<double>(n), exponent_);
    }

    const std::string& text() const noexcept { return text_; }

private:
    double literal_ = 0.0;
    double exponent_ = 0.0;
    std::string text_;
};

}  // namespace netmoment
