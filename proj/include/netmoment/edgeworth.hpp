#pragma once

// One-term Edgeworth expansion for the studentized network moment
//
//   G(x) = Phi(x) + phi(x) / (sqrt(n) xi1^3) * { (2x^2 + 1)/6 * E[g1^3]
//                                              + (r-1)/2 * (x^2 + 1) * E[g1 g1 g2] }
//
// its Cornish-Fisher inversion, and the error-rate shorthand M(rho, n; R).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "netmoment/error.hpp"
#include "netmoment/format.hpp"
#include "netmoment/graphon.hpp"
#include "netmoment/moments.hpp"
#include "netmoment/motif.hpp"
#include "netmoment/normal.hpp"

namespace netmoment {

enum class Provenance { Population, Empirical };

struct EdgeworthCoefficients {
    double xi1 = 0.0;
    double e_g1_cubed = 0.0;
    double e_g1g1g2 = 0.0;
    std::size_t r = 2;
    std::size_t n = 2;
    Provenance provenance = Provenance::Empirical;

    static EdgeworthCoefficients from_stats(const MomentStats& s) {
        return {std::sqrt(s.xi1_hat_sq), s.e_g1_cubed, s.e_g1g1g2, s.motif.nodes(), s.n, Provenance::Empirical};
    }

    static EdgeworthCoefficients from_population(const PopulationCoefficients& p, std::size_t r, std::size_t n) {
        return {p.xi1, p.e_g1_cubed, p.e_g1g1g2, r, n, Provenance::Population};
    }

    void validate() const {
        if (!(xi1 > 0.0)) throw Error(ErrorKind::Degeneracy, "xi1 must be positive");
        if (r < 2 || n < r) throw Error(ErrorKind::Parameter, "need n >= r >= 2");
    }

    /// The bracketed polynomial divided by sqrt(n) xi1^3, at a given point.
    double correction(double x) const noexcept {
        const double scale = 1.0 / (std::sqrt(static_cast<double>(n)) * xi1 * xi1 * xi1);
        const double x2 = x * x;
        return scale * ((2.0 * x2 + 1.0) / 6.0 * e_g1_cubed +
                        (static_cast<double>(r) - 1.0) / 2.0 * (x2 + 1.0) * e_g1g1g2);
    }
};

/// Raw expansion value; not clamped, it can leave [0,1] in the tails.
inline double expansion_cdf(const EdgeworthCoefficients& c, double x) {
    c.validate();
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    return normal_cdf(x) + normal_pdf(x) * c.correction(x);
}

/// For plotting only: the expansion clamped to [0,1].
inline double expansion_cdf_clamped(const EdgeworthCoefficients& c, double x) {
    return std::clamp(expansion_cdf(c, x), 0.0, 1.0);
}

/// q_alpha = z_alpha - correction(z_alpha).
inline double cornish_fisher_quantile(const EdgeworthCoefficients& c, double alpha) {
    c.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::Parameter, "alpha must lie in (0,1)");
    const double z = normal_quantile(alpha);
    return z - c.correction(z);
}

/// M(rho, n; R) with natural logarithms:
///   acyclic: (rho n)^{-1} log^{1/2} n + n^{-1} log^{3/2} n
///   cyclic:  rho^{-r/2} n^{-1} log^{1/2} n + n^{-1} log^{3/2} n
inline double rate_bound(double rho, std::size_t n, const Motif& motif) {
    check_rho(rho);
    if (n < 3) throw Error(ErrorKind::Parameter, "rate bound needs n >= 3");
    const auto nd = static_cast<double>(n);
    const double lg = std::log(nd);
    const double tail = std::pow(lg, 1.5) / nd;
    if (motif.shape_class() == ShapeClass::Acyclic) return std::sqrt(lg) / (rho * nd) + tail;
    const double r = static_cast<double>(motif.nodes());
    return std::pow(rho, -r / 2.0) * std::sqrt(lg) / nd + tail;
}

/// The lattice {-2.0, -1.9, ..., 2.0}.
inline std::vector<double> default_grid() {
    std::vector<double> g;
    for (int k = -20; k <= 20; ++k) g.push_back(k / 10.0);
    return g;
}

inline std::vector<double> expansion_on_grid(const EdgeworthCoefficients& c, std::span<const double> grid,
                                             bool clamp = false) {
    std::vector<double> out;
    out.reserve(grid.size());
    for (double x : grid) out.push_back(clamp ? expansion_cdf_clamped(c, x) : expansion_cdf(c, x));
    return out;
}

inline std::vector<double> normal_on_grid(std::span<const double> grid) {
    std::vector<double> out;
    out.reserve(grid.size());
    for (double x : grid) out.push_back(normal_cdf(x));
    return out;
}

/// Writes "x,value" rows with a header.
inline void write_grid_csv(std::ostream& out, std::span<const double> grid, std::span<const double> values) {
    if (grid.size() != values.size()) throw Error(ErrorKind::DimensionMismatch, "grid and values differ in length");
    out << "x,value\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
        out << format_double(grid[k]) << ',' << format_double(values[k]) << '\n';
    }
}

}  // namespace netmoment
