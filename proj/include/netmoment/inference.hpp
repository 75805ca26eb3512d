#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "netmoment/edgeworth.hpp"
#include "netmoment/error.hpp"
#include "netmoment/moments.hpp"
#include "netmoment/normal.hpp"

namespace netmoment {

enum class Alternative { TwoSided, Less, Greater };

struct TestResult {
    double t_obs = 0.0;
    double p_value = 0.0;
    /// p before clamping to [0,1]; the expansion is not a proper CDF.
    double p_raw = 0.0;
    double c_n = 0.0;
    double u_hat = 0.0;
    double s_hat = 0.0;
};

enum class IntervalMethod { EdgeworthCF, Normal };

inline const char* to_string(IntervalMethod m) { return m == IntervalMethod::EdgeworthCF ? "edgeworth" : "normal"; }

struct ConfidenceInterval {
    double lo = 0.0;
    double hi = 0.0;
    double alpha = 0.0;
    IntervalMethod method = IntervalMethod::EdgeworthCF;
    /// Set when the Cornish-Fisher quantiles came out in the wrong order and
    /// the endpoints were swapped.
    std::optional<std::string> warning;

    double length() const noexcept { return hi - lo; }
    bool covers(double mu) const noexcept { return lo <= mu && mu <= hi; }
};

inline void require_studentizable(const MomentStats& s) {
    if (s.degenerate || !(s.s_hat_sq > 0.0)) {
        throw Error(ErrorKind::Degeneracy, "S_hat is zero; the moment cannot be studentized");
    }
}

/// Tests H0: mu_n = c_n using the empirical Edgeworth expansion as the null
/// distribution of t = (U_hat - c_n) / S_hat.
inline TestResult one_sample_test(const MomentStats& s, double c_n, Alternative alt = Alternative::TwoSided) {
    require_studentizable(s);
    TestResult res;
    res.c_n = c_n;
    res.u_hat = s.u_hat;
    res.s_hat = s.s_hat();
    res.t_obs = (s.u_hat - c_n) / res.s_hat;
    const double g = expansion_cdf(EdgeworthCoefficients::from_stats(s), res.t_obs);
    switch (alt) {
        case Alternative::TwoSided: res.p_raw = 2.0 * std::min(g, 1.0 - g); break;
        case Alternative::Less: res.p_raw = g; break;
        case Alternative::Greater: res.p_raw = 1.0 - g; break;
    }
    res.p_value = std::clamp(res.p_raw, 0.0, 1.0);
    return res;
}

/// Two-sided 1 - alpha interval (U_hat - q_{1-alpha/2} S_hat, U_hat - q_{alpha/2} S_hat),
/// with Cornish-Fisher or plain normal quantiles.
inline ConfidenceInterval confidence_interval(const MomentStats& s, double alpha, IntervalMethod method) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::Parameter, "alpha must lie in (0,1)");
    require_studentizable(s);
    double q_lo = 0.0;
    double q_hi = 0.0;
    if (method == IntervalMethod::EdgeworthCF) {
        const auto c = EdgeworthCoefficients::from_stats(s);
        q_lo = cornish_fisher_quantile(c, alpha / 2.0);
        q_hi = cornish_fisher_quantile(c, 1.0 - alpha / 2.0);
    } else {
        q_lo = normal_quantile(alpha / 2.0);
        q_hi = normal_quantile(1.0 - alpha / 2.0);
    }
    const double sd = s.s_hat();
    ConfidenceInterval ci{s.u_hat - q_hi * sd, s.u_hat - q_lo * sd, alpha, method, std::nullopt};
    if (ci.lo > ci.hi) {
        std::swap(ci.lo, ci.hi);
        ci.warning = "Cornish-Fisher quantiles are not monotone at this sample size; endpoints swapped";
    }
    return ci;
}

/// The expansion is justified either for rho = O(1/log n) or when g1(X1) is
/// non-lattice. Returns a warning when neither is known to hold.
inline std::optional<std::string> expansion_applicability_warning(std::optional<double> rho, std::size_t n,
                                                                  bool assume_nonlattice) {
    if (assume_nonlattice) return std::nullopt;
    if (rho && n >= 3 && *rho * std::log(static_cast<double>(n)) <= 1.0) return std::nullopt;
    return std::string("expansion validity needs rho = O(1/log n) or a non-lattice g1(X1); neither was asserted");
}

}  // namespace netmoment
