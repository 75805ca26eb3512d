#pragma once

// Simulation protocols: Monte-Carlo ground truth for the studentized moment,
// the sup-over-grid CDF error, and the accuracy / coverage / sparsity / power
// experiments, all reproducible from a single seed regardless of thread count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "netmoment/bootstrap.hpp"
#include "netmoment/edgeworth.hpp"
#include "netmoment/error.hpp"
#include "netmoment/format.hpp"
#include "netmoment/graphon.hpp"
#include "netmoment/inference.hpp"
#include "netmoment/moments.hpp"
#include "netmoment/motif.hpp"
#include "netmoment/normal.hpp"
#include "netmoment/parallel.hpp"
#include "netmoment/rng.hpp"

namespace netmoment {

enum class Method { EdgeworthEmpirical, Normal, Subsample, Resample };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::EdgeworthEmpirical: return "edgeworth_empirical";
        case Method::Normal: return "normal";
        case Method::Subsample: return "subsample";
        case Method::Resample: return "resample";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    if (s == "edgeworth_empirical") return Method::EdgeworthEmpirical;
    if (s == "normal") return Method::Normal;
    if (s == "subsample") return Method::Subsample;
    if (s == "resample") return Method::Resample;
    throw Error(ErrorKind::Config, "unknown method '" + s + "'");
}

struct ExperimentConfig {
    Graphon graphon = default_block_model();
    /// Canonical text of the graphon specification; keys the moment cache.
    std::string graphon_key = "BlockModel";
    Motif motif = motifs::edge();
    std::vector<std::size_t> n_values{10, 20, 40, 80};
    std::vector<RhoSpec> rho{RhoSpec::parse("1")};
    std::size_t n_mc = 100000;
    std::size_t n_boot = 500;
    /// Sub-sample size; n/2 when unset.
    std::optional<std::size_t> n_star;
    std::size_t repetitions = 30;
    std::uint64_t seed = 1;
    std::vector<Method> methods{Method::EdgeworthEmpirical, Method::Normal};
    std::vector<double> grid = default_grid();
    std::string output;
    double alpha = 0.2;
    /// Worker threads; 0 uses every hardware thread.
    std::size_t threads = 0;
    /// Monte-Carlo size for mu_n of non-block graphons; defaults to
    /// max(1e6, 100 sqrt(n_mc)).
    std::optional<std::size_t> mu_draws;
    /// Directory for cached mu_n estimates; empty disables caching.
    std::string cache_dir;
    double max_degenerate_fraction = 0.01;
    double max_bootstrap_drop = 0.1;
    /// Offsets c_n - mu_n for the power experiment.
    std::vector<double> null_offsets{0.0};
    CostCaps caps;

    void validate() const {
        if (n_mc < 1000) throw Error(ErrorKind::Config, "n_mc must be at least 1000");
        if (repetitions < 1) throw Error(ErrorKind::Config, "repetitions must be at least 1");
        if (n_values.empty()) throw Error(ErrorKind::Config, "n list is empty");
        for (auto n : n_values) {
            if (n < motif.nodes() + 1) throw Error(ErrorKind::Config, "every n must exceed the motif size");
        }
        if (rho.empty()) throw Error(ErrorKind::Config, "rho list is empty");
        if (methods.empty()) throw Error(ErrorKind::Config, "no methods selected");
        if (grid.empty()) throw Error(ErrorKind::Config, "grid is empty");
        for (std::size_t k = 1; k < grid.size(); ++k) {
            if (!(grid[k] > grid[k - 1])) throw Error(ErrorKind::Config, "grid must be strictly increasing");
        }
        if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::Config, "alpha must lie in (0,1)");
        if (n_boot < 1) throw Error(ErrorKind::Config, "n_boot must be positive");
        if (mu_draws && static_cast<double>(*mu_draws) < 100.0 * std::sqrt(static_cast<double>(n_mc))) {
            throw Error(ErrorKind::Config, "mu_draws must be at least 100 * sqrt(n_mc)");
        }
    }

    std::size_t sub_sample_size(std::size_t n) const { return n_star ? *n_star : n / 2; }
};

struct ExperimentRecord {
    std::string method;
    std::string graphon;
    std::string motif;
    std::size_t n = 0;
    double rho = 1.0;
    long rep = 0;
    std::string metric;
    double value = 0.0;
};

/// Range checks per metric: coverage/power in [0,1], errors, lengths and
/// times nonnegative, degenerate flags 0 or 1.
inline bool record_is_valid(const ExperimentRecord& r) {
    if (!std::isfinite(r.value)) return false;
    if (r.metric == "coverage" || r.metric == "power") return r.value >= 0.0 && r.value <= 1.0;
    if (r.metric == "sup_error" || r.metric == "length" || r.metric == "time_seconds") return r.value >= 0.0;
    if (r.metric == "degenerate") return r.value == 0.0 || r.value == 1.0;
    return false;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::uint64_t rep_index(std::size_t n, std::size_t rep) {
    return static_cast<std::uint64_t>(n) * 1'000'003ULL + rep;
}

}  // namespace detail

inline void write_records_csv(std::ostream& out, std::span<const ExperimentRecord> records) {
    out << "method,graphon,motif,n,rho,rep,metric,value\n";
    for (const auto& r : records) {
        out << r.method << ',' << r.graphon << ',' << r.motif << ',' << r.n << ',' << format_double(r.rho)
            << ',' << r.rep << ',' << r.metric << ',' << format_double(r.value) << '\n';
    }
}

/// sup_k |approx[k] - truth[k]| over an aligned grid.
inline double sup_grid_error(std::span<const double> approx, std::span<const double> truth) {
    if (approx.size() != truth.size()) throw Error(ErrorKind::DimensionMismatch, "grids differ in length");
    double worst = 0.0;
    for (std::size_t k = 0; k < approx.size(); ++k) worst = std::max(worst, std::abs(approx[k] - truth[k]));
    return worst;
}

inline std::vector<double> ecdf_on_grid(const EmpiricalCdf& f, std::span<const double> grid) {
    std::vector<double> out;
    out.reserve(grid.size());
    for (double u : grid) out.push_back(cdf_eval(f, u));
    return out;
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw Error(ErrorKind::InvalidSize, "median of empty set");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ---------------------------------------------------------------------------
// Population moment with optional on-disk cache
// ---------------------------------------------------------------------------

inline std::size_t default_mu_draws(std::size_t n_mc) {
    const auto floor = static_cast<std::size_t>(std::ceil(100.0 * std::sqrt(static_cast<double>(n_mc))));
    return std::max<std::size_t>(1'000'000, floor);
}

/// mu_n for the configured graphon: exact for block models, otherwise a
/// Monte-Carlo estimate cached under cache_dir by a hash of its inputs.
inline Estimate resolve_population_moment(const ExperimentConfig& cfg, double rho) {
    if (cfg.graphon.kind() == GraphonKind::BlockModel) {
        return population_moment(cfg.graphon, rho, cfg.motif, ExactBlockModel{});
    }
    const std::size_t draws = cfg.mu_draws.value_or(default_mu_draws(cfg.n_mc));
    const std::uint64_t mc_seed = derive_seed(cfg.seed, "population-moment");
    std::filesystem::path file;
    if (!cfg.cache_dir.empty()) {
        std::ostringstream key;
        key << cfg.graphon_key << '|' << format_double(rho) << '|' << cfg.motif.nodes() << ':'
            << cfg.motif.mask() << '|' << draws << '|' << mc_seed;
        char name[32];
        std::snprintf(name, sizeof(name), "mu-%016llx.txt",
                      static_cast<unsigned long long>(label_hash(key.str())));
        file = std::filesystem::path(cfg.cache_dir) / name;
        std::ifstream in(file);
        Estimate e;
        if (in >> e.value >> e.standard_error) return e;
    }
    const auto e = population_moment(cfg.graphon, rho, cfg.motif, MonteCarlo{draws, mc_seed, 0});
    if (!file.empty()) {
        std::filesystem::create_directories(file.parent_path());
        std::ofstream out(file);
        out << format_double(e.value) << ' ' << format_double(e.standard_error) << '\n';
    }
    return e;
}

// ---------------------------------------------------------------------------
// Monte-Carlo truth
// ---------------------------------------------------------------------------

struct TruthCdf {
    std::vector<double> grid_values;
    std::size_t used = 0;
    std::size_t dropped = 0;
    double mean = 0.0;
    double sd = 0.0;
};

/// Empirical CDF of T = (U_hat - mu_n) / S_hat over n_mc independent networks,
/// evaluated on the grid. Networks with S_hat = 0 are skipped and counted;
/// more than `max_degenerate_fraction` of them is an error.
inline TruthCdf monte_carlo_true_cdf(const Graphon& g, double rho, const Motif& motif, std::size_t n, double mu,
                                     std::size_t n_mc, std::uint64_t seed, std::span<const double> grid,
                                     std::size_t threads = 0, double max_degenerate_fraction = 0.01,
                                     const CostCaps& caps = {}) {
    if (n_mc < 1) throw Error(ErrorKind::Parameter, "n_mc must be positive");
    std::vector<double> t(n_mc, std::numeric_limits<double>::quiet_NaN());
    StatsOptions opts;
    opts.pair_projection = false;
    opts.caps = caps;
    parallel_for(n_mc, threads, [&](std::size_t i) {
        const auto a = sample_network(g, rho, n, derive_seed(seed, "truth", i));
        const auto s = compute_stats(a, motif, opts);
        if (!s.degenerate) t[i] = (s.u_hat - mu) / s.s_hat();
    });
    TruthCdf out;
    std::vector<double> kept;
    kept.reserve(n_mc);
    for (double v : t) {
        if (std::isnan(v)) {
            ++out.dropped;
        } else {
            kept.push_back(v);
        }
    }
    out.used = kept.size();
    if (static_cast<double>(out.dropped) > max_degenerate_fraction * static_cast<double>(n_mc) || kept.empty()) {
        throw Error(ErrorKind::Degeneracy, std::to_string(out.dropped) + " of " + std::to_string(n_mc) +
                                               " Monte-Carlo networks had S_hat = 0");
    }
    double sum = 0.0;
    for (double v : kept) sum += v;
    out.mean = sum / static_cast<double>(kept.size());
    double ss = 0.0;
    for (double v : kept) ss += (v - out.mean) * (v - out.mean);
    out.sd = kept.size() > 1 ? std::sqrt(ss / static_cast<double>(kept.size() - 1)) : 0.0;
    out.grid_values = ecdf_on_grid(EmpiricalCdf(std::move(kept)), grid);
    return out;
}

/// Convenience overload resolving mu_n exactly (block model) or by Monte Carlo.
inline TruthCdf monte_carlo_true_cdf(const Graphon& g, double rho, const Motif& motif, std::size_t n,
                                     std::size_t n_mc, std::uint64_t seed, std::span<const double> grid,
                                     std::size_t threads = 0) {
    ExperimentConfig cfg;
    cfg.graphon = g;
    cfg.graphon_key = g.name();
    cfg.motif = motif;
    cfg.n_mc = n_mc;
    cfg.seed = seed;
    const double mu = resolve_population_moment(cfg, rho).value;
    return monte_carlo_true_cdf(g, rho, motif, n, mu, n_mc, seed, grid, threads);
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

namespace detail {

struct CellContext {
    const ExperimentConfig& cfg;
    std::size_t n;
    double rho;
    double mu;

    ExperimentRecord record(const std::string& method, long rep, const std::string& metric, double value) const {
        return {method, cfg.graphon.name(), cfg.motif.name(), n, rho, rep, metric, value};
    }
};

inline std::uint64_t data_seed(const ExperimentConfig& cfg, std::size_t n, std::size_t rep) {
    return derive_seed(cfg.seed, "data", rep_index(n, rep));
}

inline BootstrapResult run_scheme(const ExperimentConfig& cfg, Method m, const AdjacencyMatrix& a,
                                                 std::size_t n, std::size_t rep) {
    BootstrapOptions bo;
    bo.caps = cfg.caps;
    if (m == Method::Subsample) {
        return subsample_distribution(a, cfg.motif, cfg.sub_sample_size(n), cfg.n_boot,
                                      derive_seed(cfg.seed, "subsample", rep_index(n, rep)), bo);
    }
    return resample_distribution(a, cfg.motif, cfg.n_boot, derive_seed(cfg.seed, "resample", rep_index(n, rep)), bo);
}

/// One (n, rho) cell of the accuracy experiment.
inline std::vector<ExperimentRecord> accuracy_cell(const CellContext& ctx, std::span<const double> truth,
                                                   bool tolerate_degenerate) {
    const auto& cfg = ctx.cfg;
    std::vector<std::vector<ExperimentRecord>> per_rep(cfg.repetitions);
    parallel_for(cfg.repetitions, cfg.threads, [&](std::size_t rep) {
        auto& out = per_rep[rep];
        const auto rep_l = static_cast<long>(rep);
        const auto a = sample_network(cfg.graphon, ctx.rho, ctx.n, data_seed(cfg, ctx.n, rep));
        for (Method m : cfg.methods) {
            const std::string name = to_string(m);
            const auto t0 = std::chrono::steady_clock::now();
            std::vector<double> approx;
            bool degenerate = false;
            switch (m) {
                case Method::Normal:
                    approx = normal_on_grid(cfg.grid);
                    break;
                case Method::EdgeworthEmpirical: {
                    StatsOptions so;
                    so.caps = cfg.caps;
                    const auto s = compute_stats(a, cfg.motif, so);
                    if (s.degenerate) {
                        degenerate = true;
                    } else {
                        approx = expansion_on_grid(EdgeworthCoefficients::from_stats(s), cfg.grid);
                    }
                    break;
                }
                case Method::Subsample:
                case Method::Resample: {
                    const auto res = run_scheme(cfg, m, a, ctx.n, rep);
                    if (res.cdf.empty() || res.drop_fraction() > cfg.max_bootstrap_drop) {
                        if (!tolerate_degenerate) res.check_drop_rate(cfg.max_bootstrap_drop);
                        if (res.cdf.empty() && !tolerate_degenerate) {
                            throw Error(ErrorKind::Degeneracy, "every bootstrap replicate was degenerate");
                        }
                        degenerate = true;
                    } else {
                        approx = ecdf_on_grid(res.cdf, cfg.grid);
                    }
                    break;
                }
            }
            const double secs = seconds_since(t0);
            if (degenerate) {
                out.push_back(ctx.record(name, rep_l, "degenerate", 1.0));
                continue;
            }
            out.push_back(ctx.record(name, rep_l, "sup_error", sup_grid_error(approx, truth)));
            out.push_back(ctx.record(name, rep_l, "time_seconds", secs));
        }
    });
    std::vector<ExperimentRecord> all;
    for (auto& v : per_rep) all.insert(all.end(), v.begin(), v.end());
    return all;
}

inline double expected_occurrences(std::size_t n, const Motif& motif, double mu) {
    return static_cast<double>(binomial(n, motif.nodes())) * mu;
}

}  // namespace detail

/// Compares each method's CDF approximation to the Monte-Carlo truth with the
/// sup-grid error, for every n and rho in the configuration.
inline std::vector<ExperimentRecord> run_accuracy_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<ExperimentRecord> records;
    for (const auto& rho_spec : cfg.rho) {
        for (std::size_t n : cfg.n_values) {
            const double rho = rho_spec.resolve(n);
            const double mu = resolve_population_moment(cfg, rho).value;
            const auto truth = monte_carlo_true_cdf(cfg.graphon, rho, cfg.motif, n, mu, cfg.n_mc,
                                                    derive_seed(cfg.seed, "truth", n), cfg.grid, cfg.threads,
                                                    cfg.max_degenerate_fraction, cfg.caps);
            auto cell = detail::accuracy_cell({cfg, n, rho, mu}, truth.grid_values, false);
            records.insert(records.end(), cell.begin(), cell.end());
        }
    }
    return records;
}

/// Accuracy experiment across the configured sparsity levels. Cells whose
/// expected motif count is below one, or whose Monte-Carlo truth is too often
/// degenerate, are recorded as degenerate instead of failing the run.
inline std::vector<ExperimentRecord> run_sparsity_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<ExperimentRecord> records;
    for (const auto& rho_spec : cfg.rho) {
        for (std::size_t n : cfg.n_values) {
            const double rho = rho_spec.resolve(n);
            const double mu = resolve_population_moment(cfg, rho).value;
            const detail::CellContext ctx{cfg, n, rho, mu};
            auto mark_degenerate = [&] {
                for (Method m : cfg.methods) records.push_back(ctx.record(to_string(m), -1, "degenerate", 1.0));
            };
            if (detail::expected_occurrences(n, cfg.motif, mu) < 1.0) {
                mark_degenerate();
                continue;
            }
            std::optional<TruthCdf> truth;
            try {
                truth = monte_carlo_true_cdf(cfg.graphon, rho, cfg.motif, n, mu, cfg.n_mc,
                                             derive_seed(cfg.seed, "truth", n), cfg.grid, cfg.threads,
                                             cfg.max_degenerate_fraction, cfg.caps);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Degeneracy) throw;
                mark_degenerate();
                continue;
            }
            auto cell = detail::accuracy_cell(ctx, truth->grid_values, true);
            records.insert(records.end(), cell.begin(), cell.end());
        }
    }
    return records;
}

/// Builds a 1 - alpha interval per method on each replicate network and
/// records whether it covers mu_n, its length and its cost.
inline std::vector<ExperimentRecord> run_coverage_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<ExperimentRecord> records;
    for (const auto& rho_spec : cfg.rho) {
        for (std::size_t n : cfg.n_values) {
            const double rho = rho_spec.resolve(n);
            const double mu = resolve_population_moment(cfg, rho).value;
            const detail::CellContext ctx{cfg, n, rho, mu};
            std::vector<std::vector<ExperimentRecord>> per_rep(cfg.repetitions);
            parallel_for(cfg.repetitions, cfg.threads, [&](std::size_t rep) {
                auto& out = per_rep[rep];
                const auto rep_l = static_cast<long>(rep);
                const auto a = sample_network(cfg.graphon, rho, n, detail::data_seed(cfg, n, rep));
                StatsOptions so;
                so.caps = cfg.caps;
                const auto t_stats = std::chrono::steady_clock::now();
                const auto s = compute_stats(a, cfg.motif, so);
                const double stats_secs = detail::seconds_since(t_stats);
                for (Method m : cfg.methods) {
                    const std::string name = to_string(m);
                    if (s.degenerate) {
                        out.push_back(ctx.record(name, rep_l, "degenerate", 1.0));
                        continue;
                    }
                    const auto t0 = std::chrono::steady_clock::now();
                    ConfidenceInterval ci;
                    double secs = 0.0;
                    switch (m) {
                        case Method::EdgeworthEmpirical:
                            ci = confidence_interval(s, cfg.alpha, IntervalMethod::EdgeworthCF);
                            secs = stats_secs + detail::seconds_since(t0);
                            break;
                        case Method::Normal:
                            ci = confidence_interval(s, cfg.alpha, IntervalMethod::Normal);
                            secs = detail::seconds_since(t0);
                            break;
                        case Method::Subsample:
                        case Method::Resample: {
                            const auto res = detail::run_scheme(cfg, m, a, n, rep);
                            res.check_drop_rate(cfg.max_bootstrap_drop);
                            const double sd = s.s_hat();
                            ci.lo = s.u_hat - res.cdf.quantile(1.0 - cfg.alpha / 2.0) * sd;
                            ci.hi = s.u_hat - res.cdf.quantile(cfg.alpha / 2.0) * sd;
                            ci.alpha = cfg.alpha;
                            secs = stats_secs + detail::seconds_since(t0);
                            break;
                        }
                    }
                    out.push_back(ctx.record(name, rep_l, "coverage", ci.covers(mu) ? 1.0 : 0.0));
                    out.push_back(ctx.record(name, rep_l, "length", ci.length()));
                    out.push_back(ctx.record(name, rep_l, "time_seconds", secs));
                }
            });
            for (auto& v : per_rep) records.insert(records.end(), v.begin(), v.end());
        }
    }
    return records;
}

/// Rejection indicator of the two-sided Edgeworth test of H0: mu_n = mu + offset
/// at level alpha. The method column reads "edgeworth_test:offset=<offset>".
inline std::vector<ExperimentRecord> run_power_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<ExperimentRecord> records;
    for (const auto& rho_spec : cfg.rho) {
        for (std::size_t n : cfg.n_values) {
            const double rho = rho_spec.resolve(n);
            const double mu = resolve_population_moment(cfg, rho).value;
            const detail::CellContext ctx{cfg, n, rho, mu};
            std::vector<std::vector<ExperimentRecord>> per_rep(cfg.repetitions);
            parallel_for(cfg.repetitions, cfg.threads, [&](std::size_t rep) {
                const auto a = sample_network(cfg.graphon, rho, n, detail::data_seed(cfg, n, rep));
                StatsOptions so;
                so.caps = cfg.caps;
                const auto s = compute_stats(a, cfg.motif, so);
                for (double offset : cfg.null_offsets) {
                    const std::string name = "edgeworth_test:offset=" + format_double(offset);
                    if (s.degenerate) {
                        per_rep[rep].push_back(ctx.record(name, static_cast<long>(rep), "degenerate", 1.0));
                        continue;
                    }
                    const auto t = one_sample_test(s, mu + offset);
                    per_rep[rep].push_back(
                        ctx.record(name, static_cast<long>(rep), "power", t.p_value < cfg.alpha ? 1.0 : 0.0));
                }
            });
            for (auto& v : per_rep) records.insert(records.end(), v.begin(), v.end());
        }
    }
    return records;
}

struct RecordSummary {
    std::string method;
    std::size_t n = 0;
    double rho = 0.0;
    std::string metric;
    std::size_t count = 0;
    double mean = 0.0;
    double sd = 0.0;
    double median = 0.0;
};

/// Mean, standard deviation and median per (method, n, rho, metric).
inline std::vector<RecordSummary> summarize(std::span<const ExperimentRecord> records) {
    std::map<std::tuple<std::string, std::size_t, double, std::string>, std::vector<double>> groups;
    for (const auto& r : records) groups[{r.method, r.n, r.rho, r.metric}].push_back(r.value);
    std::vector<RecordSummary> out;
    for (auto& [key, values] : groups) {
        RecordSummary s;
        std::tie(s.method, s.n, s.rho, s.metric) = key;
        s.count = values.size();
        double sum = 0.0;
        for (double v : values) sum += v;
        s.mean = sum / static_cast<double>(values.size());
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
        s.median = median(values);
        out.push_back(std::move(s));
    }
    return out;
}

/// Looks up one summary row; throws if absent.
inline const RecordSummary& find_summary(std::span<const RecordSummary> rows, const std::string& method,
                                         std::size_t n, const std::string& metric, std::optional<double> rho = {}) {
    for (const auto& s : rows) {
        if (s.method == method && s.n == n && s.metric == metric && (!rho || std::abs(s.rho - *rho) < 1e-12)) {
            return s;
        }
    }
    throw Error(ErrorKind::Parameter, "no summary for " + method + " n=" + std::to_string(n) + " " + metric);
}

}  // namespace netmoment
