#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "netmoment/error.hpp"
#include "netmoment/harness.hpp"

using namespace netmoment;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.motif = motifs::edge();
    cfg.n_values = {20};
    cfg.n_mc = 2000;
    cfg.repetitions = 4;
    cfg.n_boot = 50;
    cfg.seed = 5;
    cfg.methods = {Method::EdgeworthEmpirical, Method::Normal, Method::Subsample, Method::Resample};
    return cfg;
}

std::vector<ExperimentRecord> without_timing(std::vector<ExperimentRecord> v) {
    std::erase_if(v, [](const ExperimentRecord& r) { return r.metric == "time_seconds"; });
    return v;
}

bool same_records(const std::vector<ExperimentRecord>& a, const std::vector<ExperimentRecord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const auto& x = a[k];
        const auto& y = b[k];
        if (x.method != y.method || x.graphon != y.graphon || x.motif != y.motif || x.n != y.n || x.rho != y.rho ||
            x.rep != y.rep || x.metric != y.metric || x.value != y.value) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST(Harness, SupGridError) {
    const std::vector<double> a{0.1, 0.5, 0.9};
    EXPECT_EQ(sup_grid_error(a, a), 0.0);
    EXPECT_EQ(sup_grid_error(std::vector<double>(3, 1.0), std::vector<double>(3, 0.0)), 1.0);
    EXPECT_NEAR(sup_grid_error(std::vector<double>{0.1, 0.57, 0.9}, a), 0.07, 1e-15);
    EXPECT_THROW(sup_grid_error(a, std::vector<double>{0.1}), Error);
}

TEST(Harness, TruthCdfIsAValidCdf) {
    const auto grid = default_grid();
    const auto t = monte_carlo_true_cdf(default_block_model(), 1.0, motifs::triangle(), 20, 3000, 1, grid);
    ASSERT_EQ(t.grid_values.size(), grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        EXPECT_GE(t.grid_values[k], 0.0);
        EXPECT_LE(t.grid_values[k], 1.0);
        if (k > 0) {
            EXPECT_GE(t.grid_values[k], t.grid_values[k - 1]);
        }
    }
}

TEST(Harness, TruthSelfConsistencyAcrossSeeds) {
    const std::size_t n_mc = 20000;
    const auto grid = default_grid();
    const auto g = default_block_model();
    const auto a = monte_carlo_true_cdf(g, 1.0, motifs::edge(), 40, n_mc, 1, grid);
    const auto b = monte_carlo_true_cdf(g, 1.0, motifs::edge(), 40, n_mc, 2, grid);
    const double tol = 5.0 / std::sqrt(static_cast<double>(n_mc));
    EXPECT_LE(std::abs(a.grid_values[20] - b.grid_values[20]), tol);
    EXPECT_LE(sup_grid_error(a.grid_values, b.grid_values), tol);
    EXPECT_LE(std::abs(a.mean), 5.0 * a.sd / std::sqrt(static_cast<double>(a.used)) + 0.1);
}

TEST(Harness, TruthCenteredAtExactMoment) {
    const std::size_t n_mc = 20000;
    const auto g = default_block_model();
    const double mu = population_moment(g, 1.0, motifs::edge(), ExactBlockModel{}).value;
    const auto t = monte_carlo_true_cdf(g, 1.0, motifs::edge(), 40, mu, n_mc, 3, default_grid());
    EXPECT_EQ(t.dropped, 0u);
    // T is only asymptotically centred; its mean is O(n^{-1/2}), so allow that bias on top of MC noise
    EXPECT_LE(std::abs(t.mean), 5.0 * t.sd / std::sqrt(static_cast<double>(n_mc)) + 1.0 / std::sqrt(40.0));
}

TEST(Harness, TruthErrorsWhenTooManyDegenerate) {
    // Sparse tiny networks: most triangles counts are zero everywhere
    EXPECT_THROW(monte_carlo_true_cdf(default_block_model(), 0.05, motifs::triangle(), 6, 0.001, 2000, 1,
                                      default_grid()),
                 Error);
}

TEST(Harness, NormalMethodErrorIsDistanceOfPhiToTruth) {
    auto cfg = small_config();
    cfg.methods = {Method::Normal};
    const auto recs = run_accuracy_experiment(cfg);
    const double mu = population_moment(cfg.graphon, 1.0, cfg.motif, ExactBlockModel{}).value;
    const auto truth = monte_carlo_true_cdf(cfg.graphon, 1.0, cfg.motif, 20, mu, cfg.n_mc,
                                            derive_seed(cfg.seed, "truth", 20), cfg.grid);
    const double expected = sup_grid_error(normal_on_grid(cfg.grid), truth.grid_values);
    int seen = 0;
    for (const auto& r : recs) {
        if (r.metric != "sup_error") continue;
        EXPECT_EQ(r.value, expected);
        ++seen;
    }
    EXPECT_EQ(seen, 4);
}

TEST(Harness, AccuracyRecordsValidAndThreadIndependent) {
    auto cfg = small_config();
    cfg.threads = 1;
    const auto one = run_accuracy_experiment(cfg);
    cfg.threads = 4;
    const auto four = run_accuracy_experiment(cfg);
    EXPECT_TRUE(same_records(without_timing(one), without_timing(four)));
    EXPECT_TRUE(same_records(without_timing(one), without_timing(run_accuracy_experiment(cfg))));
    std::size_t errors = 0;
    for (const auto& r : one) {
        EXPECT_TRUE(record_is_valid(r)) << r.metric << " " << r.value;
        if (r.metric == "sup_error") ++errors;
    }
    EXPECT_EQ(errors, 4u * 4u);
}

TEST(Harness, SparsityRhoOneMatchesAccuracy) {
    auto cfg = small_config();
    cfg.rho = {RhoSpec::parse("1")};
    EXPECT_TRUE(same_records(without_timing(run_accuracy_experiment(cfg)), without_timing(run_sparsity_sweep(cfg))));
}

TEST(Harness, SparsityMarksDegenerateCells) {
    auto cfg = small_config();
    cfg.motif = motifs::triangle();
    cfg.n_values = {10};
    cfg.rho = {RhoSpec::parse("1"), RhoSpec::parse("n^-1")};
    const auto recs = run_sparsity_sweep(cfg);
    bool sparse_degenerate = false;
    for (const auto& r : recs) {
        EXPECT_TRUE(record_is_valid(r));
        if (r.rho == 0.1 && r.metric == "degenerate") sparse_degenerate = true;
        if (r.rho == 0.1) {
            EXPECT_NE(r.metric, "sup_error");
        }
    }
    EXPECT_TRUE(sparse_degenerate);
}

TEST(Harness, CoverageLengthsEqualPerReplicate) {
    auto cfg = small_config();
    cfg.n_values = {40};
    cfg.repetitions = 50;
    cfg.motif = motifs::triangle();
    const auto recs = run_coverage_experiment(cfg);
    std::map<long, std::map<std::string, double>> lengths;
    for (const auto& r : recs) {
        EXPECT_TRUE(record_is_valid(r));
        if (r.metric == "length") lengths[r.rep][r.method] = r.value;
    }
    ASSERT_EQ(lengths.size(), 50u);
    for (auto& [rep, by] : lengths) {
        EXPECT_NEAR(by["edgeworth_empirical"], by["normal"], 1e-15);
        EXPECT_GT(by["subsample"], 0.0);
    }
}

TEST(Harness, PowerGrowsWithOffset) {
    auto cfg = small_config();
    cfg.n_values = {40};
    cfg.repetitions = 200;
    cfg.null_offsets = {0.0, 0.05};
    const auto rows = summarize(run_power_experiment(cfg));
    const double p0 = find_summary(rows, "edgeworth_test:offset=0", 40, "power").mean;
    const double p1 = find_summary(rows, "edgeworth_test:offset=0.05", 40, "power").mean;
    EXPECT_GT(p1, p0);
}

TEST(Harness, CsvSchema) {
    std::vector<ExperimentRecord> recs{{"normal", "BlockModel", "edge", 20, 0.5, 3, "sup_error", 0.125}};
    std::ostringstream out;
    write_records_csv(out, recs);
    EXPECT_EQ(out.str(), "method,graphon,motif,n,rho,rep,metric,value\nnormal,BlockModel,edge,20,0.5,3,sup_error,0.125\n");
}

TEST(Harness, RecordValidation) {
    EXPECT_TRUE(record_is_valid({"m", "g", "e", 1, 1, 0, "coverage", 1.0}));
    EXPECT_FALSE(record_is_valid({"m", "g", "e", 1, 1, 0, "coverage", 1.5}));
    EXPECT_FALSE(record_is_valid({"m", "g", "e", 1, 1, 0, "sup_error", -0.1}));
    EXPECT_FALSE(record_is_valid({"m", "g", "e", 1, 1, 0, "bogus", 0.1}));
    EXPECT_FALSE(record_is_valid({"m", "g", "e", 1, 1, 0, "length", NAN}));
}

TEST(Harness, ConfigValidation) {
    ExperimentConfig cfg;
    cfg.n_mc = 10;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.grid = {0.0, 0.0};
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.repetitions = 0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = {};
    cfg.n_mc = 10000;
    cfg.mu_draws = 50;
    EXPECT_THROW(cfg.validate(), Error);
    EXPECT_EQ(ExperimentConfig{}.sub_sample_size(80), 40u);
    EXPECT_EQ(default_mu_draws(100000), 1000000u);
}

TEST(Harness, PopulationMomentCache) {
    const auto dir = std::filesystem::temp_directory_path() / "netmoment-cache-test";
    std::filesystem::remove_all(dir);
    ExperimentConfig cfg;
    cfg.graphon = Graphon::smooth();
    cfg.graphon_key = "SmoothGraphon";
    cfg.n_mc = 1000;
    cfg.mu_draws = 20000;
    cfg.cache_dir = dir.string();
    const auto first = resolve_population_moment(cfg, 1.0);
    ASSERT_TRUE(std::filesystem::exists(dir));
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        (void)e;
        ++files;
    }
    EXPECT_EQ(files, 1u);
    const auto second = resolve_population_moment(cfg, 1.0);
    EXPECT_EQ(first.value, second.value);
    EXPECT_EQ(first.standard_error, second.standard_error);
    std::filesystem::remove_all(dir);
}

TEST(Harness, SummaryStatistics) {
    std::vector<ExperimentRecord> recs;
    for (int k = 0; k < 5; ++k) recs.push_back({"normal", "g", "edge", 10, 1.0, k, "sup_error", double(k)});
    const auto rows = summarize(recs);
    const auto& s = find_summary(rows, "normal", 10, "sup_error");
    EXPECT_EQ(s.count, 5u);
    EXPECT_EQ(s.mean, 2.0);
    EXPECT_EQ(s.median, 2.0);
    EXPECT_NEAR(s.sd, std::sqrt(2.5), 1e-15);
    EXPECT_THROW(find_summary(rows, "normal", 20, "sup_error"), Error);
    EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
}
