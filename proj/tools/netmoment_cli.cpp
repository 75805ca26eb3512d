// Command-line front end: sampling, moment statistics, Edgeworth curves,
// confidence intervals, tests, bootstraps and the simulation experiments.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netmoment/bootstrap.hpp"
#include "netmoment/config.hpp"
#include "netmoment/edgeworth.hpp"
#include "netmoment/graph.hpp"
#include "netmoment/graphon.hpp"
#include "netmoment/harness.hpp"
#include "netmoment/inference.hpp"
#include "netmoment/moments.hpp"
#include "netmoment/motif.hpp"

namespace nm = netmoment;
using nm::json;

namespace {

/// Inline JSON, a path to a JSON file, or a bare name.
json spec_argument(const std::string& arg) {
    if (!arg.empty() && (arg.front() == '{' || arg.front() == '"')) return json::parse(arg);
    if (std::filesystem::is_regular_file(arg)) return nm::load_json_file(arg);
    return json(arg);
}

nm::AdjacencyMatrix load_graph(const std::string& path, std::size_t nodes) {
    if (path == "-") return nm::read_edge_list(std::cin, nodes);
    std::ifstream in(path);
    if (!in) throw nm::Error(nm::ErrorKind::Io, "cannot open " + path);
    return nm::read_edge_list(in, nodes);
}

json stats_json(const nm::MomentStats& s) {
    return {{"n", s.n},
            {"motif", s.motif.name()},
            {"r", s.motif.nodes()},
            {"u_hat", s.u_hat},
            {"s_hat_sq", s.s_hat_sq},
            {"s_hat", s.s_hat()},
            {"xi1_hat_sq", s.xi1_hat_sq},
            {"e_g1_cubed", s.e_g1_cubed},
            {"e_g1g1g2", s.e_g1g1g2},
            {"degenerate", s.degenerate}};
}

void warn(const std::optional<std::string>& w) {
    if (w) std::cerr << "warning: " << *w << '\n';
}

struct GraphArgs {
    std::string graph;
    std::string motif = "edge";
    std::size_t nodes = 0;
    std::uint64_t max_subsets = nm::CostCaps{}.max_subsets;
    std::size_t pair_cap = nm::CostCaps{}.pair_projection_node_cap;
    bool override_caps = false;

    void attach(CLI::App* app) {
        app->add_option("--graph", graph, "Edge-list file (1-based ids), or - for stdin")->required();
        app->add_option("--motif", motif, "Built-in name, JSON edge list, or JSON file");
        app->add_option("--nodes", nodes, "Node count when isolated trailing nodes are not listed");
        app->add_option("--max-subsets", max_subsets, "Cap on enumerated r-subsets");
        app->add_option("--pair-node-cap", pair_cap, "Node cap for O(n^4) pair projections");
        app->add_flag("--override-caps", override_caps, "Ignore the cost caps");
    }

    nm::StatsOptions options() const {
        nm::StatsOptions o;
        o.caps = {max_subsets, pair_cap, override_caps};
        return o;
    }

    nm::MomentStats stats() const {
        return nm::compute_stats(load_graph(graph, nodes), nm::motif_from_json(spec_argument(motif)), options());
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Network moment inference with empirical Edgeworth expansions"};
    app.require_subcommand(1);

    // sample
    auto* sample = app.add_subcommand("sample", "Sample a network from a graphon");
    std::string graphon_arg = "BlockModel";
    std::size_t sample_n = 80;
    std::string rho_arg = "1";
    std::uint64_t seed = 1;
    std::string out_path;
    sample->add_option("--graphon", graphon_arg, "Graphon kind, JSON spec, or JSON file");
    sample->add_option("--n", sample_n, "Number of nodes");
    sample->add_option("--rho", rho_arg, "Sparsity: literal or 1, n^-1/4, n^-1/2, n^-1");
    sample->add_option("--seed", seed, "Random seed");
    sample->add_option("--out", out_path, "Output edge-list file (default stdout)");

    // moments
    auto* moments = app.add_subcommand("moments", "Sample moment and projection statistics");
    GraphArgs moment_args;
    moment_args.attach(moments);
    bool with_jackknife = false;
    moments->add_flag("--jackknife", with_jackknife, "Also report the jackknife variance");

    // edgeworth
    auto* edgeworth = app.add_subcommand("edgeworth", "Evaluate the Edgeworth expansion on a grid (CSV)");
    GraphArgs edge_args;
    edge_args.attach(edgeworth);
    double grid_from = -2.0;
    double grid_to = 2.0;
    double grid_step = 0.1;
    bool clamp = false;
    bool assume_nonlattice = false;
    std::optional<double> rho_hint;
    edgeworth->add_option("--from", grid_from, "Grid start");
    edgeworth->add_option("--to", grid_to, "Grid end");
    edgeworth->add_option("--step", grid_step, "Grid step");
    edgeworth->add_flag("--clamp", clamp, "Clamp values to [0,1] (plotting only)");
    edgeworth->add_flag("--assume-nonlattice", assume_nonlattice, "Assert g1(X1) is non-lattice");
    edgeworth->add_option("--rho-hint", rho_hint, "Known sparsity level, for the applicability check");

    // ci
    auto* ci = app.add_subcommand("ci", "Two-sided confidence interval for the population moment");
    GraphArgs ci_args;
    ci_args.attach(ci);
    double alpha = 0.2;
    std::string ci_method = "edgeworth";
    ci->add_option("--alpha", alpha, "1 - confidence level");
    ci->add_option("--method", ci_method, "edgeworth | normal")->check(CLI::IsMember({"edgeworth", "normal"}));

    // test
    auto* test = app.add_subcommand("test", "One-sample test of H0: mu_n = c_n");
    GraphArgs test_args;
    test_args.attach(test);
    double null_value = 0.0;
    std::string alternative = "two-sided";
    test->add_option("--null", null_value, "Hypothesized moment c_n")->required();
    test->add_option("--alternative", alternative, "two-sided | less | greater")
        ->check(CLI::IsMember({"two-sided", "less", "greater"}));

    // bootstrap
    auto* boot = app.add_subcommand("bootstrap", "Network bootstrap of the studentized moment (CSV)");
    GraphArgs boot_args;
    boot_args.attach(boot);
    std::string scheme = "subsample";
    std::optional<std::size_t> n_star;
    std::size_t replicates = 2000;
    bool boot_jackknife = false;
    boot->add_option("--scheme", scheme, "subsample | resample")->check(CLI::IsMember({"subsample", "resample"}));
    boot->add_option("--nstar", n_star, "Sub-sample size (default n/2)");
    boot->add_option("--B", replicates, "Number of replicates");
    boot->add_option("--seed", seed, "Random seed");
    boot->add_flag("--jackknife", boot_jackknife, "Studentize replicates with the jackknife variance");

    // experiment
    auto* experiment = app.add_subcommand("experiment", "Run a simulation protocol");
    std::string protocol;
    std::string config_path;
    std::string experiment_out;
    std::optional<std::size_t> threads;
    experiment->add_option("protocol", protocol, "accuracy | coverage | sparsity | power")
        ->required()
        ->check(CLI::IsMember({"accuracy", "coverage", "sparsity", "power"}));
    experiment->add_option("--config", config_path, "JSON configuration")->required();
    experiment->add_option("--out", experiment_out, "Output CSV (overrides config.output)");
    experiment->add_option("--threads", threads, "Worker threads (0 = all)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sample) {
            const auto g = nm::graphon_from_json(spec_argument(graphon_arg));
            const double rho = nm::RhoSpec::parse(rho_arg).resolve(sample_n);
            const auto a = nm::sample_network(g, rho, sample_n, seed);
            if (out_path.empty()) {
                nm::write_edge_list(std::cout, a);
            } else {
                std::ofstream out(out_path);
                nm::write_edge_list(out, a);
            }
        } else if (*moments) {
            const auto a = load_graph(moment_args.graph, moment_args.nodes);
            const auto motif = nm::motif_from_json(spec_argument(moment_args.motif));
            const auto s = nm::compute_stats(a, motif, moment_args.options());
            auto j = stats_json(s);
            if (with_jackknife) j["s_hat_sq_jackknife"] = nm::jackknife_variance(a, motif, moment_args.options().caps);
            std::cout << j.dump() << '\n';
        } else if (*edgeworth) {
            const auto s = edge_args.stats();
            nm::require_studentizable(s);
            warn(nm::expansion_applicability_warning(rho_hint, s.n, assume_nonlattice));
            std::vector<double> grid;
            for (long k = 0;; ++k) {
                const double x = grid_from + static_cast<double>(k) * grid_step;
                if (x > grid_to + 1e-9) break;
                grid.push_back(std::round(x * 1e9) / 1e9);
            }
            const auto values = nm::expansion_on_grid(nm::EdgeworthCoefficients::from_stats(s), grid, clamp);
            nm::write_grid_csv(std::cout, grid, values);
        } else if (*ci) {
            const auto s = ci_args.stats();
            const auto method = ci_method == "edgeworth" ? nm::IntervalMethod::EdgeworthCF : nm::IntervalMethod::Normal;
            const auto interval = nm::confidence_interval(s, alpha, method);
            json j{{"method", nm::to_string(method)}, {"alpha", alpha},   {"lo", interval.lo},
                   {"hi", interval.hi},               {"u_hat", s.u_hat}, {"s_hat", s.s_hat()}};
            if (interval.warning) j["warning"] = *interval.warning;
            std::cout << j.dump() << '\n';
        } else if (*test) {
            const auto s = test_args.stats();
            const auto alt = alternative == "two-sided" ? nm::Alternative::TwoSided
                             : alternative == "less"    ? nm::Alternative::Less
                                                        : nm::Alternative::Greater;
            const auto r = nm::one_sample_test(s, null_value, alt);
            std::cout << json{{"t_obs", r.t_obs},         {"p_value", r.p_value}, {"p_raw", r.p_raw},
                              {"c_n", r.c_n},             {"u_hat", r.u_hat},     {"s_hat", r.s_hat},
                              {"alternative", alternative}}
                             .dump()
                      << '\n';
        } else if (*boot) {
            const auto a = load_graph(boot_args.graph, boot_args.nodes);
            const auto motif = nm::motif_from_json(spec_argument(boot_args.motif));
            nm::BootstrapOptions bo;
            bo.caps = boot_args.options().caps;
            bo.variance = boot_jackknife ? nm::ReplicateVariance::Jackknife : nm::ReplicateVariance::Projection;
            const auto res = scheme == "subsample"
                                 ? nm::subsample_distribution(a, motif, n_star.value_or(a.size() / 2), replicates,
                                                              seed, bo)
                                 : nm::resample_distribution(a, motif, replicates, seed, bo);
            res.check_drop_rate();
            std::cout << "kind,key,value\n";
            std::cout.precision(17);
            std::size_t k = 0;
            for (double v : res.cdf.sorted_samples()) std::cout << "replicate," << k++ << ',' << v << '\n';
            for (double q : {0.025, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.975}) {
                std::cout << "quantile," << q << ',' << res.cdf.quantile(q) << '\n';
            }
            std::cout << "summary,requested," << res.requested << '\n'
                      << "summary,dropped," << res.dropped << '\n'
                      << "summary,u_hat," << res.u_hat << '\n';
        } else if (*experiment) {
            auto cfg = nm::experiment_config_from_json(nm::load_json_file(config_path));
            if (threads) cfg.threads = *threads;
            if (!experiment_out.empty()) cfg.output = experiment_out;
            std::vector<nm::ExperimentRecord> records;
            if (protocol == "accuracy") {
                records = nm::run_accuracy_experiment(cfg);
            } else if (protocol == "coverage") {
                records = nm::run_coverage_experiment(cfg);
            } else if (protocol == "sparsity") {
                records = nm::run_sparsity_sweep(cfg);
            } else {
                records = nm::run_power_experiment(cfg);
            }
            if (cfg.output.empty()) {
                nm::write_records_csv(std::cout, records);
            } else {
                std::ofstream out(cfg.output);
                if (!out) throw nm::Error(nm::ErrorKind::Io, "cannot write " + cfg.output);
                nm::write_records_csv(out, records);
            }
            for (const auto& s : nm::summarize(records)) {
                std::cerr << json{{"method", s.method}, {"n", s.n},       {"rho", s.rho},
                                  {"metric", s.metric}, {"count", s.count}, {"mean", s.mean},
                                  {"sd", s.sd},         {"median", s.median}}
                                 .dump()
                          << '\n';
            }
        }
    } catch (const nm::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
