#pragma once

// JSON loaders for graphons, motifs, sparsity levels and experiment configs.

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "netmoment/error.hpp"
#include "netmoment/graphon.hpp"
#include "netmoment/harness.hpp"
#include "netmoment/motif.hpp"

namespace netmoment {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw Error(ErrorKind::Config, "unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T get_field(const json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, where + "." + key + ": " + e.what());
    }
}

}  // namespace detail

/// {"kind": "BlockModel", "pi": [...], "B": [[...]]}, {"kind": "SmoothGraphon"},
/// {"kind": "NonSmoothGraphon"}, or {"kind": "Custom", "name": "constant", "value": c}
/// / {"kind": "Custom", "name": "nonsmooth_reciprocal"}.
inline Graphon graphon_from_json(const json& j) {
    if (j.is_string()) return graphon_from_json(json{{"kind", j.get<std::string>()}});
    if (!j.is_object()) throw Error(ErrorKind::Config, "graphon must be an object or a kind name");
    const auto kind = detail::get_field<std::string>(j, "kind", "graphon");
    if (kind == "BlockModel") {
        detail::reject_unknown_keys(j, {"kind", "pi", "B"}, "graphon");
        if (!j.contains("pi") && !j.contains("B")) return default_block_model();
        return Graphon::block_model(detail::get_field<std::vector<double>>(j, "pi", "graphon"),
                                    detail::get_field<std::vector<std::vector<double>>>(j, "B", "graphon"));
    }
    if (kind == "SmoothGraphon") {
        detail::reject_unknown_keys(j, {"kind"}, "graphon");
        return Graphon::smooth();
    }
    if (kind == "NonSmoothGraphon") {
        detail::reject_unknown_keys(j, {"kind"}, "graphon");
        return Graphon::nonsmooth();
    }
    if (kind == "Custom") {
        detail::reject_unknown_keys(j, {"kind", "name", "value"}, "graphon");
        const auto name = detail::get_field<std::string>(j, "name", "graphon");
        if (name == "constant") return Graphon::constant(detail::get_field<double>(j, "value", "graphon"));
        if (name == "nonsmooth_reciprocal") return Graphon::nonsmooth_reciprocal();
        throw Error(ErrorKind::Config, "unknown custom graphon '" + name + "'");
    }
    throw Error(ErrorKind::Config, "unknown graphon kind '" + kind + "'");
}

/// A built-in name ("edge", "triangle", "vshape", "threestar") or
/// {"nodes": r, "edges": [[1,2], ...]} with 1-based endpoints.
inline Motif motif_from_json(const json& j) {
    if (j.is_string()) return builtin_motif(j.get<std::string>());
    if (!j.is_object()) throw Error(ErrorKind::Config, "motif must be a name or an edge-list object");
    detail::reject_unknown_keys(j, {"nodes", "edges", "name"}, "motif");
    const auto r = detail::get_field<std::size_t>(j, "nodes", "motif");
    const auto raw = detail::get_field<std::vector<std::vector<std::size_t>>>(j, "edges", "motif");
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& e : raw) {
        if (e.size() != 2 || e[0] < 1 || e[1] < 1) {
            throw Error(ErrorKind::Config, "motif edges are pairs of 1-based node ids");
        }
        edges.emplace_back(e[0] - 1, e[1] - 1);
    }
    return motif_from_edges(r, edges, j.value("name", std::string("custom")));
}

inline RhoSpec rho_from_json(const json& j) {
    if (j.is_number()) return RhoSpec::literal(j.get<double>());
    if (j.is_string()) return RhoSpec::parse(j.get<std::string>());
    throw Error(ErrorKind::Config, "rho must be a number or one of \"1\", \"n^-1/4\", \"n^-1/2\", \"n^-1\"");
}

inline ExperimentConfig experiment_config_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
    detail::reject_unknown_keys(j,
                                {"graphon", "motif", "n", "rho", "n_mc", "n_boot", "n_star", "repetitions", "seed",
                                 "methods", "grid", "output", "alpha", "threads", "mu_draws", "cache_dir",
                                 "max_degenerate_fraction", "max_bootstrap_drop", "null_offsets",
                                 "max_subsets", "pair_projection_node_cap", "override_caps"},
                                "config");
    ExperimentConfig cfg;
    const std::string where = "config";
    if (j.contains("graphon")) {
        cfg.graphon = graphon_from_json(j["graphon"]);
        cfg.graphon_key = j["graphon"].dump();
    }
    if (j.contains("motif")) cfg.motif = motif_from_json(j["motif"]);
    if (j.contains("n")) {
        cfg.n_values = j["n"].is_array() ? detail::get_field<std::vector<std::size_t>>(j, "n", where)
                                         : std::vector<std::size_t>{detail::get_field<std::size_t>(j, "n", where)};
    }
    if (j.contains("rho")) {
        cfg.rho.clear();
        if (j["rho"].is_array()) {
            for (const auto& r : j["rho"]) cfg.rho.push_back(rho_from_json(r));
        } else {
            cfg.rho.push_back(rho_from_json(j["rho"]));
        }
    }
    if (j.contains("n_mc")) cfg.n_mc = detail::get_field<std::size_t>(j, "n_mc", where);
    if (j.contains("n_boot")) cfg.n_boot = detail::get_field<std::size_t>(j, "n_boot", where);
    if (j.contains("n_star")) cfg.n_star = detail::get_field<std::size_t>(j, "n_star", where);
    if (j.contains("repetitions")) cfg.repetitions = detail::get_field<std::size_t>(j, "repetitions", where);
    if (j.contains("seed")) cfg.seed = detail::get_field<std::uint64_t>(j, "seed", where);
    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& m : detail::get_field<std::vector<std::string>>(j, "methods", where)) {
            cfg.methods.push_back(parse_method(m));
        }
    }
    if (j.contains("grid")) cfg.grid = detail::get_field<std::vector<double>>(j, "grid", where);
    if (j.contains("output")) cfg.output = detail::get_field<std::string>(j, "output", where);
    if (j.contains("alpha")) cfg.alpha = detail::get_field<double>(j, "alpha", where);
    if (j.contains("threads")) cfg.threads = detail::get_field<std::size_t>(j, "threads", where);
    if (j.contains("mu_draws")) cfg.mu_draws = detail::get_field<std::size_t>(j, "mu_draws", where);
    if (j.contains("cache_dir")) cfg.cache_dir = detail::get_field<std::string>(j, "cache_dir", where);
    if (j.contains("max_degenerate_fraction")) {
        cfg.max_degenerate_fraction = detail::get_field<double>(j, "max_degenerate_fraction", where);
    }
    if (j.contains("max_bootstrap_drop")) {
        cfg.max_bootstrap_drop = detail::get_field<double>(j, "max_bootstrap_drop", where);
    }
    if (j.contains("null_offsets")) cfg.null_offsets = detail::get_field<std::vector<double>>(j, "null_offsets", where);
    if (j.contains("max_subsets")) cfg.caps.max_subsets = detail::get_field<std::uint64_t>(j, "max_subsets", where);
    if (j.contains("pair_projection_node_cap")) {
        cfg.caps.pair_projection_node_cap = detail::get_field<std::size_t>(j, "pair_projection_node_cap", where);
    }
    if (j.contains("override_caps")) cfg.caps.override_caps = detail::get_field<bool>(j, "override_caps", where);
    cfg.validate();
    return cfg;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Config, path + ": " + e.what());
    }
}

}  // namespace netmoment
