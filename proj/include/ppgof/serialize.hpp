#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppgof/errors.hpp"
#include "ppgof/estimate.hpp"
#include "ppgof/intensity.hpp"
#include "ppgof/limit.hpp"
#include "ppgof/simulate.hpp"
#include "ppgof/statistic.hpp"
#include "ppgof/testkit.hpp"

// Everything on disk is JSON with a fixed key order, so identical inputs
// produce byte-identical files.

namespace ppgof {

using ordered_json = nlohmann::ordered_json;

// FNV-1a over the compact dump; used to stamp study outputs.
inline std::string config_hash(const ordered_json& config) {
    const std::string dump = config.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

inline ordered_json theta_json(const shift_scale& th) {
    return ordered_json::array({th.alpha, th.beta});
}

inline shift_scale theta_from_json(const ordered_json& j) {
    if (!j.is_array() || j.size() != 2) throw validation_error("theta must be a [alpha, beta] pair");
    shift_scale th{j[0].get<double>(), j[1].get<double>()};
    require_valid(th);
    return th;
}

// --------------------------- dataset ---------------------------------------

inline ordered_json to_json(const dataset& ds) {
    ordered_json j;
    j["model_id"] = ds.model_id;
    j["theta_true"] = ds.theta_true ? theta_json(*ds.theta_true) : ordered_json(nullptr);
    j["seed"] = ds.seed;
    j["n"] = ds.n();
    ordered_json trs = ordered_json::array();
    for (const auto& tr : ds.trajectories) trs.push_back(tr.events);
    j["trajectories"] = std::move(trs);
    return j;
}

inline dataset dataset_from_json(const ordered_json& j) {
    dataset ds;
    ds.model_id = j.at("model_id").get<std::string>();
    if (!j.at("theta_true").is_null()) ds.theta_true = theta_from_json(j.at("theta_true"));
    ds.seed = j.at("seed").get<std::uint64_t>();
    const auto& trs = j.at("trajectories");
    if (!trs.is_array() || trs.empty()) throw validation_error("dataset needs trajectories");
    if (j.at("n").get<std::size_t>() != trs.size()) {
        throw validation_error("dataset field n disagrees with the trajectory count");
    }
    ds.trajectories.reserve(trs.size());
    for (const auto& row : trs) {
        trajectory tr;
        tr.events = row.get<std::vector<double>>();
        for (std::size_t i = 1; i < tr.events.size(); ++i) {
            if (tr.events[i] < tr.events[i - 1]) {
                throw validation_error("trajectory event times must be sorted");
            }
        }
        ds.trajectories.push_back(std::move(tr));
    }
    return ds;
}

// ----------------------- threshold table -----------------------------------

inline ordered_json to_json(const threshold_table& t) {
    ordered_json j;
    j["model_id"] = t.model_id;
    j["K"] = t.grid_cells;
    j["M"] = t.replicates;
    j["seed"] = t.seed;
    j["quantile_method"] = t.quantile_method;
    j["stderr_method"] = t.stderr_method;
    ordered_json rows = ordered_json::array();
    for (const auto& r : t.rows) {
        ordered_json row;
        row["epsilon"] = r.epsilon;
        row["c"] = r.c;
        row["stderr"] = r.stderr_;
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

inline threshold_table threshold_table_from_json(const ordered_json& j) {
    threshold_table t;
    t.model_id = j.at("model_id").get<std::string>();
    t.grid_cells = j.at("K").get<int>();
    t.replicates = j.at("M").get<std::uint64_t>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.quantile_method = j.at("quantile_method").get<std::string>();
    t.stderr_method = j.at("stderr_method").get<std::string>();
    for (const auto& row : j.at("rows")) {
        t.rows.push_back({row.at("epsilon").get<double>(), row.at("c").get<double>(),
                          row.at("stderr").get<double>()});
    }
    return t;
}

// ------------------------- fit / stat / report -----------------------------

inline ordered_json to_json(const fit_result& f) {
    ordered_json j;
    j["theta_hat"] = theta_json(f.theta_hat);
    j["loglik"] = f.loglik;
    j["score_norm"] = f.score_norm;
    j["iterations"] = f.iterations;
    j["boundary_hit"] = f.boundary_hit;
    j["starts_tried"] = f.starts_tried;
    return j;
}

inline ordered_json to_json(const stat_value& s) {
    ordered_json j;
    j["delta"] = s.delta;
    j["method"] = to_string(s.method);
    j["n"] = s.n;
    j["theta_used"] = s.theta_used ? theta_json(*s.theta_used) : ordered_json(nullptr);
    return j;
}

inline ordered_json to_json(const test_report& r) {
    ordered_json j;
    j["delta_hat"] = to_json(r.delta_hat);
    j["theta_hat"] = to_json(r.theta_fit);
    j["epsilon"] = r.epsilon;
    j["c_epsilon"] = r.c_epsilon;
    j["reject"] = r.reject;
    j["warnings"] = r.warnings;
    return j;
}

// ------------------------------ studies ------------------------------------

inline ordered_json to_json(const study_scenario& s) {
    ordered_json j;
    j["kind"] = s.kind;
    j["model_id"] = s.model_id;
    j["theta0"] = s.theta0 ? theta_json(*s.theta0) : ordered_json(nullptr);
    if (!s.alt_id.empty()) {
        j["alt_id"] = s.alt_id;
        j["alt_theta"] = s.alt_theta ? theta_json(*s.alt_theta) : ordered_json(nullptr);
    }
    j["n"] = s.n;
    j["epsilon"] = s.epsilon;
    return j;
}

inline ordered_json to_json(const study_result& r) {
    ordered_json j;
    j["scenario"] = to_json(r.scenario);
    j["replicates"] = r.replicates;
    j["rejections"] = r.rejections;
    j["rejection_rate"] = r.rejection_rate;
    j["wilson_interval"] = ordered_json::array({r.wilson_interval.first, r.wilson_interval.second});
    j["boundary_hits"] = r.boundary_hits;
    j["rejections_excl_boundary"] = r.rejections_excl_boundary;
    j["rejection_rate_excl_boundary"] = r.rejection_rate_excl_boundary;
    j["seeds"] = r.seeds;
    return j;
}

inline ordered_json to_json(const apf_result& r) {
    ordered_json j;
    ordered_json thetas = ordered_json::array();
    for (const auto& th : r.thetas) thetas.push_back(theta_json(th));
    j["thetas"] = std::move(thetas);
    j["n"] = r.n;
    j["replicates"] = r.replicates;
    j["ks_distance"] = r.ks_distance;
    j["ks_pvalue"] = r.ks_pvalue;
    ordered_json vs = ordered_json::array();
    for (const auto& k : r.vs_limit) {
        ordered_json row;
        row["ks"] = k.distance;
        row["pvalue"] = k.p_value;
        vs.push_back(std::move(row));
    }
    j["vs_limit"] = std::move(vs);
    j["limit_draws"] = r.limit_draws;
    j["limit_K"] = r.limit_cells;
    return j;
}

// ------------------------------ models -------------------------------------

// Tabulated model file: {"model_id": ..., "grid": [[s, lambda0(s)], ...]}
// with strictly increasing s.
inline base_model tabulated_model_from_json(const ordered_json& j) {
    const std::string id = j.at("model_id").get<std::string>();
    const auto& grid = j.at("grid");
    if (!grid.is_array() || grid.size() < 4) {
        throw validation_error("tabulated model grid needs at least 4 [s, lambda] rows");
    }
    std::vector<double> s, lam;
    s.reserve(grid.size());
    lam.reserve(grid.size());
    for (const auto& row : grid) {
        if (!row.is_array() || row.size() != 2) {
            throw validation_error("tabulated model rows must be [s, lambda] pairs");
        }
        s.push_back(row[0].get<double>());
        lam.push_back(row[1].get<double>());
        if (s.size() >= 2 && !(s[s.size() - 2] < s.back())) {
            throw validation_error("tabulated model abscissae must be strictly increasing");
        }
    }
    base_model m = models::tabulated(id, std::move(s), std::move(lam));
    validate_conditions(m);
    return m;
}

inline ordered_json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw io_error("cannot parse " + path.string() + ": " + e.what());
    }
    return j;
}

inline void write_json_file(const std::filesystem::path& path, const ordered_json& j) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

inline const char* model_path_env = "PPGOF_MODEL_PATH";

// Builtins first; otherwise <dir>/<model_id>.json where dir comes from the
// argument or the PPGOF_MODEL_PATH environment variable.
inline base_model find_model(const std::string& model_id, const std::string& model_dir = "") {
    if (model_id == "gauss2") return models::gauss2();
    if (model_id == "logistic5") return models::logistic5();

    std::string dir = model_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv(model_path_env)) dir = env;
    }
    if (!dir.empty()) {
        const auto path = std::filesystem::path(dir) / (model_id + ".json");
        if (std::filesystem::exists(path)) {
            base_model m = tabulated_model_from_json(read_json_file(path));
            if (m.id != model_id) {
                throw validation_error("model file " + path.string() + " declares model_id '" +
                                       m.id + "'");
            }
            return m;
        }
    }
    throw validation_error("unknown model '" + model_id + "' (builtins: gauss2, logistic5)");
}

}  // namespace ppgof
