// Command line front end: simulation, fitting, statistic evaluation,
// threshold calibration, tests and replicated studies. All inputs and
// outputs are JSON; for a fixed config and seed every command writes
// byte-identical files regardless of --threads.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ppgof/serialize.hpp"

namespace {

using ppgof::ordered_json;

ppgof::shift_scale parse_theta(const std::string& text) {
    std::istringstream in(text);
    double a = 0.0, b = 0.0;
    char comma = 0;
    if (!(in >> a >> comma >> b) || comma != ',') {
        throw ppgof::validation_error("expected theta as 'alpha,beta', got '" + text + "'");
    }
    ppgof::shift_scale th{a, b};
    ppgof::require_valid(th);
    return th;
}

std::vector<ppgof::shift_scale> parse_theta_list(const std::string& text) {
    std::vector<ppgof::shift_scale> out;
    std::istringstream in(text);
    std::string piece;
    while (std::getline(in, piece, ';')) {
        if (!piece.empty()) out.push_back(parse_theta(piece));
    }
    if (out.empty()) throw ppgof::validation_error("no theta values in '" + text + "'");
    return out;
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string piece;
    while (std::getline(in, piece, ',')) {
        if (!piece.empty()) out.push_back(std::stod(piece));
    }
    if (out.empty()) throw ppgof::validation_error("no numbers in '" + text + "'");
    return out;
}

ppgof::param_box parse_box(const std::string& text) {
    const auto v = parse_doubles(text);
    if (v.size() != 4) throw ppgof::validation_error("expected box as 'a1,a2,b1,b2'");
    ppgof::param_box box{v[0], v[1], v[2], v[3]};
    if (!box.valid()) throw ppgof::validation_error("box must satisfy a1<a2 and 0<b1<b2");
    return box;
}

// Alternative intensity file: a tabulated model, optionally carrying a
// redundant "total_mass" that must agree with the grid integral.
ppgof::alternative_spec load_alternative(const std::string& path, const std::string& theta_text) {
    const ordered_json j = ppgof::read_json_file(path);
    ppgof::alternative_spec alt;
    alt.model = ppgof::tabulated_model_from_json(j);
    if (j.contains("total_mass")) {
        const double declared = j.at("total_mass").get<double>();
        if (!(std::abs(declared - alt.model.total) <= 0.01 * declared)) {
            throw ppgof::validation_error("alternative total_mass disagrees with the grid integral");
        }
    }
    if (!theta_text.empty()) alt.theta = parse_theta(theta_text);
    return alt;
}

struct cli_state {
    unsigned threads = ppgof::default_threads();
    std::string model_path;

    ppgof::base_model model(const std::string& id) const { return ppgof::find_model(id, model_path); }
};

void emit(const std::string& out_path, const ordered_json& payload) {
    if (out_path.empty() || out_path == "-") {
        std::cout << payload.dump(2) << '\n';
    } else {
        ppgof::write_json_file(out_path, payload);
    }
}

void merge_into(ordered_json& target, const ordered_json& fields) {
    for (const auto& [key, value] : fields.items()) target[key] = value;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Goodness-of-fit testing for inhomogeneous Poisson processes with a "
                 "shift/scale null family"};
    app.require_subcommand(1);

    cli_state st;
    app.add_option("--threads", st.threads, "worker count (never affects results)");
    app.add_option("--model-path", st.model_path,
                   "directory with tabulated model JSON files (default: $PPGOF_MODEL_PATH)");

    // ----- simulate -----
    auto* sim = app.add_subcommand("simulate", "draw a dataset from a (model, theta) pair");
    std::string sim_model, sim_theta, sim_out;
    std::size_t sim_n = 100;
    std::uint64_t sim_seed = 0;
    sim->add_option("--model", sim_model)->required();
    sim->add_option("--theta", sim_theta, "alpha,beta")->required();
    sim->add_option("--n", sim_n, "trajectory count")->required();
    sim->add_option("--seed", sim_seed)->required();
    sim->add_option("-o,--out", sim_out)->required();

    // ----- fit -----
    auto* fit = app.add_subcommand("fit", "maximum likelihood fit of (alpha, beta)");
    std::string fit_model, fit_data, fit_box, fit_out;
    int fit_grid = 16;
    long fit_max_iter = 10000;
    fit->add_option("--model", fit_model)->required();
    fit->add_option("--data", fit_data)->required();
    fit->add_option("--box", fit_box, "a1,a2,b1,b2");
    fit->add_option("--grid", fit_grid, "coarse grid points per axis");
    fit->add_option("--max-iter", fit_max_iter);
    fit->add_option("-o,--out", fit_out);

    // ----- stat -----
    auto* stat = app.add_subcommand("stat", "evaluate the test statistic");
    std::string stat_model, stat_data, stat_theta, stat_theta0, stat_out;
    bool stat_simple = false;
    stat->add_option("--model", stat_model)->required();
    stat->add_option("--data", stat_data)->required();
    stat->add_option("--theta", stat_theta, "evaluate at this theta instead of the MLE");
    stat->add_flag("--simple", stat_simple, "simple-hypothesis statistic (needs --theta0)");
    stat->add_option("--theta0", stat_theta0, "known theta0 for --simple");
    stat->add_option("-o,--out", stat_out);

    // ----- calibrate -----
    auto* cal = app.add_subcommand("calibrate", "Monte Carlo threshold table for the limit law");
    std::string cal_model, cal_eps = "0.01,0.05,0.1", cal_out;
    std::size_t cal_m = 100000;
    int cal_k = 8192;
    std::uint64_t cal_seed = 0;
    cal->add_option("--model", cal_model)->required();
    cal->add_option("--eps", cal_eps, "comma separated test levels");
    cal->add_option("--M", cal_m, "Monte Carlo draws");
    cal->add_option("--K", cal_k, "grid cells per draw");
    cal->add_option("--seed", cal_seed)->required();
    cal->add_option("-o,--out", cal_out)->required();

    // ----- test -----
    auto* tst = app.add_subcommand("test", "fit, evaluate and decide against a threshold table");
    std::string tst_model, tst_data, tst_table, tst_out, tst_box;
    double tst_eps = 0.05;
    tst->add_option("--model", tst_model)->required();
    tst->add_option("--data", tst_data)->required();
    tst->add_option("--table", tst_table)->required();
    tst->add_option("--eps", tst_eps)->required();
    tst->add_option("--box", tst_box, "a1,a2,b1,b2");
    tst->add_option("-o,--out", tst_out);

    // ----- study-size -----
    auto* ssz = app.add_subcommand("study-size", "replicated size study under the null");
    std::string ssz_model, ssz_theta, ssz_table, ssz_out;
    std::size_t ssz_n = 500, ssz_reps = 1000;
    double ssz_eps = 0.05;
    std::uint64_t ssz_seed = 0;
    ssz->add_option("--model", ssz_model)->required();
    ssz->add_option("--theta", ssz_theta)->required();
    ssz->add_option("--n", ssz_n)->required();
    ssz->add_option("--replicates", ssz_reps)->required();
    ssz->add_option("--eps", ssz_eps)->required();
    ssz->add_option("--seed", ssz_seed)->required();
    ssz->add_option("--table", ssz_table)->required();
    ssz->add_option("-o,--out", ssz_out);

    // ----- study-power -----
    auto* spw = app.add_subcommand("study-power", "replicated power study under an alternative");
    std::string spw_model, spw_alt, spw_alt_theta, spw_table, spw_out;
    std::size_t spw_n = 500, spw_reps = 500;
    double spw_eps = 0.05;
    std::uint64_t spw_seed = 0;
    spw->add_option("--model", spw_model, "null model")->required();
    spw->add_option("--alt", spw_alt, "tabulated alternative intensity JSON")->required();
    spw->add_option("--alt-theta", spw_alt_theta, "shift/scale applied to the alternative");
    spw->add_option("--n", spw_n)->required();
    spw->add_option("--replicates", spw_reps)->required();
    spw->add_option("--eps", spw_eps)->required();
    spw->add_option("--seed", spw_seed)->required();
    spw->add_option("--table", spw_table)->required();
    spw->add_option("-o,--out", spw_out);

    // ----- apf-check -----
    auto* apf = app.add_subcommand("apf-check", "compare statistic laws across parameter points");
    std::string apf_model, apf_thetas, apf_out;
    std::size_t apf_n = 1000, apf_reps = 2000, apf_limit_m = 100000;
    int apf_limit_k = 8192;
    std::uint64_t apf_seed = 0;
    apf->add_option("--model", apf_model)->required();
    apf->add_option("--thetas", apf_thetas, "semicolon separated list: a,b;a,b;...")->required();
    apf->add_option("--n", apf_n)->required();
    apf->add_option("--replicates", apf_reps)->required();
    apf->add_option("--seed", apf_seed)->required();
    apf->add_option("--limit-M", apf_limit_m, "limit-law draws for the one-sample comparison");
    apf->add_option("--limit-K", apf_limit_k);
    apf->add_option("-o,--out", apf_out);

    // ----- limit-sample -----
    auto* lsm = app.add_subcommand("limit-sample", "draw from the limit law");
    std::string lsm_model = "gauss2", lsm_out;
    std::size_t lsm_m = 1000;
    int lsm_k = 8192;
    std::uint64_t lsm_seed = 0;
    bool lsm_simple = false;
    lsm->add_option("--model", lsm_model);
    lsm->add_option("--M", lsm_m)->required();
    lsm->add_option("--K", lsm_k);
    lsm->add_option("--seed", lsm_seed)->required();
    lsm->add_flag("--simple", lsm_simple, "draw the known-theta limit instead");
    lsm->add_option("-o,--out", lsm_out);

    try {
        app.parse(argc, argv);

        if (sim->parsed()) {
            const auto model = st.model(sim_model);
            const auto theta = parse_theta(sim_theta);
            const auto ds = ppgof::sample_dataset(model, theta, sim_n, sim_seed);
            emit(sim_out, ppgof::to_json(ds));
        } else if (fit->parsed()) {
            const auto model = st.model(fit_model);
            const auto ds = ppgof::dataset_from_json(ppgof::read_json_file(fit_data));
            const auto box = fit_box.empty() ? ppgof::default_box() : parse_box(fit_box);
            ppgof::fit_options opt;
            opt.grid_points = fit_grid;
            opt.max_iterations = fit_max_iter;
            const auto result = ppgof::fit_mle(model, ds, box, opt);
            ordered_json config{{"command", "fit"},        {"model_id", fit_model},
                                {"data", fit_data},        {"box", fit_box},
                                {"grid", fit_grid},        {"max_iter", fit_max_iter}};
            ordered_json out{{"config", config}, {"fit", ppgof::to_json(result)}};
            emit(fit_out, out);
        } else if (stat->parsed()) {
            const auto model = st.model(stat_model);
            const auto ds = ppgof::dataset_from_json(ppgof::read_json_file(stat_data));
            ordered_json config{{"command", "stat"},
                                {"model_id", stat_model},
                                {"data", stat_data},
                                {"simple", stat_simple},
                                {"theta", stat_theta},
                                {"theta0", stat_theta0}};
            ordered_json out{{"config", config}};
            if (stat_simple) {
                if (stat_theta0.empty()) {
                    throw ppgof::validation_error("--simple needs --theta0");
                }
                const auto sv = ppgof::cvm_simple(model, ds, parse_theta(stat_theta0));
                out["stat"] = ppgof::to_json(sv);
            } else if (!stat_theta.empty()) {
                const auto sv = ppgof::cvm_statistic(model, ds, parse_theta(stat_theta));
                out["stat"] = ppgof::to_json(sv);
            } else {
                const auto fitted = ppgof::fit_mle(model, ds);
                const auto sv = ppgof::cvm_statistic(model, ds, fitted.theta_hat);
                out["stat"] = ppgof::to_json(sv);
                out["fit"] = ppgof::to_json(fitted);
            }
            emit(stat_out, out);
        } else if (cal->parsed()) {
            const auto model = st.model(cal_model);
            const auto table = ppgof::calibrate_threshold(model, parse_doubles(cal_eps), cal_m,
                                                          cal_k, cal_seed, st.threads);
            emit(cal_out, ppgof::to_json(table));
        } else if (tst->parsed()) {
            const auto model = st.model(tst_model);
            const auto ds = ppgof::dataset_from_json(ppgof::read_json_file(tst_data));
            const auto table =
                ppgof::threshold_table_from_json(ppgof::read_json_file(tst_table));
            const auto box = tst_box.empty() ? ppgof::default_box() : parse_box(tst_box);
            const auto report = ppgof::run_test(model, ds, tst_eps, table, box);
            ordered_json config{{"command", "test"},   {"model_id", tst_model},
                                {"data", tst_data},    {"table", tst_table},
                                {"epsilon", tst_eps},  {"box", tst_box}};
            ordered_json out{{"config", config}};
            merge_into(out, ppgof::to_json(report));
            emit(tst_out, out);
        } else if (ssz->parsed()) {
            const auto model = st.model(ssz_model);
            const auto table =
                ppgof::threshold_table_from_json(ppgof::read_json_file(ssz_table));
            const auto result = ppgof::size_study(model, parse_theta(ssz_theta), ssz_n, ssz_reps,
                                                  ssz_eps, ssz_seed, table, st.threads);
            ordered_json config{{"command", "study-size"}, {"model_id", ssz_model},
                                {"theta", ssz_theta},      {"n", ssz_n},
                                {"replicates", ssz_reps},  {"epsilon", ssz_eps},
                                {"seed", ssz_seed},        {"table", ssz_table}};
            ordered_json out{{"config", config}, {"config_hash", ppgof::config_hash(config)}};
            merge_into(out, ppgof::to_json(result));
            emit(ssz_out, out);
        } else if (spw->parsed()) {
            const auto model = st.model(spw_model);
            const auto alt = load_alternative(spw_alt, spw_alt_theta);
            const auto table =
                ppgof::threshold_table_from_json(ppgof::read_json_file(spw_table));
            const auto result = ppgof::power_study(model, alt, spw_n, spw_reps, spw_eps, spw_seed,
                                                   table, st.threads);
            ordered_json config{{"command", "study-power"}, {"model_id", spw_model},
                                {"alt", spw_alt},           {"alt_theta", spw_alt_theta},
                                {"n", spw_n},               {"replicates", spw_reps},
                                {"epsilon", spw_eps},       {"seed", spw_seed},
                                {"table", spw_table}};
            ordered_json out{{"config", config}, {"config_hash", ppgof::config_hash(config)}};
            merge_into(out, ppgof::to_json(result));
            emit(spw_out, out);
        } else if (apf->parsed()) {
            const auto model = st.model(apf_model);
            const auto result =
                ppgof::apf_check(model, parse_theta_list(apf_thetas), apf_n, apf_reps, apf_seed,
                                 st.threads, apf_limit_m, apf_limit_k);
            ordered_json config{{"command", "apf-check"},  {"model_id", apf_model},
                                {"thetas", apf_thetas},    {"n", apf_n},
                                {"replicates", apf_reps},  {"seed", apf_seed},
                                {"limit_M", apf_limit_m},  {"limit_K", apf_limit_k}};
            ordered_json out{{"config", config}, {"config_hash", ppgof::config_hash(config)}};
            merge_into(out, ppgof::to_json(result));
            emit(apf_out, out);
        } else if (lsm->parsed()) {
            ordered_json config{{"command", "limit-sample"}, {"model_id", lsm_model},
                                {"M", lsm_m},                {"K", lsm_k},
                                {"seed", lsm_seed},          {"simple", lsm_simple}};
            std::vector<double> draws;
            if (lsm_simple) {
                draws.resize(lsm_m);
                for (std::size_t i = 0; i < lsm_m; ++i) {
                    auto g = ppgof::rng::substream(lsm_seed, i);
                    draws[i] = ppgof::sample_limit_simple(lsm_k, g);
                }
            } else {
                const auto model = st.model(lsm_model);
                draws = ppgof::sample_limit_deltas(model, lsm_m, lsm_k, lsm_seed, st.threads);
            }
            ordered_json out{{"config", config}, {"draws", draws}};
            emit(lsm_out, out);
        }
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        ordered_json err{{"error", {{"type", "Usage"}, {"message", e.what()}}}};
        std::cerr << err.dump() << '\n';
        return 2;
    } catch (const ppgof::error& e) {
        ordered_json err{{"error", {{"type", e.kind()}, {"message", e.what()}}}};
        std::cerr << err.dump() << '\n';
        return 1;
    } catch (const std::exception& e) {
        ordered_json err{{"error", {{"type", "Internal"}, {"message", e.what()}}}};
        std::cerr << err.dump() << '\n';
        return 1;
    }
}
