#pragma once

#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppgof/estimate.hpp"
#include "ppgof/intensity.hpp"
#include "ppgof/limit.hpp"
#include "ppgof/parallel.hpp"
#include "ppgof/simulate.hpp"
#include "ppgof/statistic.hpp"
#include "ppgof/stats/ks.hpp"

namespace ppgof {

// ---------------------------------------------------------------------------
// Single test run: fit the MLE, evaluate the statistic at it, compare with
// the calibrated threshold.
// ---------------------------------------------------------------------------

struct test_report {
    stat_value delta_hat;
    fit_result theta_fit;
    double epsilon = 0.0;
    double c_epsilon = 0.0;
    bool reject = false;
    std::vector<std::string> warnings;
};

inline test_report run_test(const base_model& m, const dataset& ds, double epsilon,
                            const threshold_table& table, const param_box& box = default_box(),
                            const fit_options& options = {}) {
    if (table.model_id != m.id) {
        throw model_mismatch_error("threshold table was calibrated for model '" + table.model_id +
                                   "', not '" + m.id + "'");
    }
    const threshold_row& row = table.row_for(epsilon);

    test_report rep;
    rep.epsilon = epsilon;
    rep.c_epsilon = row.c;
    rep.theta_fit = fit_mle(m, ds, box, options);
    rep.delta_hat = cvm_statistic(m, ds, rep.theta_fit.theta_hat);
    rep.reject = rep.delta_hat.delta > row.c;
    if (rep.theta_fit.boundary_hit) rep.warnings.push_back("boundary_hit");
    return rep;
}

// ---------------------------------------------------------------------------
// Replicated studies. Replicate r derives its dataset seed as
// substream_seed(seed, r); aggregation is collect-then-reduce so results do
// not depend on the worker count.
// ---------------------------------------------------------------------------

struct study_scenario {
    std::string kind;            // "size" or "power"
    std::string model_id;        // null model
    std::optional<shift_scale> theta0;
    std::string alt_id;          // alternative model (power studies)
    std::optional<shift_scale> alt_theta;
    std::size_t n = 0;
    double epsilon = 0.0;
};

struct study_result {
    study_scenario scenario;
    std::size_t replicates = 0;
    std::size_t rejections = 0;
    double rejection_rate = 0.0;
    std::pair<double, double> wilson_interval{0.0, 1.0};
    std::size_t boundary_hits = 0;
    std::size_t rejections_excl_boundary = 0;
    double rejection_rate_excl_boundary = 0.0;
    std::vector<std::uint64_t> seeds;
};

namespace detail {

template <class MakeDataset>
study_result replicated_study(study_scenario scenario, const base_model& null_model,
                              std::size_t replicates, double epsilon,
                              const threshold_table& table, std::uint64_t seed, unsigned threads,
                              const param_box& box, MakeDataset&& make_dataset) {
    if (replicates < 1) throw validation_error("study needs at least one replicate");
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw invalid_epsilon_error("study epsilon must lie strictly inside (0, 1)");
    }

    study_result out;
    out.scenario = std::move(scenario);
    out.replicates = replicates;
    out.seeds.resize(replicates);
    std::vector<unsigned char> reject(replicates, 0), boundary(replicates, 0);

    parallel_for(replicates, threads, [&](std::size_t r) {
        out.seeds[r] = rng::substream_seed(seed, r);
        const dataset ds = make_dataset(out.seeds[r]);
        const test_report rep = run_test(null_model, ds, epsilon, table, box);
        reject[r] = rep.reject ? 1 : 0;
        boundary[r] = rep.theta_fit.boundary_hit ? 1 : 0;
    });

    for (std::size_t r = 0; r < replicates; ++r) {
        out.rejections += reject[r];
        out.boundary_hits += boundary[r];
        if (!boundary[r]) out.rejections_excl_boundary += reject[r];
    }
    out.rejection_rate = static_cast<double>(out.rejections) / static_cast<double>(replicates);
    out.wilson_interval = stats::wilson_interval(out.rejections, replicates);
    const std::size_t interior = replicates - out.boundary_hits;
    out.rejection_rate_excl_boundary =
        interior == 0 ? 0.0
                      : static_cast<double>(out.rejections_excl_boundary) /
                            static_cast<double>(interior);
    return out;
}

}  // namespace detail

inline study_result size_study(const base_model& m, const shift_scale& theta0, std::size_t n,
                               std::size_t replicates, double epsilon, std::uint64_t seed,
                               const threshold_table& table, unsigned threads = 1,
                               const param_box& box = default_box()) {
    require_valid(theta0);
    study_scenario sc{"size", m.id, theta0, "", std::nullopt, n, epsilon};
    return detail::replicated_study(std::move(sc), m, replicates, epsilon, table, seed, threads,
                                    box, [&](std::uint64_t ds_seed) {
                                        return sample_dataset(m, theta0, n, ds_seed);
                                    });
}

// An alternative is any (model, theta) pair to draw data from; tabulated
// intensities enter as tabulated base models, and a member of the null
// family reproduces the size setting.
struct alternative_spec {
    base_model model;
    shift_scale theta{0.0, 1.0};
};

inline study_result power_study(const base_model& null_model, const alternative_spec& alt,
                                std::size_t n, std::size_t replicates, double epsilon,
                                std::uint64_t seed, const threshold_table& table,
                                unsigned threads = 1, const param_box& box = default_box()) {
    require_valid(alt.theta);
    study_scenario sc{"power", null_model.id, std::nullopt, alt.model.id, alt.theta, n, epsilon};
    return detail::replicated_study(std::move(sc), null_model, replicates, epsilon, table, seed,
                                    threads, box, [&](std::uint64_t ds_seed) {
                                        return sample_dataset(alt.model, alt.theta, n, ds_seed);
                                    });
}

// ---------------------------------------------------------------------------
// Asymptotic parameter-freeness check: the empirical law of the statistic
// under the null must not depend on theta0, and must match the simulated
// limit law.
// ---------------------------------------------------------------------------

// Stream tag derived from the parameter value, so equal theta entries
// reuse identical streams (and unequal ones decorrelate).
inline std::uint64_t theta_stream_tag(const shift_scale& th) {
    std::uint64_t a, b;
    static_assert(sizeof(double) == sizeof(std::uint64_t));
    std::memcpy(&a, &th.alpha, sizeof(a));
    std::memcpy(&b, &th.beta, sizeof(b));
    return rng::substream_seed(a, b);
}

// Replicated values of the fitted statistic under H0 at one theta0.
inline std::vector<double> delta_hat_sample(const base_model& m, const shift_scale& theta0,
                                            std::size_t n, std::size_t replicates,
                                            std::uint64_t seed, unsigned threads = 1,
                                            const param_box& box = default_box()) {
    require_valid(theta0);
    std::vector<double> sample(replicates);
    parallel_for(replicates, threads, [&](std::size_t r) {
        const dataset ds = sample_dataset(m, theta0, n, rng::substream_seed(seed, r));
        const fit_result fit = fit_mle(m, ds, box);
        sample[r] = cvm_statistic(m, ds, fit.theta_hat).delta;
    });
    return sample;
}

struct apf_result {
    std::vector<shift_scale> thetas;
    std::size_t n = 0;
    std::size_t replicates = 0;
    std::vector<std::vector<double>> ks_distance;  // pairwise, square matrix
    std::vector<std::vector<double>> ks_pvalue;
    std::vector<stats::ks_result> vs_limit;        // each sample against Delta0 draws
    std::size_t limit_draws = 0;
    int limit_cells = 0;
};

inline apf_result apf_check(const base_model& m, const std::vector<shift_scale>& thetas,
                            std::size_t n, std::size_t replicates, std::uint64_t seed,
                            unsigned threads = 1, std::size_t limit_draws = 100000,
                            int limit_cells = 8192, const param_box& box = default_box()) {
    if (thetas.size() < 2) throw validation_error("apf check needs at least two parameter points");
    if (replicates < 1000) throw validation_error("apf check needs at least 1000 replicates");

    apf_result out;
    out.thetas = thetas;
    out.n = n;
    out.replicates = replicates;
    out.limit_draws = limit_draws;
    out.limit_cells = limit_cells;

    std::vector<std::vector<double>> samples(thetas.size());
    for (std::size_t a = 0; a < thetas.size(); ++a) {
        samples[a] = delta_hat_sample(m, thetas[a], n, replicates,
                                      rng::substream_seed(seed, theta_stream_tag(thetas[a])),
                                      threads, box);
    }

    const std::size_t k = thetas.size();
    out.ks_distance.assign(k, std::vector<double>(k, 0.0));
    out.ks_pvalue.assign(k, std::vector<double>(k, 1.0));
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            const auto ks = stats::ks_two_sample(samples[a], samples[b]);
            out.ks_distance[a][b] = out.ks_distance[b][a] = ks.distance;
            out.ks_pvalue[a][b] = out.ks_pvalue[b][a] = ks.p_value;
        }
    }

    const std::vector<double> limit_sample = sample_limit_deltas(
        m, limit_draws, limit_cells, rng::substream_seed(seed, 0x6C696D69), threads);
    out.vs_limit.reserve(k);
    for (std::size_t a = 0; a < k; ++a) {
        out.vs_limit.push_back(stats::ks_two_sample(samples[a], limit_sample));
    }
    return out;
}

}  // namespace ppgof
