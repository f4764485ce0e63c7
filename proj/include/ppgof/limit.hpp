#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ppgof/errors.hpp"
#include "ppgof/estimate.hpp"
#include "ppgof/intensity.hpp"
#include "ppgof/parallel.hpp"
#include "ppgof/rng.hpp"

namespace ppgof {

struct limit_draw {
    double delta0 = 0.0;
    vec2 zeta;
    double w_end = 0.0;  // W(Lambda0(inf))
};

// Precomputed grid for drawing the limit variable
//   Delta0 = integral over [0, Lambda0(inf)] of [W(r) - <zeta, grad(s(r))>]^2 dr,
//   zeta   = Istar^{-1} * integral of l(s(r))/lambda0(s(r)) dW(r),
// discretized on K uniform cells in r with midpoint evaluation of the
// deterministic factors. Everything here depends only on the base model,
// which is exactly why the limit law is parameter free.
struct limit_grid {
    double total = 0.0;
    double dr = 0.0;
    std::vector<vec2> score_over_lambda;  // l(s_i)/lambda0(s_i)
    std::vector<vec2> mean_grad;          // (-lambda0, Lambda0 - s*lambda0) at s_i
    sym2 istar_inv;

    static limit_grid build(const base_model& m, int cells) {
        if (cells < 2) throw validation_error("limit grid needs K >= 2 cells");
        limit_grid g;
        g.total = m.total;
        g.dr = m.total / cells;
        g.score_over_lambda.resize(static_cast<std::size_t>(cells));
        g.mean_grad.resize(static_cast<std::size_t>(cells));
        for (int i = 0; i < cells; ++i) {
            const double r_mid = (i + 0.5) * g.dr;
            const double s = m.Lambda0_inv(r_mid);
            const double lam = m.lambda0(s);
            const double ratio = -m.lambda0_prime(s) / lam;
            g.score_over_lambda[static_cast<std::size_t>(i)] = {ratio, ratio * s};
            g.mean_grad[static_cast<std::size_t>(i)] = {-lam, m.Lambda0(s) - s * lam};
        }
        g.istar_inv = fisher_star(m).istar.inverse();
        return g;
    }
};

// Draws (W, zeta, Delta0) triples; owns the path workspace so repeated
// draws do not allocate.
class limit_sampler {
public:
    explicit limit_sampler(const limit_grid& grid)
        : grid_(&grid), path_(grid.score_over_lambda.size()) {}

    limit_draw draw(rng::stream& g) {
        const limit_grid& gr = *grid_;
        const std::size_t cells = path_.size();
        const double step_sd = std::sqrt(gr.dr);
        double w = 0.0;
        vec2 acc{0.0, 0.0};
        for (std::size_t i = 0; i < cells; ++i) {
            const double dw = step_sd * g.normal();
            w += dw;
            path_[i] = w;
            acc += dw * gr.score_over_lambda[i];
        }
        limit_draw out;
        out.zeta = gr.istar_inv.apply(acc);
        out.w_end = w;
        double sum = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            const double d = path_[i] - dot(out.zeta, gr.mean_grad[i]);
            sum += d * d;
        }
        out.delta0 = sum * gr.dr;
        return out;
    }

private:
    const limit_grid* grid_;
    std::vector<double> path_;
};

inline limit_draw sample_limit_delta0(const base_model& m, int cells, rng::stream& g) {
    const limit_grid grid = limit_grid::build(m, cells);
    limit_sampler sampler(grid);
    return sampler.draw(g);
}

// One draw of the simple-hypothesis limit: integral over [0,1] of W(s)^2 ds,
// as a Riemann sum of the squared Wiener path on K cells.
inline double sample_limit_simple(int cells, rng::stream& g) {
    if (cells < 2) throw validation_error("limit grid needs K >= 2 cells");
    const double dr = 1.0 / cells;
    const double step_sd = std::sqrt(dr);
    double w = 0.0;
    double sum = 0.0;
    for (int i = 0; i < cells; ++i) {
        w += step_sd * g.normal();
        sum += w * w;
    }
    return sum * dr;
}

// M independent draws of Delta0; draw i uses substream(seed, i).
inline std::vector<double> sample_limit_deltas(const limit_grid& grid, std::size_t m_draws,
                                               std::uint64_t seed, unsigned threads = 1) {
    std::vector<double> draws(m_draws);
    parallel_workers(m_draws, threads, [&](unsigned, auto claim) {
        limit_sampler sampler(grid);
        for (std::size_t i = claim(); i < m_draws; i = claim()) {
            auto g = rng::substream(seed, i);
            draws[i] = sampler.draw(g).delta0;
        }
    });
    return draws;
}

inline std::vector<double> sample_limit_deltas(const base_model& m, std::size_t m_draws, int cells,
                                               std::uint64_t seed, unsigned threads = 1) {
    return sample_limit_deltas(limit_grid::build(m, cells), m_draws, seed, threads);
}

// ---------------------------------------------------------------------------
// Threshold table: c_eps is the empirical (1-eps)-quantile of the Delta0
// sample (type-7 interpolation); its Monte Carlo error is estimated by a
// 200-fold bootstrap of the sample.
// ---------------------------------------------------------------------------

struct threshold_row {
    double epsilon = 0.0;
    double c = 0.0;
    double stderr_ = 0.0;
};

struct threshold_table {
    std::string model_id;
    int grid_cells = 0;      // K
    std::uint64_t replicates = 0;  // M
    std::uint64_t seed = 0;
    std::string quantile_method = "type7";
    std::string stderr_method = "bootstrap200";
    std::vector<threshold_row> rows;

    const threshold_row& row_for(double epsilon) const {
        for (const auto& r : rows) {
            if (std::abs(r.epsilon - epsilon) <= 1e-12) return r;
        }
        throw missing_epsilon_error("epsilon not present in threshold table");
    }
};

// Type-7 interpolated quantile of a sorted sample.
inline double type7_quantile(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    const double h = (static_cast<double>(n) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::clamp(std::floor(h), 0.0,
                                                               static_cast<double>(n - 1)));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace detail {

inline constexpr int bootstrap_rounds = 200;

inline std::vector<double> bootstrap_quantile_sd(const std::vector<double>& sorted,
                                                 const std::vector<double>& probs,
                                                 std::uint64_t seed, unsigned threads) {
    const std::size_t n = sorted.size();
    std::vector<std::vector<double>> qs(bootstrap_rounds, std::vector<double>(probs.size()));
    parallel_workers(bootstrap_rounds, threads, [&](unsigned, auto claim) {
        std::vector<double> resample(n);
        for (std::size_t b = claim(); b < bootstrap_rounds; b = claim()) {
            auto g = rng::substream(seed, b);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t idx = static_cast<std::size_t>(g.uniform01() * n);
                resample[i] = sorted[std::min(idx, n - 1)];
            }
            std::sort(resample.begin(), resample.end());
            for (std::size_t k = 0; k < probs.size(); ++k) {
                qs[b][k] = type7_quantile(resample, probs[k]);
            }
        }
    });
    std::vector<double> sd(probs.size(), 0.0);
    for (std::size_t k = 0; k < probs.size(); ++k) {
        double mean = 0.0;
        for (int b = 0; b < bootstrap_rounds; ++b) mean += qs[b][k];
        mean /= bootstrap_rounds;
        double ss = 0.0;
        for (int b = 0; b < bootstrap_rounds; ++b) {
            const double d = qs[b][k] - mean;
            ss += d * d;
        }
        sd[k] = std::sqrt(ss / (bootstrap_rounds - 1));
    }
    return sd;
}

}  // namespace detail

inline threshold_table threshold_table_from_draws(const std::string& model_id,
                                                  std::vector<double> draws,
                                                  const std::vector<double>& epsilons,
                                                  int grid_cells, std::uint64_t seed,
                                                  unsigned threads = 1) {
    if (draws.size() < 1000) throw validation_error("threshold calibration needs M >= 1000");
    for (double e : epsilons) {
        if (!(e > 0.0 && e < 1.0)) {
            throw invalid_epsilon_error("every epsilon must lie strictly inside (0, 1)");
        }
    }
    std::sort(draws.begin(), draws.end());

    std::vector<double> eps_sorted = epsilons;
    std::sort(eps_sorted.begin(), eps_sorted.end());
    std::vector<double> probs;
    probs.reserve(eps_sorted.size());
    for (double e : eps_sorted) probs.push_back(1.0 - e);

    const std::vector<double> sd =
        detail::bootstrap_quantile_sd(draws, probs, rng::substream_seed(seed, 0x626F6F74), threads);

    threshold_table table;
    table.model_id = model_id;
    table.grid_cells = grid_cells;
    table.replicates = draws.size();
    table.seed = seed;
    for (std::size_t k = 0; k < eps_sorted.size(); ++k) {
        table.rows.push_back({eps_sorted[k], type7_quantile(draws, probs[k]), sd[k]});
    }
    return table;
}

inline threshold_table calibrate_threshold(const base_model& m,
                                           const std::vector<double>& epsilons,
                                           std::size_t m_draws, int cells, std::uint64_t seed,
                                           unsigned threads = 1) {
    std::vector<double> draws = sample_limit_deltas(m, m_draws, cells, seed, threads);
    return threshold_table_from_draws(m.id, std::move(draws), epsilons, cells, seed, threads);
}

}  // namespace ppgof
