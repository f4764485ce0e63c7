#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "ppgof/errors.hpp"
#include "ppgof/intensity.hpp"
#include "ppgof/la.hpp"
#include "ppgof/simulate.hpp"

namespace ppgof {

// ---------------------------------------------------------------------------
// Log-likelihood and score.
//
// ln L(theta) = sum over events of ln lambda0((t-alpha)/beta)
//               - n * beta * Lambda0(inf).
// This is the likelihood ratio against a fixed reference up to a constant
// that does not depend on theta, so it has the same maximizer.
// ---------------------------------------------------------------------------

inline double log_likelihood(const base_model& m, const shift_scale& th,
                             std::span<const double> events, std::size_t n) {
    require_valid(th);
    double event_sum = 0.0;
    for (double t : events) event_sum += m.log_lambda0(base_coordinate(th, t));
    return event_sum - static_cast<double>(n) * th.beta * m.total;
}

inline double log_likelihood(const base_model& m, const shift_scale& th, const dataset& ds) {
    require_valid(th);
    double event_sum = 0.0;
    for (const auto& tr : ds.trajectories) {
        for (double t : tr.events) event_sum += m.log_lambda0(base_coordinate(th, t));
    }
    return event_sum - static_cast<double>(ds.n()) * th.beta * m.total;
}

// Gradient of the log-likelihood in (alpha, beta). Each event at base
// coordinate s contributes -(lambda0'/lambda0)(s) * (1/beta, s/beta); the
// compensator contributes -(0, n * Lambda0(inf)).
inline vec2 score(const base_model& m, const shift_scale& th, std::span<const double> events,
                  std::size_t n) {
    require_valid(th);
    double g_alpha = 0.0, g_beta = 0.0;
    for (double t : events) {
        const double s = base_coordinate(th, t);
        const double ratio = -m.lambda0_prime(s) / m.lambda0(s);
        g_alpha += ratio;
        g_beta += ratio * s;
    }
    return {g_alpha / th.beta, g_beta / th.beta - static_cast<double>(n) * m.total};
}

inline vec2 score(const base_model& m, const shift_scale& th, const dataset& ds) {
    return score(m, th, pooled_events(ds), ds.n());
}

// ---------------------------------------------------------------------------
// Fisher matrix of the base model: entries integral of lambda0'(s)^2 /
// lambda0(s) times (1, s, s^2). The family information at theta is this
// matrix divided by beta.
// ---------------------------------------------------------------------------

struct fisher_star_matrix {
    sym2 istar;
    double det = 0.0;
};

inline fisher_star_matrix fisher_star(const base_model& m) {
    const auto sup = effective_support(m);
    const auto weight = [&](double s) {
        const double lp = m.lambda0_prime(s);
        return lp * lp / m.lambda0(s);
    };
    fisher_star_matrix out;
    out.istar.a00 = math::integrate([&](double s) { return weight(s); }, sup.lo, sup.hi, 256);
    out.istar.a01 = math::integrate([&](double s) { return s * weight(s); }, sup.lo, sup.hi, 256);
    out.istar.a11 =
        math::integrate([&](double s) { return s * s * weight(s); }, sup.lo, sup.hi, 256);
    out.det = out.istar.det();
    if (!(out.det > 1e-10 * std::abs(out.istar.a00 * out.istar.a11))) {
        throw singular_fisher_error("base Fisher matrix is numerically singular");
    }
    return out;
}

// ---------------------------------------------------------------------------
// MLE over the box: coarse grid scan, then Nelder-Mead refinement from the
// best grid points with proposals clamped into the box.
// ---------------------------------------------------------------------------

struct fit_options {
    int grid_points = 16;      // per axis
    int refine_starts = 3;
    long max_iterations = 10000;  // per refinement start
    double f_tol = 1e-12;
    double x_tol = 1e-10;      // relative to box width
};

struct fit_result {
    shift_scale theta_hat;
    double loglik = 0.0;
    double score_norm = 0.0;
    long iterations = 0;
    bool boundary_hit = false;
    int starts_tried = 0;
};

namespace detail {

struct nm_point {
    shift_scale x;
    double f = 0.0;
};

// Prefer higher log-likelihood; exact ties break toward smaller beta, then
// smaller alpha. Exact comparison keeps this a strict weak ordering, which
// the polytope acceptance logic needs to make progress.
inline bool fit_better(double f_a, const shift_scale& a, double f_b, const shift_scale& b) {
    if (f_a != f_b) return f_a > f_b;
    if (a.beta != b.beta) return a.beta < b.beta;
    return a.alpha < b.alpha;
}

template <class F>
long nelder_mead_box(F&& objective, const param_box& box, nm_point& best, long max_iter,
                     double f_tol, double x_tol) {
    const double wa = box.alpha_hi - box.alpha_lo;
    const double wb = box.beta_hi - box.beta_lo;

    const auto clamp_eval = [&](shift_scale th) {
        th = box.clamp(th);
        double f = objective(th);
        if (std::isnan(f)) f = -std::numeric_limits<double>::infinity();
        return nm_point{th, f};
    };

    // Two rounds: a fresh small simplex around the incumbent after the
    // first convergence guards against premature collapse.
    long used = 0;
    for (int round = 0; round < 2; ++round) {
        std::array<nm_point, 3> sx;
        sx[0] = clamp_eval(best.x);
        sx[1] = clamp_eval({best.x.alpha + 0.05 * wa * (round == 0 ? 1.0 : -1.0), best.x.beta});
        sx[2] = clamp_eval({best.x.alpha, best.x.beta + 0.05 * wb * (round == 0 ? 1.0 : -1.0)});

        const auto order = [&]() {
            std::sort(sx.begin(), sx.end(), [](const nm_point& a, const nm_point& b) {
                return fit_better(a.f, a.x, b.f, b.x);
            });
        };
        order();

        while (used < max_iter) {
            const double span_a = std::max({sx[0].x.alpha, sx[1].x.alpha, sx[2].x.alpha}) -
                                  std::min({sx[0].x.alpha, sx[1].x.alpha, sx[2].x.alpha});
            const double span_b = std::max({sx[0].x.beta, sx[1].x.beta, sx[2].x.beta}) -
                                  std::min({sx[0].x.beta, sx[1].x.beta, sx[2].x.beta});
            const double f_spread = std::abs(sx[0].f - sx[2].f);
            if ((span_a <= x_tol * wa && span_b <= x_tol * wb) ||
                f_spread <= f_tol * (1.0 + std::abs(sx[0].f))) {
                break;
            }
            ++used;

            const shift_scale centroid{0.5 * (sx[0].x.alpha + sx[1].x.alpha),
                                       0.5 * (sx[0].x.beta + sx[1].x.beta)};
            const auto along = [&](double c) {
                return shift_scale{centroid.alpha + c * (centroid.alpha - sx[2].x.alpha),
                                   centroid.beta + c * (centroid.beta - sx[2].x.beta)};
            };

            const nm_point refl = clamp_eval(along(1.0));
            if (fit_better(refl.f, refl.x, sx[0].f, sx[0].x)) {
                const nm_point expanded = clamp_eval(along(2.0));
                sx[2] = fit_better(expanded.f, expanded.x, refl.f, refl.x) ? expanded : refl;
            } else if (fit_better(refl.f, refl.x, sx[1].f, sx[1].x)) {
                sx[2] = refl;
            } else {
                const bool outside = fit_better(refl.f, refl.x, sx[2].f, sx[2].x);
                const nm_point ctr = clamp_eval(along(outside ? 0.5 : -0.5));
                if (fit_better(ctr.f, ctr.x, (outside ? refl : sx[2]).f,
                               (outside ? refl : sx[2]).x)) {
                    sx[2] = ctr;
                } else {
                    // shrink toward the best vertex
                    for (int i = 1; i < 3; ++i) {
                        sx[i] = clamp_eval({0.5 * (sx[0].x.alpha + sx[i].x.alpha),
                                            0.5 * (sx[0].x.beta + sx[i].x.beta)});
                    }
                }
            }
            order();
        }
        if (used >= max_iter) {
            throw non_convergence_error("polytope refinement exceeded the iteration cap");
        }
        best = sx[0];
    }
    return used;
}

}  // namespace detail

inline fit_result fit_mle(const base_model& m, const dataset& ds,
                          const param_box& box = default_box(),
                          const fit_options& options = {}) {
    if (!box.valid()) throw validation_error("parameter box must satisfy a1<a2, 0<b1<b2");
    const std::vector<double> events = pooled_events(ds);
    if (events.empty()) {
        throw empty_dataset_error("cannot fit: dataset has no events");
    }
    const std::size_t n = ds.n();

    const auto objective = [&](const shift_scale& th) {
        return log_likelihood(m, th, std::span<const double>(events), n);
    };

    // Coarse scan at cell centers.
    const int g = std::max(2, options.grid_points);
    std::vector<detail::nm_point> grid;
    grid.reserve(static_cast<std::size_t>(g) * g);
    for (int i = 0; i < g; ++i) {
        const double a = box.alpha_lo + (i + 0.5) * (box.alpha_hi - box.alpha_lo) / g;
        for (int j = 0; j < g; ++j) {
            const double b = box.beta_lo + (j + 0.5) * (box.beta_hi - box.beta_lo) / g;
            const shift_scale th{a, b};
            grid.push_back({th, objective(th)});
        }
    }
    std::sort(grid.begin(), grid.end(), [](const detail::nm_point& a, const detail::nm_point& b) {
        return detail::fit_better(a.f, a.x, b.f, b.x);
    });

    fit_result out;
    detail::nm_point champion;
    champion.f = -std::numeric_limits<double>::infinity();
    const int starts = std::min<int>(options.refine_starts, static_cast<int>(grid.size()));
    for (int k = 0; k < starts; ++k) {
        detail::nm_point current = grid[static_cast<std::size_t>(k)];
        out.iterations += detail::nelder_mead_box(objective, box, current, options.max_iterations,
                                                  options.f_tol, options.x_tol);
        ++out.starts_tried;
        if (k == 0 || detail::fit_better(current.f, current.x, champion.f, champion.x)) {
            champion = current;
        }
    }

    out.theta_hat = champion.x;
    out.loglik = champion.f;
    out.score_norm = norm(score(m, out.theta_hat, std::span<const double>(events), n));
    const double edge_a = 1e-6 * (box.alpha_hi - box.alpha_lo);
    const double edge_b = 1e-6 * (box.beta_hi - box.beta_lo);
    out.boundary_hit = out.theta_hat.alpha <= box.alpha_lo + edge_a ||
                       out.theta_hat.alpha >= box.alpha_hi - edge_a ||
                       out.theta_hat.beta <= box.beta_lo + edge_b ||
                       out.theta_hat.beta >= box.beta_hi - edge_b;
    return out;
}

}  // namespace ppgof
