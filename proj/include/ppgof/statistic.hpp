#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ppgof/intensity.hpp"
#include "ppgof/simulate.hpp"

namespace ppgof {

enum class stat_method { exact_piecewise, quadrature };

inline const char* to_string(stat_method m) {
    return m == stat_method::exact_piecewise ? "exact_piecewise" : "quadrature";
}

struct stat_value {
    double delta = 0.0;
    stat_method method = stat_method::exact_piecewise;
    std::size_t n = 0;
    std::optional<shift_scale> theta_used;  // empty for the simple statistic
};

namespace detail {

// Integral over [0, upper] of (step(r) - slope*r)^2 dr where step jumps by
// 1/n at each entry of `jumps` (sorted, inside [0, upper]). Each segment
// integrates a quadratic exactly; with u = level - slope*r the factored
// antiderivative difference
//   (u1^3 - u2^3) / (3*slope) = (r_hi - r_lo) * (u1^2 + u1*u2 + u2^2) / 3
// keeps every segment contribution nonnegative.
inline double step_vs_line_l2(const std::vector<double>& jumps, double inv_n, double slope,
                              double upper) {
    double total = 0.0;
    double r_lo = 0.0;
    double level = 0.0;
    const std::size_t m = jumps.size();
    for (std::size_t k = 0; k <= m; ++k) {
        const double r_hi = (k == m) ? upper : jumps[k];
        if (r_hi > r_lo) {
            const double u1 = level - slope * r_lo;
            const double u2 = level - slope * r_hi;
            total += (r_hi - r_lo) * (u1 * u1 + u1 * u2 + u2 * u2) / 3.0;
        }
        r_lo = std::max(r_lo, r_hi);
        level += inv_n;
    }
    return total;
}

// Event times mapped into the cumulative scale r = scale * Lambda0((t-a)/b),
// clamped into [0, scale*total] against floating-point spill.
inline std::vector<double> jump_positions(const base_model& m, const shift_scale& th,
                                          const std::vector<double>& events, double scale) {
    std::vector<double> jumps;
    jumps.reserve(events.size());
    const double upper = scale * m.total;
    for (double t : events) {
        jumps.push_back(std::clamp(scale * m.Lambda0(base_coordinate(th, t)), 0.0, upper));
    }
    return jumps;
}

}  // namespace detail

// Parametric Cramer-von Mises statistic at theta (normally the MLE):
//   (n / beta^2) * integral of [emp_mean(t) - beta*Lambda0((t-a)/b)]^2
//                  * lambda0((t-a)/b) dt.
// Substituting r = Lambda0((t-a)/b) turns this into
//   (n / beta) * integral over [0, Lambda0(inf)] of [emp_mean(t(r)) - beta*r]^2 dr,
// where the empirical mean is a step in r: an exact piecewise computation.
inline stat_value cvm_statistic(const base_model& m, const dataset& ds, const shift_scale& th) {
    require_valid(th);
    const std::vector<double> events = pooled_events(ds);
    const std::vector<double> jumps = detail::jump_positions(m, th, events, 1.0);
    const double n = static_cast<double>(ds.n());
    const double integral = detail::step_vs_line_l2(jumps, 1.0 / n, th.beta, m.total);
    return {n / th.beta * integral, stat_method::exact_piecewise, ds.n(), th};
}

// Simple-hypothesis statistic with fully known theta0:
//   (n / mass^2) * integral of [emp_mean(t) - mean(t)]^2 d mean(t),
// mass = beta0 * Lambda0(inf). Substituting u = mean(t) makes the second
// term linear with unit slope, so the same exact piecewise form applies.
inline stat_value cvm_simple(const base_model& m, const dataset& ds, const shift_scale& th0) {
    require_valid(th0);
    const std::vector<double> events = pooled_events(ds);
    const std::vector<double> jumps = detail::jump_positions(m, th0, events, th0.beta);
    const double n = static_cast<double>(ds.n());
    const double mass = th0.beta * m.total;
    const double integral = detail::step_vs_line_l2(jumps, 1.0 / n, 1.0, mass);
    stat_value out{n / (mass * mass) * integral, stat_method::exact_piecewise, ds.n(),
                   std::nullopt};
    return out;
}

}  // namespace ppgof
