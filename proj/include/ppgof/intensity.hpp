#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "ppgof/errors.hpp"
#include "ppgof/la.hpp"
#include "ppgof/math/normal.hpp"
#include "ppgof/math/pchip.hpp"
#include "ppgof/math/quadrature.hpp"

namespace ppgof {

// Shift/scale parameter pair theta = (alpha, beta), beta > 0.
struct shift_scale {
    double alpha = 0.0;
    double beta = 1.0;

    bool valid() const { return std::isfinite(alpha) && std::isfinite(beta) && beta > 0.0; }
};

inline void require_valid(const shift_scale& th) {
    if (!th.valid()) throw validation_error("invalid parameters: beta must be positive and finite");
}

// Admissible rectangle (a1, a2) x (b1, b2) with b1 > 0.
struct param_box {
    double alpha_lo = -10.0;
    double alpha_hi = 10.0;
    double beta_lo = 0.2;
    double beta_hi = 8.0;

    bool valid() const {
        return alpha_lo < alpha_hi && 0.0 < beta_lo && beta_lo < beta_hi;
    }

    bool contains(const shift_scale& th) const {
        return th.alpha >= alpha_lo && th.alpha <= alpha_hi && th.beta >= beta_lo &&
               th.beta <= beta_hi;
    }

    shift_scale clamp(const shift_scale& th) const {
        return {std::clamp(th.alpha, alpha_lo, alpha_hi), std::clamp(th.beta, beta_lo, beta_hi)};
    }
};

inline param_box default_box() { return {}; }

// A base intensity: the known positive function lambda0 together with its
// derivative, cumulative Lambda0, total mass Lambda0(inf) and the inverse
// of the cumulative on (0, total).
struct base_model {
    std::string id;
    double total = 0.0;  // Lambda0(inf)
    std::function<double(double)> lambda0;
    std::function<double(double)> lambda0_prime;
    std::function<double(double)> log_lambda0;
    std::function<double(double)> Lambda0;
    std::function<double(double)> Lambda0_inv;  // defined on (0, total)
};

// ---------------------------------------------------------------------------
// Family operations. The null family has mean t -> beta * Lambda0((t-alpha)/beta)
// and intensity t -> lambda0((t-alpha)/beta).
// ---------------------------------------------------------------------------

inline double base_coordinate(const shift_scale& th, double t) { return (t - th.alpha) / th.beta; }

inline double family_mean(const base_model& m, const shift_scale& th, double t) {
    require_valid(th);
    return th.beta * m.Lambda0(base_coordinate(th, t));
}

inline double family_intensity(const base_model& m, const shift_scale& th, double t) {
    require_valid(th);
    return m.lambda0(base_coordinate(th, t));
}

// Gradient of (alpha, beta) -> beta * Lambda0((t-alpha)/beta) expressed at
// the base coordinate s: (-lambda0(s), Lambda0(s) - s*lambda0(s)).
inline vec2 mean_gradient_base(const base_model& m, double s) {
    const double lam = m.lambda0(s);
    return {-lam, m.Lambda0(s) - s * lam};
}

// Score direction l(s) = -lambda0'(s) * (1, s).
inline vec2 score_vector_base(const base_model& m, double s) {
    const double lp = m.lambda0_prime(s);
    return {-lp, -lp * s};
}

// Base-coordinate window holding all but a fraction 2*delta of the mass;
// integrals over the whole line are evaluated on it.
struct support_interval {
    double lo = 0.0;
    double hi = 0.0;
};

inline support_interval effective_support(const base_model& m, double delta = 1e-10) {
    return {m.Lambda0_inv(delta * m.total), m.Lambda0_inv((1.0 - delta) * m.total)};
}

// ---------------------------------------------------------------------------
// Bundled closed-form models.
// ---------------------------------------------------------------------------

namespace models {

// gauss2: lambda0(s) = 2 exp(-s^2/2), total mass 2*sqrt(2*pi).
inline base_model gauss2() {
    base_model m;
    m.id = "gauss2";
    m.total = 2.0 * math::sqrt_two_pi;
    m.lambda0 = [](double s) { return 2.0 * std::exp(-0.5 * s * s); };
    m.lambda0_prime = [](double s) { return -2.0 * s * std::exp(-0.5 * s * s); };
    m.log_lambda0 = [](double s) { return std::numbers::ln2 - 0.5 * s * s; };
    m.Lambda0 = [total = m.total](double s) { return total * math::normal_cdf(s); };
    m.Lambda0_inv = [total = m.total](double r) { return math::normal_quantile(r / total); };
    return m;
}

// logistic5: lambda0(s) = 5 e^{-s} / (1 + e^{-s})^2, total mass 5,
// cumulative 5 * sigmoid(s) with closed-form (logit) inverse.
inline base_model logistic5() {
    base_model m;
    m.id = "logistic5";
    m.total = 5.0;
    const auto sigmoid = [](double s) { return 0.5 * (1.0 + std::tanh(0.5 * s)); };
    m.lambda0 = [](double s) {
        const double e = std::exp(-std::abs(s));
        const double q = 1.0 + e;
        return 5.0 * e / (q * q);
    };
    m.lambda0_prime = [lam = m.lambda0](double s) { return -std::tanh(0.5 * s) * lam(s); };
    m.log_lambda0 = [](double s) {
        return std::log(5.0) - std::abs(s) - 2.0 * std::log1p(std::exp(-std::abs(s)));
    };
    m.Lambda0 = [sigmoid](double s) { return 5.0 * sigmoid(s); };
    m.Lambda0_inv = [](double r) { return std::log(r / (5.0 - r)); };
    return m;
}

// Base model from a tabulated (s, lambda0(s)) grid, interpolated by a
// shape-preserving cubic. The intensity is treated as zero outside the
// grid window, so the window must carry essentially all of the mass.
inline base_model tabulated(const std::string& id, std::vector<double> s, std::vector<double> lam) {
    if (s.size() != lam.size() || s.size() < 4) {
        throw validation_error("tabulated model needs at least 4 grid points");
    }
    for (double v : lam) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw validation_error("tabulated intensity values must be positive and finite");
        }
    }
    auto interp = std::make_shared<math::pchip>(std::move(s), std::move(lam));

    base_model m;
    m.id = id;
    m.total = interp->total_integral();
    m.lambda0 = [interp](double x) {
        if (x < interp->x_front() || x > interp->x_back()) return 0.0;
        return std::max(0.0, (*interp)(x));
    };
    m.lambda0_prime = [interp](double x) {
        if (x < interp->x_front() || x > interp->x_back()) return 0.0;
        return interp->derivative(x);
    };
    m.log_lambda0 = [lam0 = m.lambda0](double x) {
        const double v = lam0(x);
        return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
    };
    m.Lambda0 = [interp](double x) { return interp->integral(x); };
    m.Lambda0_inv = [interp](double r) { return interp->invert_integral(r); };
    return m;
}

}  // namespace models

// ---------------------------------------------------------------------------
// Regularity condition report. R1 positivity is sampled on the quadrature
// grid; the R3 integrals and the mean-gradient bound are computed by
// quadrature and flagged as non-finite when doubling the range moves them
// by more than 1%.
// ---------------------------------------------------------------------------

struct condition_report {
    bool r1_positive = false;
    double c3_second_moment = 0.0;        // integral of s^2 lambda0(s)
    double c3_fourth_moment_prime = 0.0;  // integral of s^4 |lambda0'(s)|
    double c4_bound = 0.0;                // integral of |grad mean|^2 lambda0(s)
    bool all_finite = false;
};

struct condition_grid {
    double s_lo = 0.0;
    double s_hi = 0.0;
    int panels = 256;
};

inline condition_grid default_condition_grid(const base_model& m) {
    // Cover all but 1e-10 of the mass, far above the required 99.99%.
    const auto sup = effective_support(m, 1e-10);
    return {sup.lo, sup.hi, 256};
}

namespace detail {

struct divergence_probe {
    double value = 0.0;
    bool finite = false;
};

template <class F>
divergence_probe probe_integral(F&& f, const condition_grid& grid) {
    const double base = math::integrate(f, grid.s_lo, grid.s_hi, grid.panels);
    const double wide = math::integrate(f, 2.0 * grid.s_lo, 2.0 * grid.s_hi, 2 * grid.panels);
    const bool finite = std::isfinite(base) && std::isfinite(wide) &&
                        std::abs(wide - base) <= 0.01 * std::max(1e-300, std::abs(wide));
    return {base, finite};
}

struct condition_probes {
    condition_report report;
    bool second_finite = false, fourth_finite = false, c4_finite = false;
};

inline condition_probes run_condition_checks(const base_model& m, const condition_grid& grid) {
    const double covered = m.Lambda0(grid.s_hi) - m.Lambda0(grid.s_lo);
    if (!(covered >= 0.9999 * m.total)) {
        throw validation_error("condition grid must cover at least 99.99% of the mass");
    }

    condition_probes out;
    out.report.r1_positive = true;
    // Positivity is probed where the model carries mass; a tabulated model
    // is zero outside its window by construction and that window, not the
    // caller's grid, is its domain.
    const auto sup = effective_support(m, 1e-10);
    const double pos_lo = std::max(grid.s_lo, sup.lo);
    const double pos_hi = std::min(grid.s_hi, sup.hi);
    const auto& rule = math::gauss_legendre_16();
    const double h = (pos_hi - pos_lo) / grid.panels;
    for (int p = 0; p < grid.panels && out.report.r1_positive; ++p) {
        const double mid = pos_lo + (p + 0.5) * h;
        for (double node : rule.nodes) {
            if (!(m.lambda0(mid + 0.5 * h * node) > 0.0)) {
                out.report.r1_positive = false;
                break;
            }
        }
    }

    const auto second = probe_integral([&](double s) { return s * s * m.lambda0(s); }, grid);
    const auto fourth = probe_integral(
        [&](double s) { return s * s * s * s * std::abs(m.lambda0_prime(s)); }, grid);
    const auto c4 = probe_integral(
        [&](double s) {
            const vec2 g = mean_gradient_base(m, s);
            return dot(g, g) * m.lambda0(s);
        },
        grid);

    out.report.c3_second_moment = second.value;
    out.report.c3_fourth_moment_prime = fourth.value;
    out.report.c4_bound = c4.value;
    out.second_finite = second.finite;
    out.fourth_finite = fourth.finite;
    out.c4_finite = c4.finite;
    out.report.all_finite = second.finite && fourth.finite && c4.finite;
    return out;
}

}  // namespace detail

inline condition_report check_conditions(const base_model& m, const condition_grid& grid) {
    return detail::run_condition_checks(m, grid).report;
}

inline condition_report check_conditions(const base_model& m) {
    return check_conditions(m, default_condition_grid(m));
}

// Throwing variant: names the diverging integrals.
inline condition_report validate_conditions(const base_model& m, const condition_grid& grid) {
    const auto probes = detail::run_condition_checks(m, grid);
    if (!probes.report.all_finite) {
        std::string which;
        if (!probes.second_finite) which += " c3_second_moment";
        if (!probes.fourth_finite) which += " c3_fourth_moment_prime";
        if (!probes.c4_finite) which += " c4_bound";
        throw non_finite_error("diverging condition integral(s):" + which);
    }
    if (!probes.report.r1_positive) {
        throw validation_error("intensity is not strictly positive on the condition grid");
    }
    return probes.report;
}

inline condition_report validate_conditions(const base_model& m) {
    return validate_conditions(m, default_condition_grid(m));
}

}  // namespace ppgof
