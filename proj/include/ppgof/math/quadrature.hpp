#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

namespace ppgof::math {

struct gl_rule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre nodes/weights by Newton iteration on the Legendre
// recurrence; plenty for the orders used here.
inline gl_rule make_gauss_legendre(int order) {
    gl_rule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[order - 1 - i] = x;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

inline const gl_rule& gauss_legendre_16() {
    static const gl_rule rule = make_gauss_legendre(16);
    return rule;
}

// Composite Gauss-Legendre over [a, b] split into equal panels.
template <class F>
double integrate(F&& f, double a, double b, int panels = 128, const gl_rule& rule = gauss_legendre_16()) {
    if (!(b > a)) return 0.0;
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        double panel = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            panel += rule.weights[k] * f(mid + 0.5 * h * rule.nodes[k]);
        }
        sum += 0.5 * h * panel;
    }
    return sum;
}

// Safeguarded Newton/bisection for a strictly increasing function on
// [lo, hi]. `fd` returns {f(x) - target, f'(x)}.
template <class FD>
double invert_increasing(FD&& fd, double lo, double hi, double f_tol, double x_tol) {
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const auto [res, deriv] = fd(x);
        if (std::abs(res) <= f_tol) return x;
        if (res > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        double next = x - res / deriv;
        if (!(deriv > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= x_tol * (1.0 + std::abs(x))) return next;
        x = next;
    }
    return x;
}

}  // namespace ppgof::math
