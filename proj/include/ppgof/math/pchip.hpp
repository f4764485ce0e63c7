#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ppgof/errors.hpp"
#include "ppgof/math/quadrature.hpp"

namespace ppgof::math {

// Shape-preserving piecewise cubic interpolant (Fritsch-Carlson slopes).
// Values never overshoot the data range of a cell, so interpolating a
// positive table stays positive. Also carries the running integral and
// its inverse, which is what the intensity models need.
class pchip {
public:
    pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) {
            throw validation_error("pchip needs at least two (x, y) points");
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!(x_[i] < x_[i + 1])) {
                throw validation_error("pchip abscissae must be strictly increasing");
            }
        }
        compute_slopes();
        compute_cumulative();
    }

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }
    double total_integral() const { return cum_.back(); }

    // Value at s, for s within [x_front, x_back].
    double operator()(double s) const {
        const std::size_t i = cell(s);
        const double h = x_[i + 1] - x_[i];
        const double t = (s - x_[i]) / h;
        const double t2 = t * t;
        const double t3 = t2 * t;
        const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        const double h10 = t3 - 2.0 * t2 + t;
        const double h01 = -2.0 * t3 + 3.0 * t2;
        const double h11 = t3 - t2;
        return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
    }

    double derivative(double s) const {
        const std::size_t i = cell(s);
        const double h = x_[i + 1] - x_[i];
        const double t = (s - x_[i]) / h;
        const double t2 = t * t;
        const double g00 = (6.0 * t2 - 6.0 * t) / h;
        const double g10 = 3.0 * t2 - 4.0 * t + 1.0;
        const double g01 = (-6.0 * t2 + 6.0 * t) / h;
        const double g11 = 3.0 * t2 - 2.0 * t;
        return g00 * y_[i] + g10 * d_[i] + g01 * y_[i + 1] + g11 * d_[i + 1];
    }

    // Integral from x_front to s.
    double integral(double s) const {
        if (s <= x_.front()) return 0.0;
        if (s >= x_.back()) return cum_.back();
        const std::size_t i = cell(s);
        return cum_[i] + cell_integral(i, s - x_[i]);
    }

    // Inverse of the running integral: integral(result) == r. Requires the
    // interpolated values to be positive. Absolute residual tolerance in r
    // is 1e-12 scaled by the total.
    double invert_integral(double r) const {
        const double total = cum_.back();
        const double lo_r = std::max(0.0, std::min(r, total));
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), lo_r);
        std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - cum_.begin())) - 1;
        i = std::min(i, x_.size() - 2);
        const double target = lo_r - cum_[i];
        const double h = x_[i + 1] - x_[i];
        const double u = invert_increasing(
            [&](double v) { return std::pair{cell_integral(i, v) - target, value_local(i, v)}; },
            0.0, h, 1e-12 * (1.0 + total), 1e-15);
        return x_[i] + u;
    }

private:
    std::size_t cell(double s) const {
        const auto it = std::upper_bound(x_.begin(), x_.end(), s);
        const std::ptrdiff_t idx = std::clamp<std::ptrdiff_t>(it - x_.begin() - 1, 0,
                                                              static_cast<std::ptrdiff_t>(x_.size()) - 2);
        return static_cast<std::size_t>(idx);
    }

    double value_local(std::size_t i, double u) const { return (*this)(x_[i] + u); }

    // Integral of the Hermite cubic on cell i from its left edge to local
    // offset u in [0, h].
    double cell_integral(std::size_t i, double u) const {
        const double h = x_[i + 1] - x_[i];
        const double t = u / h;
        const double t2 = t * t;
        const double t3 = t2 * t;
        const double t4 = t3 * t;
        const double H00 = 0.5 * t4 - t3 + t;
        const double H10 = 0.25 * t4 - (2.0 / 3.0) * t3 + 0.5 * t2;
        const double H01 = -0.5 * t4 + t3;
        const double H11 = 0.25 * t4 - t3 / 3.0;
        return h * (H00 * y_[i] + h * H10 * d_[i] + H01 * y_[i + 1] + h * H11 * d_[i + 1]);
    }

    void compute_slopes() {
        const std::size_t n = x_.size();
        d_.assign(n, 0.0);
        std::vector<double> hh(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            hh[i] = x_[i + 1] - x_[i];
            delta[i] = (y_[i + 1] - y_[i]) / hh[i];
        }
        if (n == 2) {
            d_[0] = d_[1] = delta[0];
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                d_[i] = 0.0;
            } else {
                const double w1 = 2.0 * hh[i] + hh[i - 1];
                const double w2 = hh[i] + 2.0 * hh[i - 1];
                d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d_[0] = edge_slope(hh[0], hh[1], delta[0], delta[1]);
        d_[n - 1] = edge_slope(hh[n - 2], hh[n - 3], delta[n - 2], delta[n - 3]);
    }

    static double edge_slope(double h0, double h1, double del0, double del1) {
        double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if (d * del0 <= 0.0) {
            d = 0.0;
        } else if (del0 * del1 < 0.0 && std::abs(d) > 3.0 * std::abs(del0)) {
            d = 3.0 * del0;
        }
        return d;
    }

    void compute_cumulative() {
        const std::size_t n = x_.size();
        cum_.assign(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            cum_[i + 1] = cum_[i] + cell_integral(i, x_[i + 1] - x_[i]);
        }
    }

    std::vector<double> x_, y_, d_, cum_;
};

}  // namespace ppgof::math
