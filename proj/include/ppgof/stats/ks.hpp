#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ppgof/errors.hpp"

namespace ppgof::stats {

// Survival function of the Kolmogorov distribution,
//   Q(x) = 2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
inline double kolmogorov_sf(double x) {
    if (x <= 0.0) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Asymptotic p-value for a KS distance d at effective sample size ne,
// with the usual small-sample correction.
inline double ks_pvalue(double d, double ne) {
    const double sq = std::sqrt(ne);
    return kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d);
}

struct ks_result {
    double distance = 0.0;
    double p_value = 0.0;
};

// Two-sample Kolmogorov-Smirnov test. Inputs need not be sorted.
inline ks_result ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw validation_error("KS test needs non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    return {d, ks_pvalue(d, ne)};
}

// One-sample KS distance of a sample against a CDF.
template <class Cdf>
ks_result ks_one_sample(std::vector<double> sample, Cdf&& cdf) {
    if (sample.empty()) throw validation_error("KS test needs a non-empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - f));
    }
    return {d, ks_pvalue(d, n)};
}

// Wilson 95% score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials,
                                                 double z = 1.959963984540054) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace ppgof::stats
