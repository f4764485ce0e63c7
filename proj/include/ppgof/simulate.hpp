#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ppgof/intensity.hpp"
#include "ppgof/rng.hpp"

namespace ppgof {

// One observed counting-process path, stored as its sorted event times.
// The path value at t is the number of events <= t (right continuous).
struct trajectory {
    std::vector<double> events;

    std::size_t count_up_to(double t) const {
        return static_cast<std::size_t>(
            std::upper_bound(events.begin(), events.end(), t) - events.begin());
    }
};

struct dataset {
    std::string model_id;
    std::optional<shift_scale> theta_true;
    std::uint64_t seed = 0;
    std::vector<trajectory> trajectories;

    std::size_t n() const { return trajectories.size(); }

    std::size_t total_events() const {
        std::size_t total = 0;
        for (const auto& tr : trajectories) total += tr.events.size();
        return total;
    }
};

// Inversion sampler: the event count is Poisson with mean beta*Lambda0(inf)
// and each event time is alpha + beta * Lambda0_inv(U * Lambda0(inf)).
template <class Rng>
trajectory sample_trajectory(const base_model& m, const shift_scale& th, Rng& g) {
    require_valid(th);
    const long count = g.poisson(th.beta * m.total);
    trajectory tr;
    tr.events.reserve(static_cast<std::size_t>(count));
    for (long k = 0; k < count; ++k) {
        tr.events.push_back(th.alpha + th.beta * m.Lambda0_inv(g.uniform01() * m.total));
    }
    std::sort(tr.events.begin(), tr.events.end());
    return tr;
}

// n independent trajectories; trajectory j draws from substream(seed, j),
// so the result is the same no matter how the loop is scheduled.
inline dataset sample_dataset(const base_model& m, const shift_scale& th, std::size_t n,
                              std::uint64_t seed) {
    if (n < 1) throw validation_error("dataset needs n >= 1 trajectories");
    dataset ds;
    ds.model_id = m.id;
    ds.theta_true = th;
    ds.seed = seed;
    ds.trajectories.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        auto g = rng::substream(seed, j);
        ds.trajectories[j] = sample_trajectory(m, th, g);
    }
    return ds;
}

// Empirical mean function: average event count up to t.
inline double empirical_mean(const dataset& ds, double t) {
    if (ds.trajectories.empty()) return 0.0;
    std::size_t total = 0;
    for (const auto& tr : ds.trajectories) total += tr.count_up_to(t);
    return static_cast<double>(total) / static_cast<double>(ds.n());
}

// All event times across trajectories, sorted; the statistic works on this.
inline std::vector<double> pooled_events(const dataset& ds) {
    std::vector<double> pooled;
    pooled.reserve(ds.total_events());
    for (const auto& tr : ds.trajectories) {
        pooled.insert(pooled.end(), tr.events.begin(), tr.events.end());
    }
    std::sort(pooled.begin(), pooled.end());
    return pooled;
}

}  // namespace ppgof
