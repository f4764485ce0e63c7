#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "ppgof/estimate.hpp"
#include "ppgof/parallel.hpp"
#include "ppgof/simulate.hpp"

using Catch::Approx;
using namespace ppgof;

namespace {

dataset empty_dataset(std::size_t n) {
    dataset ds;
    ds.model_id = "gauss2";
    ds.trajectories.resize(n);
    return ds;
}

dataset single_event_dataset(double t) {
    dataset ds;
    ds.model_id = "gauss2";
    ds.trajectories.push_back({{t}});
    return ds;
}

}  // namespace

TEST_CASE("log-likelihood of an empty dataset is minus the compensator") {
    const auto m = models::gauss2();
    const auto ds = empty_dataset(3);
    for (const shift_scale th : {shift_scale{0.0, 1.0}, shift_scale{2.0, 1.5}}) {
        CHECK(log_likelihood(m, th, ds) == Approx(-3.0 * th.beta * m.total).epsilon(1e-14));
    }
}

TEST_CASE("log-likelihood of one event at the shift point") {
    const auto m = models::gauss2();
    const shift_scale th{2.0, 1.5};
    const auto ds = single_event_dataset(2.0);
    CHECK(log_likelihood(m, th, ds) ==
          Approx(std::numbers::ln2 - 1.5 * m.total).epsilon(1e-14));
}

TEST_CASE("log-likelihood is shift invariant") {
    const auto m = models::gauss2();
    const auto ds = sample_dataset(m, {1.0, 2.0}, 25, 77);
    dataset shifted = ds;
    const double c = 3.25;
    for (auto& tr : shifted.trajectories) {
        for (auto& t : tr.events) t += c;
    }
    const double base = log_likelihood(m, {1.0, 2.0}, ds);
    const double moved = log_likelihood(m, {1.0 + c, 2.0}, shifted);
    CHECK(moved == Approx(base).epsilon(1e-12));
}

TEST_CASE("score of an empty dataset is the compensator gradient") {
    const auto m = models::gauss2();
    const auto ds = empty_dataset(4);
    const vec2 sc = score(m, {1.0, 2.0}, ds);
    CHECK(sc.c0 == Approx(0.0).margin(1e-300));
    CHECK(sc.c1 == Approx(-4.0 * m.total).epsilon(1e-14));
}

TEST_CASE("gauss2 event contributes (s/beta, s^2/beta) to the score") {
    const auto m = models::gauss2();
    const shift_scale th{2.0, 1.5};
    const double t = 3.7;
    const double s = (t - th.alpha) / th.beta;
    const vec2 sc = score(m, th, single_event_dataset(t));
    CHECK(sc.c0 == Approx(s / th.beta).epsilon(1e-13));
    CHECK(sc.c1 + m.total == Approx(s * s / th.beta).epsilon(1e-13));
}

TEST_CASE("score matches finite differences of the log-likelihood", "[property]") {
    const double h = 1e-6;
    for (const auto& m : {models::gauss2(), models::logistic5()}) {
        const auto ds = sample_dataset(m, {0.5, 1.2}, 30, 4321);
        rng::stream g(999);
        for (int rep = 0; rep < 20; ++rep) {
            const shift_scale th{-3.0 + 6.0 * g.uniform01(), 0.5 + 2.5 * g.uniform01()};
            const vec2 sc = score(m, th, ds);
            const double fd_a = (log_likelihood(m, {th.alpha + h, th.beta}, ds) -
                                 log_likelihood(m, {th.alpha - h, th.beta}, ds)) /
                                (2.0 * h);
            const double fd_b = (log_likelihood(m, {th.alpha, th.beta + h}, ds) -
                                 log_likelihood(m, {th.alpha, th.beta - h}, ds)) /
                                (2.0 * h);
            CHECK(sc.c0 == Approx(fd_a).epsilon(1e-5).margin(1e-4));
            CHECK(sc.c1 == Approx(fd_b).epsilon(1e-5).margin(1e-4));
        }
    }
}

TEST_CASE("fisher matrix of gauss2 is diagonal with Gaussian moments") {
    const auto m = models::gauss2();
    const auto fs = fisher_star(m);
    // lambda0'^2/lambda0 = s^2 lambda0, so the entries are the 2nd/3rd/4th
    // Gaussian moments scaled by the mass
    CHECK(fs.istar.a00 == Approx(m.total).epsilon(1e-6));
    CHECK(fs.istar.a01 == Approx(0.0).margin(1e-8));
    CHECK(fs.istar.a11 == Approx(3.0 * m.total).epsilon(1e-6));
    CHECK(fs.det == Approx(24.0 * std::numbers::pi).epsilon(1e-6));
    CHECK(fs.det == Approx(75.398).epsilon(1e-4));
}

TEST_CASE("fisher matrix of logistic5") {
    const auto m = models::logistic5();
    const auto fs = fisher_star(m);
    // first entry has the closed form 5 * integral of (1-2x)^2 dx = 5/3
    CHECK(fs.istar.a00 == Approx(5.0 / 3.0).epsilon(1e-8));
    // the base is symmetric about 0, so the odd-weighted entry vanishes
    CHECK(fs.istar.a01 == Approx(0.0).margin(1e-8));
    CHECK(fs.det > 0.0);
}

TEST_CASE("skewed tabulated base has a nonzero off-diagonal fisher entry") {
    const auto m = oracles::skewed_tabulated();
    const auto fs = fisher_star(m);
    // closed forms from Gamma moments (see the fixture)
    CHECK(fs.istar.a00 == Approx(2.0).epsilon(0.02));
    CHECK(fs.istar.a01 == Approx(-2.0).epsilon(0.02));
    CHECK(fs.istar.a11 == Approx(8.0).epsilon(0.02));
    CHECK(fs.det > 0.0);
}

TEST_CASE("degenerate base trips the singular-fisher guard") {
    base_model flat;
    flat.id = "flat";
    flat.total = 1.0;
    flat.lambda0 = [](double) { return 1.0; };
    flat.lambda0_prime = [](double) { return 0.0; };
    flat.log_lambda0 = [](double) { return 0.0; };
    flat.Lambda0 = [](double s) { return std::clamp(s, 0.0, 1.0); };
    flat.Lambda0_inv = [](double r) { return r; };
    CHECK_THROWS_AS(fisher_star(flat), singular_fisher_error);
}

TEST_CASE("mle recovers the generating parameters at n=2000") {
    const auto m = models::gauss2();
    const shift_scale th0{2.0, 1.5};
    const auto ds = sample_dataset(m, th0, 2000, 271828);
    const auto fit = fit_mle(m, ds);
    CHECK(std::hypot(fit.theta_hat.alpha - th0.alpha, fit.theta_hat.beta - th0.beta) <= 0.15);
    CHECK_FALSE(fit.boundary_hit);
    CHECK(fit.starts_tried == 3);
    // interior first-order condition
    CHECK(fit.score_norm <= 1e-6 * (1.0 + std::abs(fit.loglik)));
}

TEST_CASE("mle is shift equivariant") {
    const auto m = models::gauss2();
    const auto ds = sample_dataset(m, {1.0, 1.2}, 300, 515);
    const double c = 2.5;
    dataset shifted = ds;
    for (auto& tr : shifted.trajectories) {
        for (auto& t : tr.events) t += c;
    }
    const param_box box{-6.0, 6.0, 0.2, 6.0};
    const param_box box_shifted{-6.0 + c, 6.0 + c, 0.2, 6.0};

    const auto fit0 = fit_mle(m, ds, box);
    const auto fit1 = fit_mle(m, shifted, box_shifted);
    CHECK(fit1.theta_hat.alpha - fit0.theta_hat.alpha == Approx(c).margin(1e-6));
    CHECK(fit1.theta_hat.beta == Approx(fit0.theta_hat.beta).margin(1e-6));
}

TEST_CASE("mle errors: empty data, iteration cap") {
    const auto m = models::gauss2();
    CHECK_THROWS_AS(fit_mle(m, empty_dataset(5)), empty_dataset_error);

    const auto ds = sample_dataset(m, {2.0, 1.5}, 100, 5);
    fit_options tiny;
    tiny.max_iterations = 3;
    CHECK_THROWS_AS(fit_mle(m, ds, default_box(), tiny), non_convergence_error);
}

TEST_CASE("mle flags a boundary solution") {
    const auto m = models::gauss2();
    const auto ds = sample_dataset(m, {2.0, 1.5}, 400, 99);
    const param_box narrow{-10.0, 10.0, 0.2, 0.9};  // true beta = 1.5 outside
    const auto fit = fit_mle(m, ds, narrow);
    CHECK(fit.boundary_hit);
    CHECK(fit.theta_hat.beta == Approx(0.9).margin(1e-6));
}

TEST_CASE("mle contracts as n grows", "[property]") {
    const auto m = models::gauss2();
    const shift_scale th0{2.0, 1.5};
    const int reps = 120;

    const auto median_err = [&](std::size_t n, std::uint64_t seed) {
        std::vector<double> err(reps);
        parallel_for(reps, default_threads(), [&](std::size_t r) {
            const auto ds = sample_dataset(m, th0, n, rng::substream_seed(seed, r));
            const auto fit = fit_mle(m, ds);
            err[r] = std::hypot(fit.theta_hat.alpha - th0.alpha, fit.theta_hat.beta - th0.beta);
        });
        std::sort(err.begin(), err.end());
        return 0.5 * (err[reps / 2 - 1] + err[reps / 2]);
    };

    const double small_n = median_err(200, 1111);
    const double large_n = median_err(2000, 2222);
    CHECK(large_n / small_n < 0.5);
}
