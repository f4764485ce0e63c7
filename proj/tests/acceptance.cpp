// Acceptance suite: one line per criterion, nonzero exit if any fails.
//
//   1 fisher-matrix        quadrature vs Gaussian-moment values; positive definiteness
//   2 mle-asymptotics      covariance of sqrt(n/beta0)(theta_hat - theta0) vs inverse Fisher
//   3 coupling-identity    E[W_end zeta] = (0, 1/3); E[zeta zeta'] = inverse Fisher
//   4 simple-limit         mean/variance of the known-theta limit draw
//   5 apf-property         statistic law identical across theta0 and equal to the limit law
//   6 size                 rejection rate at eps = 0.05 inside [0.035, 0.065]
//   7 exactness            piecewise-exact statistic vs dense quadrature
//   8 determinism          byte-identical study JSON across worker counts
//   9 power                bimodal alternative rejected, non-decreasing in n
//
// Every tolerance is fixed here, not calibrated at run time.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ppgof/serialize.hpp"
#include "ppgof/testkit.hpp"

using namespace ppgof;

namespace {

unsigned g_threads = default_threads();
int g_failures = 0;

void report(int index, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] C%d %s: %s\n", pass ? "PASS" : "FAIL", index, name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    va_list args;
    va_start(args, f);
    char buf[512];
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------- C1
void criterion_fisher() {
    const auto m = models::gauss2();
    const auto fs = fisher_star(m);
    const double target00 = 5.013257;
    const double target11 = 15.039772;
    bool pass = std::abs(fs.istar.a00 - target00) <= 1e-6 * target00 &&
                std::abs(fs.istar.a11 - target11) <= 1e-6 * target11 &&
                std::abs(fs.istar.a01) <= 1e-6 && fs.det > 0.0;

    double det_logistic = 0.0;
    try {
        det_logistic = fisher_star(models::logistic5()).det;
        pass = pass && det_logistic > 0.0;
    } catch (...) {
        pass = false;
    }
    report(1, "fisher-matrix", pass,
           fmt("I*(gauss2) = diag(%.9f, %.9f), off-diag %.2e, det %.4f; det(logistic5) = %.4f",
               fs.istar.a00, fs.istar.a11, fs.istar.a01, fs.det, det_logistic));
}

// ---------------------------------------------------------------------- C2
void criterion_mle_asymptotics() {
    const auto m = models::gauss2();
    const shift_scale th0{2.0, 1.5};
    const std::size_t n = 2000;
    const std::size_t reps = 500;
    const double rate = std::sqrt(static_cast<double>(n) / th0.beta);

    std::vector<double> ya(reps), yb(reps);
    parallel_for(reps, g_threads, [&](std::size_t r) {
        const auto ds = sample_dataset(m, th0, n, rng::substream_seed(160901, r));
        const auto fit = fit_mle(m, ds);
        ya[r] = rate * (fit.theta_hat.alpha - th0.alpha);
        yb[r] = rate * (fit.theta_hat.beta - th0.beta);
    });

    double ma = 0.0, mb = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        ma += ya[r];
        mb += yb[r];
    }
    ma /= static_cast<double>(reps);
    mb /= static_cast<double>(reps);
    sym2 cov{0.0, 0.0, 0.0};
    for (std::size_t r = 0; r < reps; ++r) {
        cov.a00 += (ya[r] - ma) * (ya[r] - ma);
        cov.a01 += (ya[r] - ma) * (yb[r] - mb);
        cov.a11 += (yb[r] - mb) * (yb[r] - mb);
    }
    cov.a00 /= static_cast<double>(reps - 1);
    cov.a01 /= static_cast<double>(reps - 1);
    cov.a11 /= static_cast<double>(reps - 1);

    const sym2 target = fisher_star(m).istar.inverse();
    const double num = std::sqrt((cov.a00 - target.a00) * (cov.a00 - target.a00) +
                                 2.0 * (cov.a01 - target.a01) * (cov.a01 - target.a01) +
                                 (cov.a11 - target.a11) * (cov.a11 - target.a11));
    const double den = std::sqrt(target.a00 * target.a00 + 2.0 * target.a01 * target.a01 +
                                 target.a11 * target.a11);
    const double rel = num / den;
    report(2, "mle-asymptotics", rel <= 0.15,
           fmt("cov = [%.5f, %.5f; ., %.5f] vs [%.5f, 0, %.5f]; rel Frobenius %.3f (<= 0.15)",
               cov.a00, cov.a01, cov.a11, target.a00, target.a11, rel));
}

// ---------------------------------------------------------------------- C3
void criterion_coupling() {
    const auto m = models::gauss2();
    const sym2 target = fisher_star(m).istar.inverse();
    const limit_grid grid = limit_grid::build(m, 8192);
    const std::size_t draws = 100000;

    std::vector<double> wz0(draws), wz1(draws), z00(draws), z01(draws), z11(draws);
    parallel_workers(draws, g_threads, [&](unsigned, auto claim) {
        limit_sampler smp(grid);
        for (std::size_t i = claim(); i < draws; i = claim()) {
            auto g = rng::substream(311019, i);
            const limit_draw d = smp.draw(g);
            wz0[i] = d.w_end * d.zeta.c0;
            wz1[i] = d.w_end * d.zeta.c1;
            z00[i] = d.zeta.c0 * d.zeta.c0;
            z01[i] = d.zeta.c0 * d.zeta.c1;
            z11[i] = d.zeta.c1 * d.zeta.c1;
        }
    });

    const auto s_wz0 = oracles::summarize(wz0);
    const auto s_wz1 = oracles::summarize(wz1);
    const auto s_z00 = oracles::summarize(z00);
    const auto s_z01 = oracles::summarize(z01);
    const auto s_z11 = oracles::summarize(z11);

    const bool pass = std::abs(s_wz0.mean - 0.0) <= 3.0 * s_wz0.se &&
                      std::abs(s_wz1.mean - 1.0 / 3.0) <= 3.0 * s_wz1.se &&
                      std::abs(s_z00.mean - target.a00) <= 3.0 * s_z00.se &&
                      std::abs(s_z01.mean - target.a01) <= 3.0 * s_z01.se &&
                      std::abs(s_z11.mean - target.a11) <= 3.0 * s_z11.se;
    report(3, "coupling-identity", pass,
           fmt("E[w z] = (%.5f+-%.5f, %.5f+-%.5f) vs (0, 1/3); E[zz'] diag (%.6f+-%.6f, "
               "%.6f+-%.6f) vs (%.6f, %.6f)",
               s_wz0.mean, s_wz0.se, s_wz1.mean, s_wz1.se, s_z00.mean, s_z00.se, s_z11.mean,
               s_z11.se, target.a00, target.a11));
}

// ---------------------------------------------------------------------- C4
void criterion_simple_limit() {
    const std::size_t draws = 100000;
    std::vector<double> sample(draws);
    parallel_for(draws, g_threads, [&](std::size_t i) {
        auto g = rng::substream(40499, i);
        sample[i] = sample_limit_simple(8192, g);
    });
    const auto st = oracles::summarize(sample);
    const double var = st.sd * st.sd;
    const bool pass = std::abs(st.mean - 0.5) <= 0.005 && std::abs(var - 1.0 / 3.0) <= 0.01;
    report(4, "simple-limit", pass,
           fmt("mean %.5f (0.5 +- 0.005), variance %.5f (0.33333 +- 0.01)", st.mean, var));
}

// ------------------------------------------------------------------ C5, C6
struct shared_calibration {
    std::vector<double> limit_draws;
    threshold_table table;
};

shared_calibration calibrate_shared() {
    const auto m = models::gauss2();
    const std::uint64_t seed = 52718;
    shared_calibration out;
    out.limit_draws = sample_limit_deltas(m, 100000, 8192, seed, g_threads);
    out.table = threshold_table_from_draws(m.id, out.limit_draws, {0.01, 0.05, 0.10}, 8192, seed,
                                           g_threads);
    return out;
}

void criterion_apf(const shared_calibration& cal) {
    const auto m = models::gauss2();
    const std::vector<shift_scale> thetas{{2.0, 1.5}, {-1.0, 0.7}, {0.0, 3.0}};
    const std::size_t n = 1000;
    const std::size_t reps = 2000;

    std::vector<std::vector<double>> samples(thetas.size());
    for (std::size_t a = 0; a < thetas.size(); ++a) {
        samples[a] = delta_hat_sample(m, thetas[a], n, reps,
                                      rng::substream_seed(551234, theta_stream_tag(thetas[a])),
                                      g_threads);
    }

    bool pass = true;
    std::string detail;
    for (std::size_t a = 0; a < thetas.size(); ++a) {
        for (std::size_t b = a + 1; b < thetas.size(); ++b) {
            const auto ks = stats::ks_two_sample(samples[a], samples[b]);
            pass = pass && ks.p_value > 0.01;
            detail += fmt("p%zu%zu=%.3f ", a, b, ks.p_value);
        }
    }
    for (std::size_t a = 0; a < thetas.size(); ++a) {
        const auto ks = stats::ks_two_sample(samples[a], cal.limit_draws);
        pass = pass && ks.distance < 0.05;
        detail += fmt("D%zu=%.4f ", a, ks.distance);
    }
    report(5, "apf-property", pass,
           detail + "(pairwise p > 0.01, limit-law distance < 0.05)");
}

void criterion_size(const shared_calibration& cal) {
    const auto m = models::gauss2();
    bool pass = true;
    std::string detail;
    for (const shift_scale th0 : {shift_scale{2.0, 1.5}, shift_scale{-1.0, 0.7}}) {
        const auto res = size_study(m, th0, 500, 2000, 0.05, 77001, cal.table, g_threads);
        pass = pass && res.rejection_rate >= 0.035 && res.rejection_rate <= 0.065;
        detail += fmt("rate(%.1f,%.1f)=%.4f wilson=[%.4f,%.4f] ", th0.alpha, th0.beta,
                      res.rejection_rate, res.wilson_interval.first, res.wilson_interval.second);
    }
    report(6, "size", pass, detail + "(band [0.035, 0.065])");
}

// ---------------------------------------------------------------------- C7
void criterion_exactness() {
    const auto m = models::gauss2();
    const std::size_t cases = 100;
    std::vector<double> rel(cases);
    parallel_for(cases, g_threads, [&](std::size_t i) {
        const auto ds = oracles::small_random_dataset(m, 650000 + i);
        const shift_scale th{-0.5 + 0.25 * static_cast<double>(i % 5),
                             0.8 + 0.15 * static_cast<double>(i % 4)};
        const double exact = cvm_statistic(m, ds, th).delta;
        const double quad = oracles::cvm_quadrature(m, ds, th, 1 << 20);
        rel[i] = std::abs(exact - quad) / exact;
    });
    double worst = 0.0;
    for (double r : rel) worst = std::max(worst, r);
    report(7, "exactness", worst < 1e-6,
           fmt("worst relative deviation %.3e over %zu datasets (< 1e-6)", worst, cases));
}

// ---------------------------------------------------------------------- C8
void criterion_determinism(const shared_calibration& cal) {
    const auto m = models::gauss2();
    const auto s1 = size_study(m, {0.0, 1.0}, 60, 80, 0.05, 4242, cal.table, 1);
    const auto s4 = size_study(m, {0.0, 1.0}, 60, 80, 0.05, 4242, cal.table, 4);
    const bool studies_equal = to_json(s1).dump() == to_json(s4).dump();

    const auto t1 = calibrate_threshold(m, {0.05}, 2000, 256, 515, 1);
    const auto t3 = calibrate_threshold(m, {0.05}, 2000, 256, 515, 3);
    const bool tables_equal = to_json(t1).dump() == to_json(t3).dump();

    report(8, "determinism", studies_equal && tables_equal,
           fmt("study JSON identical across 1/4 workers: %s; table JSON identical across 1/3 "
               "workers: %s",
               studies_equal ? "yes" : "no", tables_equal ? "yes" : "no"));
}

// ---------------------------------------------------------------------- C9
void criterion_power(const shared_calibration& cal) {
    const auto m = models::gauss2();
    alternative_spec alt;
    alt.model = oracles::bimodal_model();
    alt.theta = {0.0, 1.0};

    const std::size_t reps = 400;
    const auto r500 = power_study(m, alt, 500, reps, 0.05, 888111, cal.table, g_threads);
    const auto r1000 = power_study(m, alt, 1000, reps, 0.05, 888222, cal.table, g_threads);

    const auto se = [&](double p) { return std::sqrt(p * (1.0 - p) / static_cast<double>(reps)); };
    const double slack = 2.0 * std::sqrt(se(r500.rejection_rate) * se(r500.rejection_rate) +
                                         se(r1000.rejection_rate) * se(r1000.rejection_rate));
    const bool pass = r500.rejection_rate > 0.5 &&
                      r1000.rejection_rate >= r500.rejection_rate - slack;
    report(9, "power", pass,
           fmt("rate(n=500) = %.4f (> 0.5), rate(n=1000) = %.4f (non-decreasing within %.4f)",
               r500.rejection_rate, r1000.rejection_rate, slack));
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
            g_threads = static_cast<unsigned>(std::atoi(argv[++i]));
        }
    }
    std::printf("acceptance suite, %u worker threads\n", g_threads);

    const auto t0 = std::chrono::steady_clock::now();
    criterion_fisher();
    criterion_mle_asymptotics();
    criterion_coupling();
    criterion_simple_limit();

    const shared_calibration cal = calibrate_shared();
    criterion_apf(cal);
    criterion_size(cal);
    criterion_exactness();
    criterion_determinism(cal);
    criterion_power(cal);

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d of 9 criteria failed (%.1f s)\n", g_failures, secs);
    return g_failures == 0 ? 0 : 1;
}
