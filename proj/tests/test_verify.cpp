#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fspde/errors.hpp"
#include "fspde/specfun.hpp"
#include "fspde/verify.hpp"

using namespace fspde;

namespace {

const CoefficientSpec kZero = CoefficientSpec::linear(0.0);
const CoefficientSpec kOne = CoefficientSpec::affine(0.0, 1.0);

}  // namespace

TEST_CASE("moment estimate on a deterministic ensemble") {
    ModelParams params{2.0, 0.5};
    GridSpec grid{0.5, 16, 16.0, 64};
    const auto kernel = solver_kernel_table(params, grid);
    StudySetup setup{params, grid, kZero, kZero, constant_ic(grid, 2.0), 1, 120, 2};
    const std::vector<ProbePoint> probes = {{16, 32}};
    const auto samples = run_probe_samples(setup, kernel, std::nullopt, probes);

    const auto est = estimate_moments(samples[0], 3.0, 99);
    CHECK(est.estimate == doctest::Approx(8.0).epsilon(1e-6));
    CHECK(est.degenerate);
    CHECK(est.ci_lo == est.ci_hi);
}

TEST_CASE("jensen consistency across moment orders") {
    ModelParams params{2.0, 0.5};
    GridSpec grid{0.5, 16, 16.0, 64};
    const auto kernel = solver_kernel_table(params, grid);
    StudySetup setup{params, grid, kZero, kOne, constant_ic(grid, 0.0), 5, 300, 4};
    const std::vector<ProbePoint> probes = {{16, 32}};
    const auto samples = run_probe_samples(setup, kernel, std::nullopt, probes);

    const auto k2 = estimate_moments(samples[0], 2.0, 7);
    const auto k4 = estimate_moments(samples[0], 4.0, 7);
    CHECK(k4.estimate >= k2.estimate * k2.estimate);
}

TEST_CASE("verdict logic is a pure function of interval and envelope") {
    CHECK(classify_against_envelope(0.1, 0.2, std::log(0.3)) == Verdict::pass);
    CHECK(classify_against_envelope(0.4, 0.6, std::log(0.3)) == Verdict::fail);
    CHECK(classify_against_envelope(0.2, 0.6, std::log(0.3)) == Verdict::inconclusive);
    CHECK(classify_against_envelope(0.0, 0.0, std::log(0.3)) == Verdict::pass);
    // astronomically large envelope in log space still classifies
    CHECK(classify_against_envelope(1.0, 2.0, 1e6) == Verdict::pass);
}

TEST_CASE("fabricated over-envelope ensemble fails the report") {
    ModelConstants mc;
    mc.params = {2.0, 0.5};
    mc.L_b = 0.0;
    mc.L_sigma = 1.0;
    mc.L_Nb = 0.0;
    mc.L_Nsigma = 1.0;
    mc.u0_sup = 0.0;
    mc.cstar = 0.217451929993410428;
    // moment envelope at k=2, t=0.25 is >= C0^2 = 16; feed samples far above
    std::vector<double> fabricated(200, 1e9);
    fabricated[0] = 1.000001e9;  // de-degenerate
    const auto rep = check_moment_bounds(fabricated, mc, 2.0, 0.25, 0.0, 3);
    CHECK(rep.verdict == Verdict::fail);
    CHECK(rep.asserted);

    // honest small samples pass
    std::vector<double> small(200, 0.1);
    small[0] = 0.100001;
    const auto rep2 = check_moment_bounds(small, mc, 2.0, 0.25, 0.0, 3);
    CHECK(rep2.verdict == Verdict::pass);
}

TEST_CASE("tail estimates") {
    SUBCASE("deterministic path below the cutoff gives zero") {
        const std::vector<double> samples(500, 1.0);  // sup |u| = 1, e^1 > 1
        const auto est = estimate_tail(samples, 1.0);
        CHECK(est.p_hat == 0.0);
        CHECK(est.exceedances == 0);
        CHECK(est.ci_lo == 0.0);
        CHECK(est.ci_hi == doctest::Approx(-std::log(0.005) / 500.0).epsilon(2e-2));
    }
    SUBCASE("all-zero ensemble upper end at the 0.99 rule-of-three scale") {
        const std::vector<double> samples(10000, 0.0);
        const auto est = estimate_tail(samples, 2.0);
        CHECK(est.p_hat == 0.0);
        CHECK(est.ci_hi == doctest::Approx(5.3 / 10000.0).epsilon(1e-2));
    }
    SUBCASE("counts are correct") {
        std::vector<double> samples(100, 0.0);
        for (int i = 0; i < 25; ++i) samples[i] = 10.0;  // |u| >= e^2
        const auto est = estimate_tail(samples, 2.0);
        CHECK(est.exceedances == 25);
        CHECK(est.p_hat == doctest::Approx(0.25));
        CHECK(est.ci_lo < 0.25);
        CHECK(est.ci_hi > 0.25);
    }
    SUBCASE("tail estimates never exceed one and decrease in N") {
        std::vector<double> samples(400);
        for (int i = 0; i < 400; ++i) samples[i] = 0.05 * i;
        double prev_hi = 1.0;
        for (double N : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
            const auto est = estimate_tail(samples, N);
            CHECK(est.p_hat <= 1.0);
            CHECK(est.p_hat <= prev_hi + 1e-15);
            prev_hi = est.p_hat;
        }
    }
}

TEST_CASE("convergence study with loglip diffusion") {
    ModelParams params{2.0, 0.5};
    GridSpec grid{1.0, 32, 16.0, 128};
    const auto kernel = solver_kernel_table(params, grid);
    StudySetup setup{params, grid, kZero, CoefficientSpec::loglip(1.3), constant_ic(grid, 1.0),
                     2718, 200, 4};
    const std::vector<ProbePoint> probes = {{16, 64}, {32, 64}, {32, 32}};
    const std::vector<double> levels = {0.4, 0.8, 1.2, 1.8, 2.6, 3.6};
    const auto study = convergence_study(setup, kernel, levels, 2.0, probes);

    REQUIRE(study.d_N.size() == levels.size());
    CHECK(study.nonincreasing_before_zero);
    CHECK(study.first_zero_index.has_value());
    CHECK(study.d_N.front() > 0.0);
    CHECK(study.d_N.back() == 0.0);
    CHECK(study.fitted_slope < 0.0);
    // partial sums plateau once d_N vanishes
    CHECK(study.partial_sums.back() == study.partial_sums[*study.first_zero_index]);
}

TEST_CASE("globally lipschitz coefficients give identically zero differences") {
    ModelParams params{2.0, 0.5};
    GridSpec grid{0.5, 16, 16.0, 64};
    const auto kernel = solver_kernel_table(params, grid);
    StudySetup setup{params, grid, kZero, CoefficientSpec::linear(0.5), constant_ic(grid, 0.5),
                     11, 100, 2};
    const std::vector<ProbePoint> probes = {{16, 32}};
    // sup of the field stays tiny, so every level beyond log(sup) is vacuous
    const std::vector<double> levels = {2.0, 3.0, 4.0, 5.0};
    const auto study = convergence_study(setup, kernel, levels, 2.0, probes);
    for (double d : study.d_N) CHECK(d == 0.0);
    CHECK(study.first_zero_index == 0);
}

TEST_CASE("uniqueness probe") {
    ModelParams params{2.0, 0.5};
    GridSpec grid{0.5, 32, 16.0, 128};
    const auto kernel = solver_kernel_table(params, grid);
    StudySetup setup{params, grid, CoefficientSpec::linear(0.2), CoefficientSpec::loglip(1.3),
                     constant_ic(grid, 1.0), 1, 1, 1};

    SUBCASE("identical runs differ by exactly zero") {
        const auto rep = uniqueness_probe(setup, kernel, 5, 30.0, 30.0, HistoryOrder::forward,
                                          HistoryOrder::forward);
        CHECK(rep.sup_abs_diff == 0.0);
    }
    SUBCASE("vacuous truncation bookkeeping differs by exactly zero") {
        const auto rep = uniqueness_probe(setup, kernel, 5, 30.0, 35.0, HistoryOrder::forward,
                                          HistoryOrder::forward);
        CHECK(rep.sup_abs_diff == 0.0);
    }
    SUBCASE("permuted reduction order stays at reassociation scale") {
        const auto rep = uniqueness_probe(setup, kernel, 5, 30.0, 35.0);
        CHECK(rep.sup_abs_diff <= 1e-10);
    }
}

TEST_CASE("additive noise variance formulas") {
    ModelParams params{2.0, 0.5};
    GridSpec grid{1.0, 64, 16.0, 256};
    const auto kernel = solver_kernel_table(params, grid);
    const double cst = cstar(2.0, 0.5);
    // the discrete sum approaches the continuum value from below at this
    // resolution, within a few percent at t = 1
    const double discrete = additive_noise_variance(kernel, grid, 64);
    const double continuum = additive_noise_variance_continuum(cst, 0.25, 1.0);
    CHECK(std::abs(discrete - continuum) / continuum < 0.05);
    CHECK_THROWS_AS(additive_noise_variance(kernel, grid, 0), std::invalid_argument);
}

TEST_CASE("probe validation") {
    ModelParams params{2.0, 0.5};
    GridSpec grid{0.5, 16, 16.0, 64};
    const auto kernel = solver_kernel_table(params, grid);
    StudySetup setup{params, grid, kZero, kZero, constant_ic(grid, 0.0), 1, 4, 1};
    const std::vector<ProbePoint> bad_time = {{0, 0}};
    CHECK_THROWS_AS(run_probe_samples(setup, kernel, std::nullopt, bad_time),
                    std::invalid_argument);
    const std::vector<ProbePoint> bad_space = {{1, 64}};
    CHECK_THROWS_AS(run_probe_samples(setup, kernel, std::nullopt, bad_space),
                    std::invalid_argument);
}

TEST_CASE("empty ensembles are rejected") {
    const std::vector<double> empty;
    CHECK_THROWS_AS(estimate_moments(empty, 2.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(estimate_tail(empty, 1.0), std::invalid_argument);
}

TEST_CASE("path-level moment estimation matches the sample-level one") {
    ModelParams params{2.0, 0.5};
    GridSpec grid{0.5, 16, 16.0, 64};
    const auto kernel = solver_kernel_table(params, grid);
    StudySetup setup{params, grid, kZero, kOne, constant_ic(grid, 0.0), 8, 150, 2};
    const ProbePoint probe{16, 32};
    const auto paths = run_paths(setup, kernel, std::nullopt);
    const std::vector<ProbePoint> probes = {probe};
    const auto samples = run_probe_samples(setup, kernel, std::nullopt, probes);
    const auto a = estimate_moments(paths, 2.0, probe, 5);
    const auto b = estimate_moments(samples[0], 2.0, 5);
    CHECK(a.estimate == b.estimate);
    CHECK(a.ci_lo == b.ci_lo);
    CHECK(a.ci_hi == b.ci_hi);
}

TEST_CASE("moment report marks out-of-range k as not asserted") {
    ModelConstants mc;
    mc.params = {2.0, 0.5};
    mc.L_b = 20.0;  // k_min = 20^{0.75}/0.01 >> 4
    mc.L_sigma = 0.1;
    mc.L_Nb = 20.0;
    mc.L_Nsigma = 0.1;
    mc.cstar = 0.217451929993410428;
    std::vector<double> samples(100, 0.5);
    samples[0] = 0.500001;
    const auto rep = check_moment_bounds(samples, mc, 2.0, 0.5, 0.0, 1);
    CHECK_FALSE(rep.asserted);
    CHECK(rep.verdict == Verdict::inconclusive);
}

TEST_CASE("weighted norm of a linear-sigma ensemble sits under the contraction level") {
    // With the contraction weight gamma(k) of the moment proof, the weighted
    // sup-norm estimate must stay below C0 = 4 (u0_sup + 1).
    ModelParams params{2.0, 0.5};
    GridSpec grid{0.5, 16, 16.0, 64};
    const auto kernel = solver_kernel_table(params, grid);
    const auto sigma = CoefficientSpec::linear(1.0);
    StudySetup setup{params, grid, kZero, sigma, constant_ic(grid, 1.0), 21, 150, 2};
    const auto paths = run_paths(setup, kernel, std::nullopt);

    const double k = 2.0;
    const double r = params.ratio();
    const double cg = 0.217451929993410428 * gamma_fn(1.0 - r);
    const double gamma = 4.0 * std::pow(4.0 * std::sqrt(cg * k) * 1.0, 2.0 / (1.0 - r));
    const double norm = weighted_norm_estimate(paths, k, gamma, grid.T);
    CHECK(norm > 0.0);
    CHECK(norm <= 4.0 * (1.0 + 1.0));
}
