#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fspde/bounds.hpp"
#include "fspde/errors.hpp"
#include "fspde/philox.hpp"

using namespace fspde;

namespace {

// Golden C* values (30-digit quadrature oracle).
constexpr double kCstar_2_05 = 0.217451929993410428;
constexpr double kCstar_15_075 = 0.191382567981380889;
constexpr double kCstar_1_04 = 0.242287828373033228;

ModelConstants make_mc(double alpha, double beta, double L_b, double L_sigma, double u0_sup,
                       double cstar_value) {
    ModelConstants mc;
    mc.params = {alpha, beta};
    mc.L_b = L_b;
    mc.L_sigma = L_sigma;
    mc.L_Nb = L_b;
    mc.L_Nsigma = L_sigma;
    mc.u0_sup = u0_sup;
    mc.cstar = cstar_value;
    return mc;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_CASE("derived constants against the spreadsheet oracle") {
    SUBCASE("draw 1: (2, 0.5), Ls=1, Lb=1, T=1, c=2, u0=0") {
        auto mc = make_mc(2.0, 0.5, 1.0, 1.0, 0.0, kCstar_2_05);
        CHECK(rel_err(mc.chash(), 2.0648262958310606) < 1e-12);
        CHECK(rel_err(mc.a0(), 14.083346864768802) < 1e-12);
        const auto thr = convergence_threshold(mc, 2.0, 1.0);
        CHECK(rel_err(thr.N_T, 139.77853657753824) < 1e-11);
        CHECK(rel_err(thr.c_T, 139.36467537567473) < 1e-11);
        CHECK(rel_err(gamma_choice(mc, 2.0), 7996.5942788801071) < 1e-11);
        CHECK(mc.c0() == 4.0);
    }
    SUBCASE("draw 2: (1.5, 0.75), Ls=2, Lb=0.5, T=0.5, c=4, u0=1") {
        auto mc = make_mc(1.5, 0.75, 0.5, 2.0, 1.0, kCstar_15_075);
        CHECK(rel_err(mc.chash(), 2.329692750951628) < 1e-12);
        CHECK(rel_err(mc.a0(), 8.6905121676281419) < 1e-12);
        const auto thr = convergence_threshold(mc, 4.0, 0.5);
        CHECK(rel_err(thr.N_T, 7464.0107007296907) < 1e-11);
        CHECK(rel_err(thr.c_T, 7541.0975482111791) < 1e-11);
        CHECK(rel_err(gamma_choice(mc, 4.0), 2688413.4770449395) < 1e-11);
        CHECK(mc.c0() == 8.0);
    }
    SUBCASE("draw 3: (1, 0.4), Ls=0.5, Lb=2, T=2, c=4, u0=0.5") {
        auto mc = make_mc(1.0, 0.4, 2.0, 0.5, 0.5, kCstar_1_04);
        CHECK(rel_err(mc.chash(), 2.402708991100874) < 1e-12);
        CHECK(rel_err(mc.a0(), 7.6813096204360404) < 1e-12);
        const auto thr = convergence_threshold(mc, 4.0, 2.0);
        CHECK(rel_err(thr.N_T, 843.72392931992725) < 1e-11);
        CHECK(rel_err(thr.c_T, 594.5027804660846) < 1e-11);
        CHECK(rel_err(gamma_choice(mc, 4.0), 2616.4242186713067) < 1e-11);
        CHECK(mc.c0() == 6.0);
    }
}

TEST_CASE("moment bound, linear sigma regime") {
    auto mc = make_mc(2.0, 0.5, 0.0, 1.0, 0.0, kCstar_2_05);

    SUBCASE("small-t limit is C0^k") {
        CHECK(rel_err(moment_bound_linear(mc, 2.0, 1e-12), 16.0) < 1e-9);
    }
    SUBCASE("plug-in value at k=2, t=1") {
        // C0^2 exp(4 C_#^{8/3} 2^{7/3})
        const double want =
            16.0 * std::exp(4.0 * std::pow(mc.chash(), 8.0 / 3.0) * std::pow(2.0, 7.0 / 3.0));
        CHECK(rel_err(moment_bound_linear(mc, 2.0, 1.0), want) < 1e-12);
    }
    SUBCASE("doubling t squares the exponential factor") {
        const double c0k = 16.0;
        const double b1 = moment_bound_linear(mc, 2.0, 0.35) / c0k;
        const double b2 = moment_bound_linear(mc, 2.0, 0.70) / c0k;
        CHECK(rel_err(b2, b1 * b1) < 1e-10);
    }
    SUBCASE("monotone in k, t, L_sigma, u0_sup") {
        const double base = log_moment_bound_linear(mc, 2.0, 0.5);
        CHECK(log_moment_bound_linear(mc, 2.5, 0.5) > base);
        CHECK(log_moment_bound_linear(mc, 2.0, 0.6) > base);
        auto mc2 = mc;
        mc2.L_sigma = 1.2;
        CHECK(log_moment_bound_linear(mc2, 2.0, 0.5) > base);
        auto mc3 = mc;
        mc3.u0_sup = 1.0;
        CHECK(log_moment_bound_linear(mc3, 2.0, 0.5) > base);
    }
    SUBCASE("k below the stated range is refused") {
        auto mc_drift = make_mc(2.0, 0.5, 5.0, 0.4, 0.0, kCstar_2_05);
        // k_min = max(2, L_b^{0.75} L_sigma^{-2}) = 5^{0.75}/0.16 > 2
        CHECK_THROWS_AS(moment_bound_linear(mc_drift, 2.0, 1.0), BoundNotAsserted);
        auto mc_nosigma = make_mc(2.0, 0.5, 1.0, 0.0, 0.0, kCstar_2_05);
        CHECK_THROWS_AS(moment_bound_linear(mc_nosigma, 2.0, 1.0), BoundNotAsserted);
    }
}

TEST_CASE("moment bound, bounded sigma regime") {
    auto mc = make_mc(2.0, 0.5, 0.0, 1.0, 0.0, kCstar_2_05);
    mc.sigma_sup = 0.0;

    SUBCASE("all growth factors collapse at k=2") {
        mc.u0_sup = 0.0;
        // C_big^2 * (0+0+1)^2 * 2^{2/2} = 2 C_big^2
        const double cb = mc.cstar_big(1.0);
        CHECK(rel_err(moment_bound_bounded_sigma(mc, 2.0, 1.0), 2.0 * cb * cb) < 1e-12);
    }
    SUBCASE("drift contributes e^{2 k L_b t}") {
        auto mcd = mc;
        mcd.L_b = 1.0;
        mcd.L_Nb = 1.0;
        const double v0 = moment_bound_bounded_sigma(mc, 2.0, 1.0);
        // same gamma in both: L_b > 0 changes cstar_big through gamma = 2L_b;
        // compare against the explicit formula instead
        const double cb = mcd.cstar_big(1.0);
        const double want = cb * cb * std::exp(4.0) * 2.0;
        CHECK(rel_err(moment_bound_bounded_sigma(mcd, 2.0, 1.0), want) < 1e-12);
        CHECK(v0 > 0.0);
    }
    SUBCASE("full plug-in with the proof's t^a e^{-bt} constant") {
        auto mcf = make_mc(2.0, 0.5, 1.0, 1.0, 1.0, kCstar_2_05);
        mcf.sigma_sup = 1.0;
        // gamma = 2 L_b = 2, a = (1-r)/2 = 0.375: C_abg = (0.75/4)^{0.375} e^{-0.375}
        const double c_abg = std::pow(0.75 / 4.0, 0.375) * std::exp(-0.375);
        CHECK(rel_err(mcf.c_abg(2.0), c_abg) < 1e-13);
        const double cb = std::max(2.0, 4.0 * c_abg * std::sqrt(kCstar_2_05) / std::sqrt(0.75));
        const double k = 4.0, t = 1.0;
        const double want = std::pow(cb, k) * std::exp(2.0 * k * 1.0 * t) * std::pow(3.0, k)
                            * std::pow(k, k / 2.0);
        CHECK(rel_err(moment_bound_bounded_sigma(mcf, k, t), want) < 1e-12);
    }
    SUBCASE("missing sigma_sup refused") {
        auto bad = make_mc(2.0, 0.5, 0.0, 1.0, 0.0, kCstar_2_05);
        CHECK_THROWS_AS(moment_bound_bounded_sigma(bad, 2.0, 1.0), BoundNotAsserted);
        CHECK_THROWS_AS(moment_bound_bounded_sigma(mc, 1.5, 1.0), BoundNotAsserted);
    }
}

TEST_CASE("tail bound, linear sigma regime") {
    auto mc = make_mc(2.0, 0.5, 0.0, 1.0, 0.0, kCstar_2_05);  // rho = 1/4

    SUBCASE("value at the threshold lies in (0,1)") {
        const double t = 0.5;
        const double N = tail_threshold_linear(mc, t);
        const double v = tail_bound_linear(mc, N, t);
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    SUBCASE("doubling N scales |log bound| by 2^{2-rho}") {
        auto mc2 = make_mc(2.0, 1.0, 0.0, 1.0, 0.0, cstar(2.0, 1.0));  // rho = 1/2
        const double t = 0.25;
        const double N = tail_threshold_linear(mc2, t) + 1.0;
        const double l1 = log_tail_bound_linear(mc2, N, t);
        const double l2 = log_tail_bound_linear(mc2, 2.0 * N, t);
        CHECK(rel_err(l2 / l1, std::pow(2.0, 1.5)) < 1e-12);
    }
    SUBCASE("plug-in above the threshold") {
        // N = 40 sits below this regime's validity threshold (~139.4 at
        // t = 1), where the evaluator refuses; check the formula at a valid
        // level instead.
        CHECK_THROWS_AS(tail_bound_linear(mc, 40.0, 1.0), BoundNotAsserted);
        const double N = 140.0;
        const double want =
            -std::pow(N, 1.75) / (mc.chash() * mc.chash() * std::pow(8.0, 0.75));
        CHECK(rel_err(log_tail_bound_linear(mc, N, 1.0), want) < 1e-12);
    }
    SUBCASE("below threshold reported as not asserted") {
        CHECK_THROWS_AS(tail_bound_linear(mc, 1.0, 1.0), BoundNotAsserted);
    }
    SUBCASE("strictly decreasing in N") {
        const double t = 1.0;
        const double N0 = tail_threshold_linear(mc, t);
        double prev = tail_bound_linear(mc, N0, t);
        for (double N = N0 + 1.0; N < N0 + 10.0; N += 1.0) {
            const double v = tail_bound_linear(mc, N, t);
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("tail bound, bounded sigma regime") {
    SUBCASE("drift-free double-exponential structure") {
        // C_big = 2 via a tiny sigma bound; u0 = sigma_sup = 0, L_b = 0
        auto mc = make_mc(2.0, 0.5, 0.0, 1.0, 0.0, kCstar_2_05);
        mc.sigma_sup = 0.0;
        // with L_b = 0 the effective gamma depends on t; fix t = 1
        const double t = 1.0;
        const double cb = mc.cstar_big(t);
        REQUIRE(cb == 2.0);  // the max picks its first argument here
        const double N = 2.0;
        REQUIRE(N >= tail_threshold_bounded_sigma(mc, t));
        // exp(-e^{2N}/(e C_big^2)) = exp(-e^4/(4e)) = exp(-e^3/4)
        const double want = std::exp(-std::exp(3.0) / 4.0);
        CHECK(rel_err(tail_bound_bounded_sigma(mc, N, t), want) < 1e-12);
        CHECK(want == doctest::Approx(std::exp(-5.021384)).epsilon(1e-6));
    }
    SUBCASE("N+1 versus N multiplies |log| by e^2") {
        auto mc = make_mc(2.0, 0.5, 0.0, 1.0, 0.0, kCstar_2_05);
        mc.sigma_sup = 1.0;
        const double t = 0.5;
        const double N = tail_threshold_bounded_sigma(mc, t) + 0.5;
        const double l1 = log_tail_bound_bounded_sigma(mc, N, t);
        const double l2 = log_tail_bound_bounded_sigma(mc, N + 1.0, t);
        CHECK(rel_err(l2 / l1, std::exp(2.0)) < 1e-12);
    }
    SUBCASE("below threshold reported") {
        auto mc = make_mc(2.0, 0.5, 0.0, 1.0, 0.0, kCstar_2_05);
        mc.sigma_sup = 1.0;
        CHECK_THROWS_AS(tail_bound_bounded_sigma(mc, 0.1, 1.0), BoundNotAsserted);
    }
}

TEST_CASE("gamma choice structure") {
    auto mc = make_mc(2.0, 1.0, 0.0, 1.0, 0.0, 1.0);  // rho = 0.5
    // normalized case from the plug-in oracle: with C* Gamma(1-rho) = CG,
    // gamma = 16 CG^2 A0^4 c^2 L^4; A0 = max(4, 4 L_sigma, CG^{-2})
    mc.cstar = 1.0 / gamma_fn(0.5);  // makes CG = 1 and A0 = 4
    CHECK(rel_err(mc.a0(), 4.0) < 1e-12);
    CHECK(rel_err(gamma_choice(mc, 1.0), 16.0 * 256.0) < 1e-12);

    SUBCASE("increasing in L_Nsigma") {
        auto mc2 = mc;
        mc2.L_Nsigma = 2.0;
        CHECK(gamma_choice(mc2, 1.0) > gamma_choice(mc, 1.0));
    }
    SUBCASE("c doubling is a power law") {
        const double g1 = gamma_choice(mc, 1.0);
        const double g2 = gamma_choice(mc, 2.0);
        CHECK(rel_err(g2 / g1, std::pow(2.0, 1.0 / (1.0 - 0.5))) < 1e-12);
    }
}

TEST_CASE("convergence threshold shape") {
    auto mc = make_mc(2.0, 0.5, 1.0, 1.0, 0.0, kCstar_2_05);
    const auto t1 = convergence_threshold(mc, 2.0, 1.0);
    const auto t2 = convergence_threshold(mc, 2.0, 2.0);
    CHECK(rel_err(t2.N_T, 2.0 * t1.N_T) < 1e-12);  // linear in T

    // c_T max structure: drift-dominant case
    auto mcd = make_mc(2.0, 0.5, 50.0, 0.1, 0.0, kCstar_2_05);
    const double e = 1.0 / 0.75;
    const double want = 8.0 * std::pow(mcd.chash(), 2.0 * e) * 1.0 * 50.0;
    CHECK(rel_err(convergence_threshold(mcd, 2.0, 1.0).c_T, want) < 1e-12);
}

TEST_CASE("prop-4 contraction stays below three quarters across a sweep") {
    int done = 0;
    std::uint64_t draw = 0;
    while (done < 100) {
        const double alpha = 0.6 + 1.4 * uniform_at(11, draw, 0);
        const double beta = 0.05 + 0.93 * uniform_at(11, draw, 1);
        ++draw;
        ModelParams params{alpha, beta};
        if (!(beta / alpha < 1.0)) continue;
        if (!(1.0 < std::min(2.0, 1.0 / beta) * alpha)) continue;
        const double L_sigma = std::exp(-2.0 + 4.0 * uniform_at(11, draw, 2));
        const double L_b = std::exp(-2.0 + 4.0 * uniform_at(11, draw, 3));
        const double r = params.ratio();
        const double k_min = std::max(2.0, std::pow(L_b, 1.0 - r) / (L_sigma * L_sigma));
        const double k = k_min * (1.0 + 3.0 * uniform_at(11, draw, 4));
        const double cst = cstar_detailed(alpha, beta, 1, 1e-8).value;
        const double value = prop4_contraction_value(params, cst, L_b, L_sigma, k);
        CAPTURE(alpha);
        CAPTURE(beta);
        CAPTURE(L_b);
        CAPTURE(L_sigma);
        CAPTURE(k);
        CHECK(value <= 0.75 + 1e-12);
        ++done;
    }
}

TEST_CASE("lemma 2.5 transfer checks") {
    const std::vector<double> times = {0.1, 0.2, 0.4, 0.6, 0.8, 1.0};

    SUBCASE("f = e^{at} with g = e^{aT}: equality on both sides") {
        const double a = 1.0;
        std::vector<double> f;
        for (double t : times) f.push_back(std::exp(a * t));
        const auto v = lemma25_transfer(times, f, [&](double T) { return std::exp(a * T); }, a, 1.0);
        CHECK(v.hypothesis_ok());
        CHECK(v.conclusion_ok());
    }
    SUBCASE("constant f = g: conclusion holds, weighted sup binds only at the first time") {
        std::vector<double> f(times.size(), 3.0);
        const auto v = lemma25_transfer(times, f, [](double) { return 3.0; }, 1.0, 1.0);
        CHECK(v.conclusion_ok());
        // sup_{t<=T} e^{-at} f is attained at the earliest sample, so the
        // strict-inequality hypothesis fails for every later T
        CHECK(v.hypothesis_violations.size() == times.size() - 1);
    }
    SUBCASE("f(t) = t against g = T/2 fails both sides") {
        std::vector<double> f(times.begin(), times.end());
        const auto v = lemma25_transfer(times, f, [](double T) { return T / 2.0; }, 1.0, 1.0);
        CHECK_FALSE(v.hypothesis_ok());
        CHECK_FALSE(v.conclusion_ok());
    }
}

TEST_CASE("K0 default and override") {
    auto mc = make_mc(2.0, 0.5, 1.0, 1.0, 0.0, kCstar_2_05);
    mc.sigma_sup = 1.0;
    CHECK(mc.k0(1.0) > 0.0);
    mc.K0_override = 3.5;
    CHECK(mc.k0(1.0) == 3.5);
}
