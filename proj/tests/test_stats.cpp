#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fspde/philox.hpp"
#include "fspde/stats.hpp"

using namespace fspde;

TEST_CASE("mean and variance") {
    const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
    CHECK(mean(xs) == doctest::Approx(2.5));
    CHECK(variance(xs) == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("bootstrap mean interval covers a normal mean") {
    std::vector<double> xs(400);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 3.0 + normal_at(77, i, 0);
    const Interval ci = bootstrap_mean_ci(xs, 0.99, 1000, 123);
    CHECK(ci.lo < 3.0);
    CHECK(ci.hi > 3.0);
    CHECK(ci.hi - ci.lo < 1.0);
    // deterministic given the seed
    const Interval again = bootstrap_mean_ci(xs, 0.99, 1000, 123);
    CHECK(ci.lo == again.lo);
    CHECK(ci.hi == again.hi);
}

TEST_CASE("incomplete beta endpoints and symmetry") {
    CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    // I_x(1,1) = x
    CHECK(incomplete_beta(1.0, 1.0, 0.37) == doctest::Approx(0.37).epsilon(1e-12));
    // I_x(a,b) = 1 - I_{1-x}(b,a)
    const double v = incomplete_beta(2.5, 4.0, 0.3);
    CHECK(v == doctest::Approx(1.0 - incomplete_beta(4.0, 2.5, 0.7)).epsilon(1e-12));
    // inverse round trip
    const double x = incomplete_beta_inv(2.5, 4.0, v);
    CHECK(x == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("clopper-pearson golden intervals") {
    {
        // scipy beta.ppf references
        const Interval ci = clopper_pearson(7, 100, 0.99);
        CHECK(ci.lo == doctest::Approx(0.020789930329624312).epsilon(1e-8));
        CHECK(ci.hi == doctest::Approx(0.1628028555844228).epsilon(1e-8));
    }
    {
        const Interval ci = clopper_pearson(0, 50, 0.99);
        CHECK(ci.lo == 0.0);
        CHECK(ci.hi == doctest::Approx(0.10054508337476259).epsilon(1e-8));
        // closed form 1 - (alpha/2)^{1/n}
        CHECK(ci.hi == doctest::Approx(1.0 - std::pow(0.005, 1.0 / 50.0)).epsilon(1e-10));
    }
    {
        const Interval ci = clopper_pearson(499, 500, 0.99);
        CHECK(ci.lo == doctest::Approx(0.9852349286103113).epsilon(1e-8));
        CHECK(ci.hi == doctest::Approx(0.9999899749666039).epsilon(1e-8));
    }
    {
        const Interval ci = clopper_pearson(3, 10000, 0.99);
        CHECK(ci.lo == doctest::Approx(3.37891471006379e-05).epsilon(1e-6));
        CHECK(ci.hi == doctest::Approx(0.0010973099729615116).epsilon(1e-6));
    }
}

TEST_CASE("zero-success upper end is the 0.99 rule-of-three scale") {
    const Interval ci = clopper_pearson(0, 10000, 0.99);
    CHECK(ci.hi == doctest::Approx(-std::log(0.005) / 10000.0).epsilon(2e-2));
}

TEST_CASE("line fit recovers slope") {
    std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> y;
    for (double xi : x) y.push_back(2.5 * xi - 1.0);
    const LineFit fit = fit_line(x, y);
    CHECK(fit.slope == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(-1.0).epsilon(1e-10));
}
