#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace fspde {

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // unbiased

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Percentile bootstrap confidence interval for the mean of `xs` at the given
// confidence level. Resampling is driven by the counter-based generator, so
// the interval is a pure function of (xs, seed).
Interval bootstrap_mean_ci(std::span<const double> xs, double confidence, int resamples,
                           std::uint64_t seed);

// Same for the (unbiased) sample variance.
Interval bootstrap_variance_ci(std::span<const double> xs, double confidence, int resamples,
                               std::uint64_t seed);

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Inverse of I_x(a, b) in x.
double incomplete_beta_inv(double a, double b, double p);

// Clopper-Pearson two-sided interval for a binomial proportion.
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence);

// Least-squares slope/intercept of y against x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace fspde
