#include "fspde/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fspde/philox.hpp"
#include "fspde/specfun.hpp"

namespace fspde {

double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance: need at least 2 samples");
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

namespace {

template <typename Stat>
Interval bootstrap_ci(std::span<const double> xs, double confidence, int resamples,
                      std::uint64_t seed, Stat stat) {
    if (xs.empty()) throw std::invalid_argument("bootstrap: empty sample");
    if (resamples < 10) throw std::invalid_argument("bootstrap: too few resamples");
    const std::size_t n = xs.size();
    std::vector<double> stats(resamples);
    std::vector<double> draw(n);
    for (int r = 0; r < resamples; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            const double u = uniform_at(seed, static_cast<std::uint64_t>(r), i);
            auto idx = static_cast<std::size_t>(u * static_cast<double>(n));
            if (idx >= n) idx = n - 1;
            draw[i] = xs[idx];
        }
        stats[r] = stat(std::span<const double>(draw));
    }
    std::sort(stats.begin(), stats.end());
    const double a = 0.5 * (1.0 - confidence);
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(resamples - 1);
        const auto i0 = static_cast<std::size_t>(pos);
        const std::size_t i1 = std::min<std::size_t>(i0 + 1, resamples - 1);
        const double frac = pos - static_cast<double>(i0);
        return stats[i0] * (1.0 - frac) + stats[i1] * frac;
    };
    return {quantile(a), quantile(1.0 - a)};
}

}  // namespace

Interval bootstrap_mean_ci(std::span<const double> xs, double confidence, int resamples,
                           std::uint64_t seed) {
    return bootstrap_ci(xs, confidence, resamples, seed,
                        [](std::span<const double> d) { return mean(d); });
}

Interval bootstrap_variance_ci(std::span<const double> xs, double confidence, int resamples,
                               std::uint64_t seed) {
    return bootstrap_ci(xs, confidence, resamples, seed,
                        [](std::span<const double> d) { return variance(d); });
}

namespace {

// Continued fraction for the incomplete beta function (Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-15;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x)
                            + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double incomplete_beta_inv(double a, double b, double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (incomplete_beta(a, b, mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence) {
    if (trials == 0) throw std::invalid_argument("clopper_pearson: zero trials");
    if (successes > trials) throw std::invalid_argument("clopper_pearson: successes > trials");
    const double alpha = 1.0 - confidence;
    const auto s = static_cast<double>(successes);
    const auto n = static_cast<double>(trials);
    Interval ci;
    ci.lo = successes == 0 ? 0.0 : incomplete_beta_inv(s, n - s + 1.0, alpha / 2.0);
    ci.hi = successes == trials ? 1.0 : incomplete_beta_inv(s + 1.0, n - s, 1.0 - alpha / 2.0);
    return ci;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: bad input");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

}  // namespace fspde
