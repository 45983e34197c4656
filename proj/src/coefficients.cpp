#include "fspde/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fspde/errors.hpp"
#include "fspde/kernel.hpp"
#include "fspde/stats.hpp"

namespace fspde {

CoefficientSpec CoefficientSpec::linear(double lambda) {
    return {CoefficientFamily::linear, lambda, 0.0};
}

CoefficientSpec CoefficientSpec::affine(double lambda, double mu) {
    return {CoefficientFamily::affine, lambda, mu};
}

CoefficientSpec CoefficientSpec::bounded_sine(double amplitude, double omega) {
    return {CoefficientFamily::bounded_sine, amplitude, omega};
}

CoefficientSpec CoefficientSpec::loglip(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("loglip: exponent p must exceed 1");
    return {CoefficientFamily::loglip, p, 0.0};
}

double CoefficientSpec::eval(double /*t*/, double x) const {
    switch (family) {
        case CoefficientFamily::linear:
            return p1 * x;
        case CoefficientFamily::affine:
            return p1 * x + p2;
        case CoefficientFamily::bounded_sine:
            return p1 * std::sin(p2 * x);
        case CoefficientFamily::loglip:
            return x * std::sin(std::pow(std::log1p(x * x), p1));
    }
    return 0.0;
}

double CoefficientSpec::derivative(double x) const {
    switch (family) {
        case CoefficientFamily::linear:
            return p1;
        case CoefficientFamily::affine:
            return p1;
        case CoefficientFamily::bounded_sine:
            return p1 * p2 * std::cos(p2 * x);
        case CoefficientFamily::loglip: {
            const double g = std::log1p(x * x);
            if (g == 0.0) return 0.0;
            const double gp = std::pow(g, p1);
            const double dgp = p1 * std::pow(g, p1 - 1.0) * 2.0 * x / (1.0 + x * x);
            return std::sin(gp) + x * std::cos(gp) * dgp;
        }
    }
    return 0.0;
}

bool CoefficientSpec::is_bounded() const {
    switch (family) {
        case CoefficientFamily::linear:
            return p1 == 0.0;
        case CoefficientFamily::affine:
            return p1 == 0.0;
        case CoefficientFamily::bounded_sine:
            return true;
        case CoefficientFamily::loglip:
            return false;
    }
    return false;
}

std::optional<double> CoefficientSpec::sup_norm() const {
    if (!is_bounded()) return std::nullopt;
    switch (family) {
        case CoefficientFamily::linear:
            return 0.0;
        case CoefficientFamily::affine:
            return std::abs(p2);
        case CoefficientFamily::bounded_sine:
            return std::abs(p1);
        default:
            return std::nullopt;
    }
}

std::string CoefficientSpec::family_name() const {
    switch (family) {
        case CoefficientFamily::linear: return "linear";
        case CoefficientFamily::affine: return "affine";
        case CoefficientFamily::bounded_sine: return "bounded_sine";
        case CoefficientFamily::loglip: return "loglip";
    }
    return "?";
}

double TruncatedCoefficient::eval(double t, double x) const {
    return base.eval(t, std::clamp(x, -cutoff, cutoff));
}

TruncatedCoefficient truncate(const CoefficientSpec& spec, double N) {
    if (!(N > 0.0)) throw std::invalid_argument("truncate: level N must be positive");
    if (N > 700.0) {
        throw std::invalid_argument("truncate: e^N overflows doubles for N > 700; truncation is vacuous");
    }
    return {spec, N, std::exp(N)};
}

double lip_n(const CoefficientSpec& spec, double n, std::size_t resolution) {
    if (!(n > 0.0)) throw std::invalid_argument("lip_n: n must be positive");
    if (resolution < 1000) throw std::invalid_argument("lip_n: resolution must be >= 1000");

    // Composite grid on [0, n]: linear for local structure, log-spaced so the
    // derivative envelope is sampled at every scale when n is huge. Odd/even
    // symmetry of every built-in family makes the positive half sufficient.
    std::vector<double> grid;
    grid.reserve(2 * resolution + 4);
    const std::size_t n_lin = resolution / 2;
    for (std::size_t i = 0; i <= n_lin; ++i) {
        grid.push_back(n * static_cast<double>(i) / static_cast<double>(n_lin));
    }
    if (n > 1.0) {
        const std::size_t n_log = resolution / 2;
        const double lo = std::log(std::min(1.0, n));
        const double hi = std::log(n);
        for (std::size_t i = 0; i <= n_log; ++i) {
            grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_log)));
        }
    }
    std::sort(grid.begin(), grid.end());

    double sup = 0.0;
    for (double x : grid) sup = std::max(sup, std::abs(spec.derivative(x)));
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double dx = grid[i + 1] - grid[i];
        // Spacings at roundoff scale turn the quotient into ulp noise; the
        // derivative scan already covers those points.
        if (dx <= 1e-6 * std::max(1.0, std::abs(grid[i]))) continue;
        const double slope = std::abs(spec.eval(grid[i + 1]) - spec.eval(grid[i])) / dx;
        sup = std::max(sup, slope);
    }
    return sup;
}

double linear_growth_const(const CoefficientSpec& spec, double scan_limit) {
    if (scan_limit < 1e3) throw std::invalid_argument("linear_growth_const: scan_limit must be >= 1e3");

    double sup = std::abs(spec.eval(0.0));
    double outer_sup = 0.0;   // sup over the outermost decade
    double inner_sup = 0.0;   // sup over everything before it
    const double decades = std::log10(scan_limit);
    const int per_decade = 600;
    const int total = static_cast<int>(decades * per_decade);
    for (int i = 0; i <= total; ++i) {
        const double x = std::pow(10.0, -3.0 + (decades + 3.0) * i / total);
        if (x > scan_limit) break;
        const double v = std::max(std::abs(spec.eval(x)), std::abs(spec.eval(-x))) / (1.0 + x);
        sup = std::max(sup, v);
        if (x > scan_limit / 10.0) {
            outer_sup = std::max(outer_sup, v);
        } else {
            inner_sup = std::max(inner_sup, v);
        }
    }

    // Analytic limits where the family provides one.
    switch (spec.family) {
        case CoefficientFamily::linear:
            sup = std::max(sup, std::abs(spec.p1));
            break;
        case CoefficientFamily::affine:
            sup = std::max({sup, std::abs(spec.p1), std::abs(spec.p2)});
            break;
        case CoefficientFamily::bounded_sine:
            break;  // grid value is the constant
        case CoefficientFamily::loglip:
            sup = std::max(sup, 1.0);  // |x sin(.)|/(1+|x|) -> 1 along sin = +-1
            break;
    }

    if (outer_sup > inner_sup * 1.01 && outer_sup > sup * 0.99) {
        throw ConvergenceError("linear_growth_const: sup still growing at scan_limit; "
                               "coefficient does not have linear growth");
    }
    return sup;
}

AdmissibilityReport check_assumption3(const CoefficientSpec& b, const CoefficientSpec& sigma,
                                      const ModelParams& params, std::span<const double> N_list) {
    if (N_list.size() < 4) throw std::invalid_argument("check_assumption3: need at least 4 levels");
    for (std::size_t i = 0; i + 1 < N_list.size(); ++i) {
        if (!(N_list[i] < N_list[i + 1])) {
            throw std::invalid_argument("check_assumption3: N_list must be increasing");
        }
    }

    const double r = params.ratio();
    AdmissibilityReport rep;
    rep.sigma_bounded_case = sigma.is_bounded();
    rep.threshold_exponent = (1.0 - r) * (2.0 - r) / 2.0;

    for (double N : N_list) {
        const double n = std::exp(std::min(N, 700.0));
        const double ls = lip_n(sigma, n);
        const double lb = lip_n(b, n);
        rep.levels.push_back(N);
        rep.lip_sigma.push_back(ls);
        rep.lip_b.push_back(lb);
        const double allowed = rep.sigma_bounded_case ? std::exp(N * (1.0 - r))
                                                      : std::pow(N, rep.threshold_exponent);
        rep.ratio_sigma.push_back(ls / allowed);
        rep.ratio_b.push_back(ls > 0.0 ? lb / std::pow(ls, 2.0 / (1.0 - r))
                                       : std::numeric_limits<double>::infinity());
    }

    // Fitted growth exponent of L_{N,sigma} in log N over the top half.
    std::vector<double> lx, ly;
    for (std::size_t i = N_list.size() / 2; i < N_list.size(); ++i) {
        if (rep.lip_sigma[i] > 0.0) {
            lx.push_back(std::log(rep.levels[i]));
            ly.push_back(std::log(rep.lip_sigma[i]));
        }
    }
    rep.sigma_growth_exponent = lx.size() >= 2 ? fit_line(lx, ly).slope : 0.0;

    // Verdict: first ratio decreasing over the top half, second ratio bounded
    // (non-increasing within 5 percent slack).
    bool first_decreasing = true;
    bool second_bounded = true;
    for (std::size_t i = N_list.size() / 2; i + 1 < N_list.size(); ++i) {
        if (!(rep.ratio_sigma[i + 1] < rep.ratio_sigma[i] * (1.0 + 1e-9))) first_decreasing = false;
        if (!(rep.ratio_b[i + 1] <= rep.ratio_b[i] * 1.05)) second_bounded = false;
    }
    rep.admissible = first_decreasing && second_bounded;
    return rep;
}

}  // namespace fspde
