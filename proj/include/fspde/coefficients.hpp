#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fspde {

struct ModelParams;  // kernel.hpp

enum class CoefficientFamily { linear, affine, bounded_sine, loglip };

// Drift/diffusion coefficient psi(t, x). All built-in families are time
// independent and evaluated as psi(x); they are locally Lipschitz with
// at-most linear growth by construction. The loglip family
//   psi(x) = x sin((log(1+x^2))^p),   p > 1,
// is the canonical locally-but-not-globally Lipschitz member: its local
// Lipschitz constant on [-e^N, e^N] grows like 2p (2N)^{p-1}.
struct CoefficientSpec {
    CoefficientFamily family = CoefficientFamily::linear;
    double p1 = 0.0;
    double p2 = 0.0;

    static CoefficientSpec linear(double lambda);
    static CoefficientSpec affine(double lambda, double mu);
    static CoefficientSpec bounded_sine(double amplitude, double omega);
    static CoefficientSpec loglip(double p);

    double eval(double t, double x) const;
    double eval(double x) const { return eval(0.0, x); }
    double derivative(double x) const;

    bool is_bounded() const;
    std::optional<double> sup_norm() const;
    std::string family_name() const;
};

// psi clamped outside [-e^N, e^N]; the boundary takes psi(+-e^N), the
// continuous extension of the indicator split.
struct TruncatedCoefficient {
    CoefficientSpec base;
    double level = 0.0;   // N
    double cutoff = 0.0;  // e^N

    double eval(double t, double x) const;
    double eval(double x) const { return eval(0.0, x); }
};

TruncatedCoefficient truncate(const CoefficientSpec& spec, double N);

// Numerical Lip_n(psi) = sup_{|x|,|y| <= n} |psi(x)-psi(y)|/|x-y| from
// adjacent-sample slopes plus the analytic derivative on a composite
// (linear + log-spaced) grid.
double lip_n(const CoefficientSpec& spec, double n, std::size_t resolution = 4096);

// Numerical L_psi = sup_x |psi(x)|/(1+|x|) over a log-spaced scan, combined
// with the family's analytic limit. Throws ConvergenceError if the running
// sup keeps growing through the outermost decades.
double linear_growth_const(const CoefficientSpec& spec, double scan_limit = 1e6);

struct AdmissibilityReport {
    std::vector<double> levels;        // N values
    std::vector<double> lip_sigma;     // L_{N,sigma}
    std::vector<double> lip_b;         // L_{N,b}
    std::vector<double> ratio_sigma;   // L_{N,sigma} / N^{(1-r)(2-r)/2}  (or /e^{N(1-r)})
    std::vector<double> ratio_b;       // L_{N,b} / L_{N,sigma}^{2/(1-r)}
    double sigma_growth_exponent = 0.0;   // fitted d log L_{N,sigma} / d log N
    double threshold_exponent = 0.0;      // (1-r)(2-r)/2
    bool sigma_bounded_case = false;
    bool admissible = false;
};

// Trend check of the truncated-coefficient Lipschitz growth conditions:
// admissible when L_{N,sigma} is little-o of the allowed rate (the first
// ratio decreases over the top half of the levels) and L_{N,b} stays
// dominated by L_{N,sigma}^{2/(1-beta/alpha)}.
AdmissibilityReport check_assumption3(const CoefficientSpec& b, const CoefficientSpec& sigma,
                                      const ModelParams& params, std::span<const double> N_list);

}  // namespace fspde
