#pragma once

#include <cstddef>
#include <vector>

namespace fspde {

// Evaluation policy for the one-parameter Mittag-Leffler function.
//
// Three regimes are used on the negative axis: the power series while it is
// numerically benign, the algebraic asymptotic expansion for |z| beyond
// regime_switch_z, and a positive-integrand Laplace-type integral
// representation in between (the series loses all significance to
// cancellation well before the asymptotic expansion becomes accurate, so the
// gap needs its own method). Every branch checks its own achieved accuracy
// and escalates to the integral form if it misses series_tol.
struct MLEvalConfig {
    double series_tol = 1e-10;   // relative; must lie in (0, 1e-6]
    int series_max_terms = 400;  // >= 50
    double regime_switch_z = 15.0;

    void validate() const;
};

// Euler gamma for x > 0 (Lanczos, g = 7). Relative error below 1e-12;
// overflows to +inf past x ~ 171.62. Throws std::domain_error for x <= 0.
double gamma_fn(double x);

// log Gamma(x), x > 0.
double log_gamma(double x);

// 1 / Gamma(x) for any real x (reflection below 0.5); zero at the poles.
double reciprocal_gamma(double x);

// E_beta(z) = sum_{l>=0} z^l / Gamma(1 + beta l), beta in (0, 1].
double mittag_leffler(double beta, double z);
double mittag_leffler(double beta, double z, const MLEvalConfig& cfg);

// Reusable evaluator holding per-beta term caches. One instance per thread;
// distinct instances are independent.
class MlEvaluator {
  public:
    explicit MlEvaluator(double beta, MLEvalConfig cfg = {});

    double operator()(double z) const;
    double beta() const { return beta_; }

  private:
    enum class Outcome { ok, cancellation, overflow, not_converged };

    double series(double z, Outcome& outcome) const;
    double asymptotic(double s, Outcome& outcome) const;  // argument -s
    double integral_rep(double s) const;                  // argument -s

    double beta_;
    MLEvalConfig cfg_;
    mutable std::vector<double> term_ratio_;  // Gamma(1+beta l)/Gamma(1+beta(l+1))
    void grow_ratio_cache(std::size_t upto) const;
};

struct CstarResult {
    double value = 0.0;
    double abs_error = 0.0;
};

// Kernel L2 constant (d = 1):
//   C* = (2 pi^{1/2} / (alpha Gamma(1/2))) (2 pi)^{-1} int_0^inf z^{1/alpha - 1} E_beta^2(-z) dz
//      = (1/pi) int_0^inf E_beta^2(-w^alpha) dw        after z = w^alpha,
// the substitution removing the endpoint singularity exactly. The far tail is
// summed analytically from the three-term asymptotic expansion of E_beta.
// Requires beta/alpha < 1 and alpha > 1/2 (the integral diverges otherwise).
double cstar(double alpha, double beta, int d = 1);
CstarResult cstar_detailed(double alpha, double beta, int d = 1, double tol = 1e-10);

}  // namespace fspde
