#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fspde/coefficients.hpp"
#include "fspde/kernel.hpp"

namespace fspde {

// Inputs and derived constants for the moment/tail envelopes.
//
// Notation: r = beta/alpha, C* the kernel L2 constant,
//   C0     = 4 (||u0||_inf + 1)
//   C_#    = 4 sqrt(C* Gamma(1 - r))
//   A0     = max(4, C_# L_sigma / sqrt(C* Gamma(1-r)), (C* Gamma(1-r))^{-2})
//   C(a,g) = (a/g)^a e^{-a} with a = (1-r)/2   (from t^a e^{-gt} <= C(a,g))
//   Cbig   = max(2, 4 C(a,gamma) sqrt(C*) / sqrt(1-r))
// The bounded-sigma constants use gamma = 2 L_b; when L_b = 0 that choice
// degenerates and gamma = (1-r)/(2t) -- the optimizer of the t^a e^{-gt}
// step -- is used instead, which restores the exact t^{(1-r)/2} factor.
struct ModelConstants {
    ModelParams params;
    double L_b = 0.0;
    double L_sigma = 0.0;
    double L_Nb = 0.0;      // Lip of b on [-e^N, e^N] at the reference level
    double L_Nsigma = 0.0;  // same for sigma
    double u0_sup = 0.0;
    std::optional<double> sigma_sup;
    double cstar = 0.0;
    double c = 4.0;  // proof order parameter (config knob)
    std::optional<double> K0_override;

    double rho() const { return params.ratio(); }
    double c0() const { return 4.0 * (u0_sup + 1.0); }
    double chash() const;
    double a0() const;
    double gamma_part2(double t) const;
    double c_abg(double gamma) const;
    double cstar_big(double t) const;
    double k0(double T) const;  // bounded-sigma difference-estimate prefactor

    void validate() const;
};

// sup_N sup_x E|u_N(t,x)|^k <= C0^k exp(4 (C_# L_sigma)^{2/(1-r)} k^{1+1/(1-r)} t),
// valid for k >= max(2, L_b^{1-r} L_sigma^{-2}), L_sigma > 0.
double moment_bound_linear(const ModelConstants& mc, double k, double t);
double log_moment_bound_linear(const ModelConstants& mc, double k, double t);

// Bounded sigma: C⋆^k e^{2 k L_b t} (u0_sup + sigma_sup + 1)^k k^{k/2}, k >= 2.
double moment_bound_bounded_sigma(const ModelConstants& mc, double k, double t);
double log_moment_bound_bounded_sigma(const ModelConstants& mc, double k, double t);

// P(|u_{N+1}(t,x)| >= e^N) <= exp(-N^{2-r} / ((C_# L_sigma)^2 (8t)^{1-r})),
// asserted for N >= tail_threshold_linear(t).
double tail_bound_linear(const ModelConstants& mc, double N, double t);
double log_tail_bound_linear(const ModelConstants& mc, double N, double t);
double tail_threshold_linear(const ModelConstants& mc, double t);

// Bounded sigma: exp(-e^{2N - 4 L_b t} / (e C⋆^2 (u0_sup + sigma_sup + 1)^2)),
// asserted for N >= tail_threshold_bounded_sigma(t). The exponent keeps its
// t dependence (the drift-free display drops it, the derivation does not).
double tail_bound_bounded_sigma(const ModelConstants& mc, double N, double t);
double log_tail_bound_bounded_sigma(const ModelConstants& mc, double N, double t);
double tail_threshold_bounded_sigma(const ModelConstants& mc, double t);

// Contraction weight gamma(N, T) of the convergence construction:
//   16 (C* Gamma(1-r))^{1/(1-r)} A0^{2/(1-r)} c^{1/(1-r)} L_{N,sigma}^{2/(1-r)}.
double gamma_choice(const ModelConstants& mc, double c);

struct ConvergenceThreshold {
    double N_T = 0.0;  // level above which the weighted difference decays in N
    double c_T = 0.0;  // tail-estimate validity threshold over the horizon
};
ConvergenceThreshold convergence_threshold(const ModelConstants& mc, double c, double T);

// Value of L_b/gamma + 4 sqrt(C* Gamma(1-r) k) L_sigma / (2 gamma)^{(1-r)/2}
// at gamma = (16 sqrt(C* Gamma(1-r) k) L_sigma)^{2/(1-r)}; stays <= 3/4 for
// every admissible parameter point.
double prop4_contraction_value(const ModelParams& params, double cstar_value, double L_b,
                               double L_sigma, double k);

// Grid check of the exponential-weight transfer lemma: if
// sup_{t<=T} e^{-at} f(t) <= e^{-aT} g(T) for all T, then
// sup_{t<=T} f(t) <= g(T). Reports grid points violating either side.
struct Lemma25Verdict {
    std::vector<std::size_t> hypothesis_violations;
    std::vector<std::size_t> conclusion_violations;
    bool hypothesis_ok() const { return hypothesis_violations.empty(); }
    bool conclusion_ok() const { return conclusion_violations.empty(); }
};
Lemma25Verdict lemma25_transfer(std::span<const double> times, std::span<const double> f_values,
                                const std::function<double(double)>& g, double a, double T0);

// Convenience builder: numerical growth/Lipschitz constants from the
// coefficient specs, C* from quadrature.
ModelConstants make_model_constants(const ModelParams& params, const CoefficientSpec& b,
                                    const CoefficientSpec& sigma, double u0_sup,
                                    double reference_N, double c = 4.0);

}  // namespace fspde
