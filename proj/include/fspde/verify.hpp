#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fspde/bounds.hpp"
#include "fspde/solver.hpp"

namespace fspde {

// Grid-snapped probe location. time_index counts field rows, so it lies in
// 1..nt (time 0 is the initial condition and is never probed).
struct ProbePoint {
    std::size_t time_index = 1;
    std::size_t space_index = 0;

    double time(const GridSpec& g) const { return g.dt() * static_cast<double>(time_index); }
    double x(const GridSpec& g) const { return -g.half_width + g.dx() * static_cast<double>(space_index); }
};

enum class Verdict { pass, fail, inconclusive };
enum class Quantity { moment, tail, convergence };

std::string to_string(Verdict v);
std::string to_string(Quantity q);

struct MomentEstimate {
    double estimate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    bool degenerate = false;  // all samples identical: zero-width interval
};

// mean |u|^k with a percentile-bootstrap 0.99 interval (1000 resamples).
MomentEstimate estimate_moments(std::span<const double> samples, double k,
                                std::uint64_t bootstrap_seed, int resamples = 1000);
MomentEstimate estimate_moments(std::span<const FieldPath> ensemble, double k, ProbePoint probe,
                                std::uint64_t bootstrap_seed);

struct TailEstimate {
    double p_hat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t exceedances = 0;
    std::uint64_t replicas = 0;
};

// Empirical P(|u_{N+1}(t,x)| >= e^N) with a Clopper-Pearson 0.99 interval.
// `samples` must come from paths evolved at truncation level N + 1.
TailEstimate estimate_tail(std::span<const double> samples_at_level_Np1, double N);

// One-sided envelope comparison: the envelopes are upper bounds, so pass
// needs the CI upper end below the envelope and fail needs the CI lower end
// above it. Comparisons run in log space so astronomically large envelopes
// still classify correctly.
Verdict classify_against_envelope(double ci_lo, double ci_hi, double log_envelope);

struct BoundReport {
    Quantity quantity = Quantity::moment;
    double t = 0.0;
    double x = 0.0;
    double k_or_N = 0.0;
    double estimate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double envelope = 0.0;  // may overflow to +inf; log_envelope stays finite
    double log_envelope = 0.0;
    Verdict verdict = Verdict::inconclusive;
    bool asserted = true;  // false when the probe lies outside the bound's validity
};

// Moment envelope check at one probe; the envelope half is chosen by whether
// sigma is a bounded family.
BoundReport check_moment_bounds(std::span<const double> samples, const ModelConstants& mc,
                                double k, double t, double x, std::uint64_t bootstrap_seed);

// Tail envelope check at one probe (samples at level N + 1, event |u| >= e^N).
BoundReport check_tail_bound(std::span<const double> samples_at_level_Np1,
                             const ModelConstants& mc, double N, double t, double x);

// Ensemble description for the study runners. Replica r uses the derived
// seed replica_seed(base_seed, r); paths are independent of the thread
// count and of each other.
struct StudySetup {
    ModelParams params;
    GridSpec grid;
    CoefficientSpec b;
    CoefficientSpec sigma;
    std::vector<double> u0;
    std::uint64_t base_seed = 1;
    std::size_t replicas = 100;
    int threads = 1;
};

// samples[probe][replica] of u(t,x); `level` empty = untruncated evolution.
std::vector<std::vector<double>> run_probe_samples(const StudySetup& setup,
                                                   const KernelTable& kernel,
                                                   std::optional<double> level,
                                                   std::span<const ProbePoint> probes);

// Full paths (small ensembles only).
std::vector<FieldPath> run_paths(const StudySetup& setup, const KernelTable& kernel,
                                 std::optional<double> level);

// Coupled-noise truncation-convergence study:
//   d_N = sup over probes of (mean_r |u_{N+1} - u_N|^k)^{1/k},
// with u_{N+1}, u_N driven by the same noise realization per replica.
// Fits log d_N against N^{2-beta/alpha} over the nonvanishing levels. On a
// bounded grid d_N hits exactly zero once e^N exceeds the ensemble sup; the
// first such level is reported.
struct ConvergenceStudy {
    std::vector<double> levels;
    std::vector<double> d_N;
    std::vector<double> partial_sums;
    double fitted_slope = 0.0;  // expected negative
    std::optional<std::size_t> first_zero_index;
    bool nonincreasing_before_zero = true;
};
ConvergenceStudy convergence_study(const StudySetup& setup, const KernelTable& kernel,
                                   std::span<const double> N_list, double k,
                                   std::span<const ProbePoint> probes);

// Two mathematically identical runs that differ only in floating-point
// bookkeeping: truncation levels N_a vs N_b (both vacuous) and opposite
// history-summation orders. The sup difference is pure reassociation noise.
struct UniquenessReport {
    double sup_abs_diff = 0.0;
    std::size_t argmax_time = 0;
    std::size_t argmax_space = 0;
};
UniquenessReport uniqueness_probe(const StudySetup& setup, const KernelTable& kernel,
                                  std::uint64_t seed, double N_a, double N_b,
                                  HistoryOrder order_a = HistoryOrder::forward,
                                  HistoryOrder order_b = HistoryOrder::reverse);

// Exact discrete variance of the additive-noise field (b = 0, sigma = 1):
//   Var u(t_m, x) = dt * sum_{D=1}^{m} ||G_{t_D}||^2_dx,
// independent of x by periodicity.
double additive_noise_variance(const KernelTable& kernel, const GridSpec& grid, std::size_t m);

// Continuum limit C* t^{1-r}/(1-r) of the same quantity.
double additive_noise_variance_continuum(double cstar_value, double ratio, double t);

}  // namespace fspde
