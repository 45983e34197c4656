#include "fspde/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "fspde/errors.hpp"
#include "fspde/philox.hpp"
#include "fspde/stats.hpp"

namespace fspde {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

std::string to_string(Quantity q) {
    switch (q) {
        case Quantity::moment: return "moment";
        case Quantity::tail: return "tail";
        case Quantity::convergence: return "convergence";
    }
    return "?";
}

MomentEstimate estimate_moments(std::span<const double> samples, double k,
                                std::uint64_t bootstrap_seed, int resamples) {
    if (samples.empty()) throw std::invalid_argument("estimate_moments: empty ensemble");
    if (!(k >= 1.0)) throw std::invalid_argument("estimate_moments: k must be >= 1");
    std::vector<double> powered(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) powered[i] = std::pow(std::abs(samples[i]), k);

    MomentEstimate est;
    est.estimate = mean(powered);
    est.degenerate =
        std::all_of(powered.begin(), powered.end(), [&](double v) { return v == powered.front(); });
    if (est.degenerate) {
        est.ci_lo = est.ci_hi = est.estimate;
        return est;
    }
    const Interval ci = bootstrap_mean_ci(powered, 0.99, resamples, bootstrap_seed);
    est.ci_lo = ci.lo;
    est.ci_hi = ci.hi;
    return est;
}

MomentEstimate estimate_moments(std::span<const FieldPath> ensemble, double k, ProbePoint probe,
                                std::uint64_t bootstrap_seed) {
    if (ensemble.empty()) throw std::invalid_argument("estimate_moments: empty ensemble");
    std::vector<double> samples(ensemble.size());
    for (std::size_t r = 0; r < ensemble.size(); ++r) {
        samples[r] = ensemble[r].at(probe.time_index, probe.space_index);
    }
    return estimate_moments(samples, k, bootstrap_seed);
}

TailEstimate estimate_tail(std::span<const double> samples_at_level_Np1, double N) {
    if (samples_at_level_Np1.empty()) throw std::invalid_argument("estimate_tail: empty ensemble");
    const double threshold = std::exp(N);
    TailEstimate est;
    est.replicas = samples_at_level_Np1.size();
    for (double v : samples_at_level_Np1) {
        if (std::abs(v) >= threshold) ++est.exceedances;
    }
    est.p_hat = static_cast<double>(est.exceedances) / static_cast<double>(est.replicas);
    const Interval ci = clopper_pearson(est.exceedances, est.replicas, 0.99);
    est.ci_lo = ci.lo;
    est.ci_hi = ci.hi;
    return est;
}

Verdict classify_against_envelope(double ci_lo, double ci_hi, double log_envelope) {
    const double log_hi = ci_hi > 0.0 ? std::log(ci_hi) : -HUGE_VAL;
    const double log_lo = ci_lo > 0.0 ? std::log(ci_lo) : -HUGE_VAL;
    if (log_hi <= log_envelope) return Verdict::pass;
    if (log_lo > log_envelope) return Verdict::fail;
    return Verdict::inconclusive;
}

BoundReport check_moment_bounds(std::span<const double> samples, const ModelConstants& mc,
                                double k, double t, double x, std::uint64_t bootstrap_seed) {
    BoundReport rep;
    rep.quantity = Quantity::moment;
    rep.t = t;
    rep.x = x;
    rep.k_or_N = k;
    const MomentEstimate est = estimate_moments(samples, k, bootstrap_seed);
    rep.estimate = est.estimate;
    rep.ci_lo = est.ci_lo;
    rep.ci_hi = est.ci_hi;
    try {
        rep.log_envelope = mc.sigma_sup ? log_moment_bound_bounded_sigma(mc, k, t)
                                        : log_moment_bound_linear(mc, k, t);
        rep.envelope = std::exp(rep.log_envelope);
        rep.verdict = classify_against_envelope(rep.ci_lo, rep.ci_hi, rep.log_envelope);
    } catch (const BoundNotAsserted&) {
        rep.asserted = false;
        rep.envelope = rep.log_envelope = std::nan("");
        rep.verdict = Verdict::inconclusive;
    }
    return rep;
}

BoundReport check_tail_bound(std::span<const double> samples_at_level_Np1,
                             const ModelConstants& mc, double N, double t, double x) {
    BoundReport rep;
    rep.quantity = Quantity::tail;
    rep.t = t;
    rep.x = x;
    rep.k_or_N = N;
    const TailEstimate est = estimate_tail(samples_at_level_Np1, N);
    rep.estimate = est.p_hat;
    rep.ci_lo = est.ci_lo;
    rep.ci_hi = est.ci_hi;
    try {
        rep.log_envelope = mc.sigma_sup ? log_tail_bound_bounded_sigma(mc, N, t)
                                        : log_tail_bound_linear(mc, N, t);
        rep.envelope = std::exp(rep.log_envelope);
        rep.verdict = classify_against_envelope(rep.ci_lo, rep.ci_hi, rep.log_envelope);
    } catch (const BoundNotAsserted&) {
        rep.asserted = false;
        rep.envelope = rep.log_envelope = std::nan("");
        rep.verdict = Verdict::inconclusive;
    }
    return rep;
}

namespace {

// Run fn(r) for r in [0, n) on up to `threads` workers. Tasks must write to
// disjoint slots; results are then independent of the scheduling.
void parallel_replicas(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t r = 0; r < n; ++r) fn(r);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t r = next.fetch_add(1);
                if (r >= n) break;
                try {
                    fn(r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    break;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

void validate_probes(const GridSpec& grid, std::span<const ProbePoint> probes) {
    for (const auto& p : probes) {
        if (p.time_index == 0 || p.time_index > grid.nt || p.space_index >= grid.nx) {
            throw std::invalid_argument("probe outside the grid (probe times must be positive)");
        }
    }
}

}  // namespace

std::vector<std::vector<double>> run_probe_samples(const StudySetup& setup,
                                                   const KernelTable& kernel,
                                                   std::optional<double> level,
                                                   std::span<const ProbePoint> probes) {
    setup.grid.validate();
    validate_probes(setup.grid, probes);
    std::vector<std::vector<double>> samples(probes.size(),
                                             std::vector<double>(setup.replicas, 0.0));
    parallel_replicas(setup.replicas, setup.threads, [&](std::size_t r) {
        const NoisePath noise = sample_noise(setup.grid, replica_seed(setup.base_seed, r));
        const FieldPath path =
            level ? evolve_truncated(setup.u0, setup.b, setup.sigma, *level, setup.grid, noise, kernel)
                  : evolve(setup.u0, setup.b, setup.sigma, setup.grid, noise, kernel);
        for (std::size_t p = 0; p < probes.size(); ++p) {
            samples[p][r] = path.at(probes[p].time_index, probes[p].space_index);
        }
    });
    return samples;
}

std::vector<FieldPath> run_paths(const StudySetup& setup, const KernelTable& kernel,
                                 std::optional<double> level) {
    setup.grid.validate();
    std::vector<FieldPath> paths(setup.replicas);
    parallel_replicas(setup.replicas, setup.threads, [&](std::size_t r) {
        const NoisePath noise = sample_noise(setup.grid, replica_seed(setup.base_seed, r));
        paths[r] = level ? evolve_truncated(setup.u0, setup.b, setup.sigma, *level, setup.grid,
                                            noise, kernel)
                         : evolve(setup.u0, setup.b, setup.sigma, setup.grid, noise, kernel);
    });
    return paths;
}

ConvergenceStudy convergence_study(const StudySetup& setup, const KernelTable& kernel,
                                   std::span<const double> N_list, double k,
                                   std::span<const ProbePoint> probes) {
    if (N_list.size() < 2) throw std::invalid_argument("convergence_study: need at least 2 levels");
    for (std::size_t i = 0; i + 1 < N_list.size(); ++i) {
        if (!(N_list[i] < N_list[i + 1])) {
            throw std::invalid_argument("convergence_study: N_list must be increasing");
        }
    }
    validate_probes(setup.grid, probes);
    if (probes.empty()) throw std::invalid_argument("convergence_study: need probes");

    const std::size_t n_levels = N_list.size();
    const std::size_t n_probes = probes.size();
    // diffs[level][probe][replica] = |u_{N+1} - u_N| at the probe
    std::vector<double> diffs(n_levels * n_probes * setup.replicas, 0.0);

    parallel_replicas(setup.replicas, setup.threads, [&](std::size_t r) {
        const NoisePath noise = sample_noise(setup.grid, replica_seed(setup.base_seed, r));
        for (std::size_t li = 0; li < n_levels; ++li) {
            const double N = N_list[li];
            const FieldPath lo =
                evolve_truncated(setup.u0, setup.b, setup.sigma, N, setup.grid, noise, kernel);
            const FieldPath hi =
                evolve_truncated(setup.u0, setup.b, setup.sigma, N + 1.0, setup.grid, noise, kernel);
            for (std::size_t p = 0; p < n_probes; ++p) {
                const double d = std::abs(hi.at(probes[p].time_index, probes[p].space_index) -
                                          lo.at(probes[p].time_index, probes[p].space_index));
                diffs[(li * n_probes + p) * setup.replicas + r] = d;
            }
        }
    });

    ConvergenceStudy study;
    study.levels.assign(N_list.begin(), N_list.end());
    study.d_N.resize(n_levels);
    study.partial_sums.resize(n_levels);
    double running = 0.0;
    for (std::size_t li = 0; li < n_levels; ++li) {
        double sup = 0.0;
        for (std::size_t p = 0; p < n_probes; ++p) {
            double s = 0.0;
            const double* base = diffs.data() + (li * n_probes + p) * setup.replicas;
            for (std::size_t r = 0; r < setup.replicas; ++r) s += std::pow(base[r], k);
            sup = std::max(sup, std::pow(s / static_cast<double>(setup.replicas), 1.0 / k));
        }
        study.d_N[li] = sup;
        running += sup;
        study.partial_sums[li] = running;
    }

    for (std::size_t li = 0; li < n_levels; ++li) {
        if (study.d_N[li] == 0.0) {
            study.first_zero_index = li;
            break;
        }
    }
    const std::size_t stop = study.first_zero_index.value_or(n_levels);
    for (std::size_t li = 0; li + 1 < stop; ++li) {
        if (study.d_N[li + 1] > study.d_N[li]) study.nonincreasing_before_zero = false;
    }

    // Decay fit: log d_N against N^{2 - beta/alpha} over nonzero levels.
    const double expo = 2.0 - setup.params.ratio();
    std::vector<double> fx, fy;
    for (std::size_t li = 0; li < n_levels; ++li) {
        if (study.d_N[li] > 0.0) {
            fx.push_back(std::pow(study.levels[li], expo));
            fy.push_back(std::log(study.d_N[li]));
        }
    }
    study.fitted_slope = fx.size() >= 2 ? fit_line(fx, fy).slope : 0.0;
    return study;
}

UniquenessReport uniqueness_probe(const StudySetup& setup, const KernelTable& kernel,
                                  std::uint64_t seed, double N_a, double N_b,
                                  HistoryOrder order_a, HistoryOrder order_b) {
    const NoisePath noise = sample_noise(setup.grid, seed);
    EvolveOptions opts_a{order_a};
    EvolveOptions opts_b{order_b};
    const FieldPath a =
        evolve_truncated(setup.u0, setup.b, setup.sigma, N_a, setup.grid, noise, kernel, opts_a);
    const FieldPath b =
        evolve_truncated(setup.u0, setup.b, setup.sigma, N_b, setup.grid, noise, kernel, opts_b);
    UniquenessReport rep;
    for (std::size_t n = 0; n < a.rows(); ++n) {
        for (std::size_t j = 0; j < setup.grid.nx; ++j) {
            const double d = std::abs(a.at(n, j) - b.at(n, j));
            if (d > rep.sup_abs_diff) {
                rep.sup_abs_diff = d;
                rep.argmax_time = n;
                rep.argmax_space = j;
            }
        }
    }
    return rep;
}

double additive_noise_variance(const KernelTable& kernel, const GridSpec& grid, std::size_t m) {
    if (m == 0 || m > grid.nt) throw std::invalid_argument("additive_noise_variance: bad step index");
    double acc = 0.0;
    for (std::size_t d = 1; d <= m; ++d) {
        const auto row = kernel.row(d - 1);
        double s = 0.0;
        for (double g : row) s += g * g;
        acc += s * kernel.dx();
    }
    return acc * grid.dt();
}

double additive_noise_variance_continuum(double cstar_value, double ratio, double t) {
    return cstar_value * std::pow(t, 1.0 - ratio) / (1.0 - ratio);
}

}  // namespace fspde
