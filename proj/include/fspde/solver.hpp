#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fspde/coefficients.hpp"
#include "fspde/kernel.hpp"

namespace fspde {

struct GridSpec {
    double T = 1.0;
    std::size_t nt = 64;
    double half_width = 16.0;
    std::size_t nx = 256;

    double dt() const { return T / static_cast<double>(nt); }
    double dx() const { return 2.0 * half_width / static_cast<double>(nx); }
    std::vector<double> times() const;  // dt, 2dt, ..., T
    SpatialGrid spatial() const { return {half_width, nx}; }
    void validate() const;

    // Single-step noise variance sanity: C* dt^{1-r}/(1-r) should stay
    // below one; callers may surface a warning otherwise.
    bool noise_variance_flag(double cstar_value, double ratio) const;
};

// Space-time white noise increments Delta W[n][j] ~ N(0, dt dx), i.i.d.,
// generated cell-by-cell from the counter-based generator keyed by
// (seed, n, j): any sub-rectangle reproduces independently.
struct NoisePath {
    std::uint64_t seed = 0;
    std::size_t nt = 0;
    std::size_t nx = 0;
    std::vector<double> increments;  // nt x nx

    double at(std::size_t n, std::size_t j) const { return increments[n * nx + j]; }
};

NoisePath sample_noise(const GridSpec& grid, std::uint64_t seed);

// One realization u[n][j], n = 0..nt (row 0 is the initial condition).
struct FieldPath {
    GridSpec grid;
    std::vector<double> values;  // (nt+1) x nx
    std::optional<double> truncation_level;
    std::uint64_t seed = 0;

    double at(std::size_t n, std::size_t j) const { return values[n * grid.nx + j]; }
    std::span<const double> row(std::size_t n) const { return {values.data() + n * grid.nx, grid.nx}; }
    std::size_t rows() const { return grid.nt + 1; }
};

enum class HistoryOrder { forward, reverse };

struct EvolveOptions {
    // Order of the history reduction; reversing it permutes the floating
    // point sum without changing the mathematical result.
    HistoryOrder order = HistoryOrder::forward;
};

// Explicit mild-solution scheme with truncated coefficients:
//   u[m] = (G_{t_m} * u0) + sum_{n<m} G_{t_m - t_n} * (b_N(u[n]) dt)
//                         + sum_{n<m} G_{t_m - t_n} (*) (sigma_N(u[n]) dW[n]),
// where * is the dx-weighted spatial convolution and (*) the stochastic one
// (dW already carries the cell measure). Left-endpoint evaluation in time;
// the full history is retained -- there is no one-step recursion for
// beta < 1. Cost O(nt^2 nx + nt nx log nx) per path.
FieldPath evolve_truncated(std::span<const double> u0, const CoefficientSpec& b,
                           const CoefficientSpec& sigma, double N, const GridSpec& grid,
                           const NoisePath& noise, const KernelTable& kernel,
                           const EvolveOptions& opts = {});

// Untruncated variant (N = +inf); bit-identical to evolve_truncated whenever
// no field value reaches the cutoff.
FieldPath evolve(std::span<const double> u0, const CoefficientSpec& b,
                 const CoefficientSpec& sigma, const GridSpec& grid, const NoisePath& noise,
                 const KernelTable& kernel, const EvolveOptions& opts = {});

// Empirical N_{k,T,gamma}: max over grid points with t in (0, T] of
// e^{-gamma t} (mean |u(t,x)|^k)^{1/k}.
double weighted_norm_estimate(std::span<const FieldPath> ensemble, double k, double gamma,
                              double T);

// Kernel table covering exactly the solver times dt..T on the solver grid.
KernelTable solver_kernel_table(const ModelParams& params, const GridSpec& grid,
                                const KernelBuildOptions& opts = {});

std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t replica);

std::vector<double> constant_ic(const GridSpec& grid, double c);
std::vector<double> spike_ic(const GridSpec& grid);  // 1/dx at x = 0

}  // namespace fspde
