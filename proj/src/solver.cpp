#include "fspde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fspde/errors.hpp"
#include "fspde/philox.hpp"

namespace fspde {

std::vector<double> GridSpec::times() const {
    std::vector<double> out(nt);
    for (std::size_t m = 0; m < nt; ++m) out[m] = dt() * static_cast<double>(m + 1);
    return out;
}

void GridSpec::validate() const {
    if (!(T > 0.0)) throw ConfigError("GridSpec: T must be positive");
    if (nt < 2) throw ConfigError("GridSpec: nt must be >= 2");
    if (nx < 16 || !is_power_of_two(nx)) throw ConfigError("GridSpec: nx must be a power of two >= 16");
    if (!(half_width > 0.0)) throw ConfigError("GridSpec: half_width must be positive");
}

bool GridSpec::noise_variance_flag(double cstar_value, double ratio) const {
    return !(cstar_value * std::pow(dt(), 1.0 - ratio) / (1.0 - ratio) < 1.0);
}

NoisePath sample_noise(const GridSpec& grid, std::uint64_t seed) {
    grid.validate();
    NoisePath path;
    path.seed = seed;
    path.nt = grid.nt;
    path.nx = grid.nx;
    path.increments.resize(grid.nt * grid.nx);
    const double scale = std::sqrt(grid.dt() * grid.dx());
    for (std::size_t n = 0; n < grid.nt; ++n) {
        for (std::size_t j = 0; j < grid.nx; ++j) {
            path.increments[n * grid.nx + j] = scale * normal_at(seed, n, j);
        }
    }
    return path;
}

std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t replica) {
    return split_seed(base_seed, replica);
}

std::vector<double> constant_ic(const GridSpec& grid, double c) {
    return std::vector<double>(grid.nx, c);
}

std::vector<double> spike_ic(const GridSpec& grid) {
    std::vector<double> u0(grid.nx, 0.0);
    u0[grid.nx / 2] = 1.0 / grid.dx();  // x = 0
    return u0;
}

KernelTable solver_kernel_table(const ModelParams& params, const GridSpec& grid,
                                const KernelBuildOptions& opts) {
    grid.validate();
    return build_kernel_table(params, grid.times(), grid.spatial(), opts);
}

namespace {

FieldPath evolve_impl(std::span<const double> u0, const CoefficientSpec& b,
                      const CoefficientSpec& sigma, double cutoff,
                      std::optional<double> truncation_level, const GridSpec& grid,
                      const NoisePath& noise, const KernelTable& kernel,
                      const EvolveOptions& opts) {
    grid.validate();
    const std::size_t nx = grid.nx;
    const std::size_t nt = grid.nt;
    if (u0.size() != nx) throw std::invalid_argument("evolve: u0 length mismatch");
    if (noise.nt != nt || noise.nx != nx) throw std::invalid_argument("evolve: noise/grid mismatch");
    if (kernel.nx() != nx || std::abs(kernel.half_width() - grid.half_width) > 1e-12) {
        throw std::invalid_argument("evolve: kernel table grid mismatch");
    }
    if (kernel.times().size() != nt) throw std::invalid_argument("evolve: kernel table must cover dt..T");
    for (std::size_t m = 0; m < nt; ++m) {
        if (std::abs(kernel.times()[m] - grid.dt() * static_cast<double>(m + 1)) >
            1e-10 * std::max(1.0, grid.T)) {
            throw std::invalid_argument("evolve: kernel table times must equal the solver times");
        }
    }

    const double dt = grid.dt();
    const double inv_dx = 1.0 / grid.dx();
    const Fft& fft = kernel.fft();

    FieldPath path;
    path.grid = grid;
    path.truncation_level = truncation_level;
    path.seed = noise.seed;
    path.values.assign((nt + 1) * nx, 0.0);
    std::copy(u0.begin(), u0.end(), path.values.begin());

    // Forcing spectra F̂_n of f_n = b_N(u[n]) dt + sigma_N(u[n]) dW[n] / dx.
    std::vector<std::complex<double>> forcing_hat(nt * nx);
    std::vector<std::complex<double>> u0_hat(nx);
    std::vector<std::complex<double>> acc(nx);
    std::vector<std::complex<double>> work(nx);

    for (std::size_t j = 0; j < nx; ++j) u0_hat[j] = u0[j];
    fft.forward(u0_hat);

    auto fill_forcing = [&](std::size_t n) {
        const double* u = path.values.data() + n * nx;
        std::complex<double>* out = forcing_hat.data() + n * nx;
        for (std::size_t j = 0; j < nx; ++j) {
            const double v = std::clamp(u[j], -cutoff, cutoff);
            out[j] = b.eval(v) * dt + sigma.eval(v) * noise.at(n, j) * inv_dx;
        }
        fft.forward(out);
    };

    fill_forcing(0);
    for (std::size_t m = 1; m <= nt; ++m) {
        const auto sym_m = kernel.symbol_row(m - 1);  // row for t = m dt
        for (std::size_t k = 0; k < nx; ++k) acc[k] = sym_m[k] * u0_hat[k];
        // Full-history stochastic/drift convolution in Fourier space.
        if (opts.order == HistoryOrder::forward) {
            for (std::size_t n = 0; n < m; ++n) {
                const auto sym = kernel.symbol_row(m - n - 1);  // t_m - t_n = (m-n) dt
                const std::complex<double>* fh = forcing_hat.data() + n * nx;
                for (std::size_t k = 0; k < nx; ++k) acc[k] += sym[k] * fh[k];
            }
        } else {
            for (std::size_t ni = m; ni-- > 0;) {
                const auto sym = kernel.symbol_row(m - ni - 1);
                const std::complex<double>* fh = forcing_hat.data() + ni * nx;
                for (std::size_t k = 0; k < nx; ++k) acc[k] += sym[k] * fh[k];
            }
        }
        work = acc;
        fft.inverse(work);
        double* u_m = path.values.data() + m * nx;
        for (std::size_t j = 0; j < nx; ++j) {
            u_m[j] = work[j].real();
            if (!std::isfinite(u_m[j])) {
                std::ostringstream os;
                os << "evolve: non-finite field value at step " << m << ", grid index " << j
                   << " (t = " << dt * static_cast<double>(m) << ")";
                throw NumericalError(os.str());
            }
        }
        if (m < nt) fill_forcing(m);
    }
    return path;
}

}  // namespace

FieldPath evolve_truncated(std::span<const double> u0, const CoefficientSpec& b,
                           const CoefficientSpec& sigma, double N, const GridSpec& grid,
                           const NoisePath& noise, const KernelTable& kernel,
                           const EvolveOptions& opts) {
    if (!(N > 0.0)) throw std::invalid_argument("evolve_truncated: N must be positive");
    if (N > 700.0) throw std::invalid_argument("evolve_truncated: e^N overflows for N > 700");
    return evolve_impl(u0, b, sigma, std::exp(N), N, grid, noise, kernel, opts);
}

FieldPath evolve(std::span<const double> u0, const CoefficientSpec& b,
                 const CoefficientSpec& sigma, const GridSpec& grid, const NoisePath& noise,
                 const KernelTable& kernel, const EvolveOptions& opts) {
    return evolve_impl(u0, b, sigma, std::numeric_limits<double>::infinity(), std::nullopt, grid,
                       noise, kernel, opts);
}

double weighted_norm_estimate(std::span<const FieldPath> ensemble, double k, double gamma,
                              double T) {
    if (ensemble.empty()) throw std::invalid_argument("weighted_norm_estimate: empty ensemble");
    if (!(k >= 1.0)) throw std::invalid_argument("weighted_norm_estimate: k must be >= 1");
    const GridSpec& grid = ensemble.front().grid;
    for (const auto& p : ensemble) {
        if (p.grid.nx != grid.nx || p.grid.nt != grid.nt) {
            throw std::invalid_argument("weighted_norm_estimate: ensemble grids differ");
        }
    }
    const double dt = grid.dt();
    const auto r = static_cast<double>(ensemble.size());
    double best = 0.0;
    for (std::size_t n = 1; n <= grid.nt; ++n) {
        const double t = dt * static_cast<double>(n);
        if (t > T * (1.0 + 1e-12)) break;
        const double w = std::exp(-gamma * t);
        for (std::size_t j = 0; j < grid.nx; ++j) {
            double s = 0.0;
            for (const auto& p : ensemble) s += std::pow(std::abs(p.at(n, j)), k);
            best = std::max(best, w * std::pow(s / r, 1.0 / k));
        }
    }
    return best;
}

}  // namespace fspde
