#include "fspde/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fspde/errors.hpp"

namespace fspde {

namespace {
constexpr double kPi = std::numbers::pi;
}

void ModelParams::validate() const {
    if (d != 1) throw ConfigError("ModelParams: only d = 1 is supported");
    if (!(alpha > 0.0) || alpha > 2.0) throw ConfigError("ModelParams: alpha must lie in (0, 2]");
    if (!(beta > 0.0) || beta > 1.0) throw ConfigError("ModelParams: beta must lie in (0, 1]");
    if (!(static_cast<double>(d) < std::min(2.0, 1.0 / beta) * alpha)) {
        std::ostringstream os;
        os << "ModelParams: well-posedness requires d < min(2, 1/beta) alpha; got alpha=" << alpha
           << " beta=" << beta;
        throw ConfigError(os.str());
    }
    if (!(beta / alpha < 1.0)) throw ConfigError("ModelParams: beta/alpha must be < 1");
}

std::vector<double> SpatialGrid::xs() const {
    std::vector<double> out(nx);
    const double h = dx();
    for (std::size_t j = 0; j < nx; ++j) {
        out[j] = -half_width + h * static_cast<double>(j);
    }
    return out;
}

void SpatialGrid::validate() const {
    if (!(half_width > 0.0)) throw ConfigError("SpatialGrid: half_width must be positive");
    if (nx < 16 || !is_power_of_two(nx)) {
        throw ConfigError("SpatialGrid: nx must be a power of two >= 16");
    }
}

double kernel_symbol(const ModelParams& params, double t, double xi) {
    if (!(t > 0.0)) throw std::domain_error("kernel_symbol: t must be positive");
    return mittag_leffler(params.beta, -std::pow(t, params.beta) * std::pow(std::abs(xi), params.alpha));
}

KernelTable build_kernel_table(const ModelParams& params, std::vector<double> times,
                               const SpatialGrid& grid, const KernelBuildOptions& opts) {
    params.validate();
    grid.validate();
    if (times.empty()) throw ConfigError("build_kernel_table: need at least one time");
    for (std::size_t n = 0; n < times.size(); ++n) {
        if (!(times[n] > 0.0)) throw ConfigError("build_kernel_table: times must be positive");
        if (n > 0 && !(times[n] > times[n - 1])) {
            throw ConfigError("build_kernel_table: times must be strictly increasing");
        }
    }

    KernelTable table(params, std::move(times), grid);
    const std::size_t nx = grid.nx;
    const std::size_t nt = table.times_.size();
    table.xs_ = grid.xs();
    table.values_.resize(nt * nx);
    table.symbol_.resize(nt * nx);

    MlEvaluator ml(params.beta, opts.ml);
    const double dxi = kPi / grid.half_width;  // dual grid spacing
    std::vector<std::complex<double>> work(nx);

    for (std::size_t n = 0; n < nt; ++n) {
        const double tb = std::pow(table.times_[n], params.beta);
        double* sym = table.symbol_.data() + n * nx;
        // |xi_k| symmetry: fill k = 0..nx/2, mirror the rest.
        for (std::size_t k = 0; k <= nx / 2; ++k) {
            const double xi = dxi * static_cast<double>(k);
            sym[k] = ml(-tb * std::pow(xi, params.alpha));
        }
        for (std::size_t k = nx / 2 + 1; k < nx; ++k) sym[k] = sym[nx - k];

        // g_d = (1/(2L)) sum_k symbol_k e^{+i 2 pi d k / nx} = IDFT(symbol)/dx
        for (std::size_t k = 0; k < nx; ++k) work[k] = sym[k];
        table.fft_.inverse(work);
        double* row = table.values_.data() + n * nx;
        const double inv_dx = 1.0 / grid.dx();
        for (std::size_t j = 0; j < nx; ++j) {
            // x_j = (j - nx/2) dx corresponds to displacement (j + nx/2) mod nx
            const std::size_t d = (j + nx / 2) % nx;
            row[j] = work[d].real() * inv_dx;
        }
    }

    // Aliasing: symbol not decayed at the Nyquist wavenumber for the
    // sharpest (smallest-t) row.
    const double xi_nyq = dxi * static_cast<double>(nx / 2);
    table.aliasing_warning_ =
        std::abs(kernel_symbol(params, table.times_.front(), xi_nyq)) > 1e-8;

    // Outer-shell mass for the widest (largest-t) row.
    {
        const std::size_t n = nt - 1;
        double shell = 0.0;
        for (std::size_t j = 0; j < nx; ++j) {
            if (std::abs(table.xs_[j]) >= 0.9 * grid.half_width) {
                shell += std::abs(table.values_[n * nx + j]) * grid.dx();
            }
        }
        table.edge_tail_mass_ = shell;
        if (shell > opts.edge_mass_tol) {
            std::ostringstream os;
            os << "build_kernel_table: grid too narrow; outer-shell mass " << shell
               << " exceeds " << opts.edge_mass_tol << " at t = " << table.times_.back();
            throw GridError(os.str());
        }
    }
    return table;
}

std::span<const double> KernelTable::row(std::size_t t_index) const {
    return {values_.data() + t_index * nx(), nx()};
}

double KernelTable::value(std::size_t t_index, std::size_t j) const {
    return values_[t_index * nx() + j];
}

std::span<const double> KernelTable::symbol_row(std::size_t t_index) const {
    return {symbol_.data() + t_index * nx(), nx()};
}

std::size_t KernelTable::time_index(double t) const {
    for (std::size_t n = 0; n < times_.size(); ++n) {
        if (std::abs(times_[n] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return n;
    }
    std::ostringstream os;
    os << "KernelTable: t = " << t << " is not a table time";
    throw std::invalid_argument(os.str());
}

double kernel_l2_norm(const KernelTable& table, double t) {
    const auto r = table.row(table.time_index(t));
    double s = 0.0;
    for (double g : r) s += g * g;
    return s * table.dx();
}

BoundsCertificate kernel_bounds_certificate(const KernelTable& table) {
    const std::size_t nx = table.nx();
    if (nx < 4 || table.xs().size() < 4) {
        throw std::invalid_argument("kernel_bounds_certificate: grid too small");
    }
    const double a = table.params().alpha;
    const double r = table.params().ratio();

    double c1 = HUGE_VAL, c2 = 0.0;
    std::size_t used = 0;
    for (std::size_t n = 0; n < table.times().size(); ++n) {
        const double t = table.times()[n];
        const double peak = std::pow(t, -r);
        const double tb = std::pow(t, table.params().beta);
        for (std::size_t j = 0; j < nx; ++j) {
            const double g = table.value(n, j);
            if (!(g > 1e-10)) continue;
            const double x = std::abs(table.xs()[j]);
            const double env = x == 0.0 ? peak : std::min(peak, tb / std::pow(x, 1.0 + a));
            const double ratio = g / env;
            c1 = std::min(c1, ratio);
            c2 = std::max(c2, ratio);
            ++used;
        }
    }
    if (used == 0) throw std::invalid_argument("kernel_bounds_certificate: no usable grid points");
    if (c2 > 100.0 && a < 2.0) {
        std::ostringstream os;
        os << "kernel_bounds_certificate: upper envelope violated (c2_hat = " << c2
           << "); kernel inversion suspect";
        throw NumericalError(os.str());
    }
    return {c1, c2, a == 2.0};
}

std::vector<double> convolve(const KernelTable& table, std::size_t t_index,
                             std::span<const double> field) {
    const std::size_t nx = table.nx();
    if (field.size() != nx) throw std::invalid_argument("convolve: field length mismatch");
    if (t_index >= table.times().size()) throw std::invalid_argument("convolve: bad time index");

    std::vector<std::complex<double>> work(nx);
    for (std::size_t j = 0; j < nx; ++j) work[j] = field[j];
    table.fft().forward(work);
    const auto sym = table.symbol_row(t_index);
    for (std::size_t k = 0; k < nx; ++k) work[k] *= sym[k];
    table.fft().inverse(work);

    std::vector<double> out(nx);
    for (std::size_t j = 0; j < nx; ++j) out[j] = work[j].real();
    return out;
}

}  // namespace fspde
