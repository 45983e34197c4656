#include "fspde/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fspde {

bool is_power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

Fft::Fft(std::size_t n) : n_(n) {
    if (!is_power_of_two(n)) {
        throw std::invalid_argument("Fft: size must be a power of two, got " + std::to_string(n));
    }
    bitrev_.resize(n);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < log2n; ++b) {
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
        }
        bitrev_[i] = r;
    }
    twiddle_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        twiddle_[k] = {std::cos(ang), std::sin(ang)};
    }
}

void Fft::transform(std::complex<double>* a, bool invert) const {
    const std::size_t n = n_;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = bitrev_[i];
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                std::complex<double> w = twiddle_[k * step];
                if (invert) w = std::conj(w);
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + half] * w;
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
    if (invert) {
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) a[i] *= inv;
    }
}

void Fft::forward(std::complex<double>* a) const { transform(a, false); }
void Fft::inverse(std::complex<double>* a) const { transform(a, true); }

void Fft::forward(std::vector<std::complex<double>>& a) const {
    if (a.size() != n_) throw std::invalid_argument("Fft::forward: length mismatch");
    transform(a.data(), false);
}

void Fft::inverse(std::vector<std::complex<double>>& a) const {
    if (a.size() != n_) throw std::invalid_argument("Fft::inverse: length mismatch");
    transform(a.data(), true);
}

}  // namespace fspde
