#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace fspde {

// Iterative radix-2 FFT with precomputed twiddles. Sizes must be powers of
// two. Kept in-house so results are bit-reproducible across platforms and
// thread counts.
class Fft {
  public:
    explicit Fft(std::size_t n);

    std::size_t size() const { return n_; }

    // In-place transforms; `a` must hold size() elements.
    void forward(std::complex<double>* a) const;
    void inverse(std::complex<double>* a) const;

    void forward(std::vector<std::complex<double>>& a) const;
    void inverse(std::vector<std::complex<double>>& a) const;

  private:
    void transform(std::complex<double>* a, bool invert) const;

    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<std::complex<double>> twiddle_;  // e^{-2 pi i k / n}, k < n/2
};

bool is_power_of_two(std::size_t n);

}  // namespace fspde
