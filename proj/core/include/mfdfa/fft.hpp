#pragma once

#include <complex>
#include <span>
#include <vector>

namespace mfdfa {

using Complex = std::complex<double>;

/// Discrete Fourier transform of any length. Powers of two use an iterative
/// radix-2 transform; other lengths go through Bluestein's chirp-z
/// convolution. Forward: X_k = sum_n x_n exp(-2 pi i k n / N). The inverse
/// includes the 1/N factor.
std::vector<Complex> dft(std::span<const Complex> x);
std::vector<Complex> inverse_dft(std::span<const Complex> x);

std::vector<Complex> dft_real(std::span<const double> x);

}  // namespace mfdfa
