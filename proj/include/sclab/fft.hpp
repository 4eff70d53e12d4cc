#pragma once

#include <complex>
#include <span>

namespace sclab::fft {

/// Unnormalized forward DFT, X_k = sum_j x_j exp(-2 pi i jk/n), in place.
void forward(std::span<std::complex<double>> data);

/// Inverse DFT including the 1/n factor, in place.
void inverse(std::span<std::complex<double>> data);

}  // namespace sclab::fft
