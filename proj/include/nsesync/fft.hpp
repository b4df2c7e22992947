#pragma once

// Thin FFTW wrapper. Plans and scratch buffers are cached per thread and per
// resolution; plan creation is serialized because the FFTW planner is not
// thread-safe.

#include <span>

#include "nsesync/spectral_space.hpp"

namespace nsesync::fft {

/// spectrum = (1/n^2) sum_x u(x) exp(-i k.x), expanded to the full array
/// with exact Hermitian symmetry.
void forward(const SpectralGrid& grid, std::span<const double> physical, std::span<Complex> spectrum);

/// physical = sum_k u_k exp(i k.x). The input must be Hermitian.
void inverse(const SpectralGrid& grid, std::span<const Complex> spectrum, std::span<double> physical);

}  // namespace nsesync::fft
