#pragma once

#include <complex>
#include <vector>

namespace waveleton {

// Thin wrappers over the system FFT library. Plan creation is serialized
// internally, so these are safe to call from multiple threads.

// In-place complex DFT with kernel exp(-2*pi*i*k*r/n). Unnormalized.
void fft_forward(std::vector<std::complex<double>>& a);

// In-place complex DFT with kernel exp(+2*pi*i*k*r/n). Unnormalized
// (forward followed by backward multiplies the data by n).
void fft_backward(std::vector<std::complex<double>>& a);

// order-th derivative of a real signal sampled uniformly over one period of
// a periodic domain of the given length, computed in Fourier space. The
// Nyquist bin is zeroed for odd orders so the result stays real.
std::vector<double> fft_derivative(const std::vector<double>& s, int order, double period);

}  // namespace waveleton
