#pragma once

#include <vector>

#include "waveleton/dwt.hpp"
#include "waveleton/filters.hpp"

namespace waveleton {

// Galerkin coefficients of the n-th derivative in a compactly supported
// orthonormal scaling basis: r_l = integral phi^(n)(x) phi(x-l) dx, nonzero
// only for |l| <= L-2. They satisfy r_{-l} = (-1)^n r_l and solve the
// two-scale system r_l = 2^n [r_{2l} + sum_{odd m} a_m r_{2l+m}] with a_m
// the filter autocorrelation; the scaling freedom is fixed by
// sum_l l^n r_l = (-1)^n n!, which makes the induced stencil differentiate
// t^n exactly.
struct ConnectionCoefficients {
    int derivative_order = 1;
    WaveletFilter filter;
    int half_support = 0;   // K = L - 2
    std::vector<double> r;  // index l + K, l in [-K, K]

    double at(int ell) const { return r[static_cast<size_t>(ell + half_support)]; }
};

// Requires derivative order n >= 1 and regularity M >= ceil((n+1)/2) + 1
// (haar is rejected for every n). Throws InsufficientRegularity, or
// SingularSystem when the two-scale system's null space is not the expected
// one-dimensional scaling freedom.
ConnectionCoefficients connection_coefficients(const WaveletFilter& f, int n);

// Periodic circulant action out_k = dx^-n sum_l r_l s_{k-l}: the n-th
// derivative of the sampled function, exact on polynomials of degree
// <= n + M - 1 away from the wrap seam.
Signal apply_stencil(const ConnectionCoefficients& cc, const Signal& s, double dx);

}  // namespace waveleton
