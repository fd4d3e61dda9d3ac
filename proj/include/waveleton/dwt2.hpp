#pragma once

#include <vector>

#include "waveleton/dwt.hpp"
#include "waveleton/filters.hpp"
#include "waveleton/grid2d.hpp"

namespace waveleton {

// square: isotropic pyramid — one row and one column analysis step per
// level, recursing on the coarse-coarse quadrant; detail coefficients come
// in the three tensor families (phi x psi, psi x phi, psi x psi) per level.
// rectangle: fully separable — a complete 1D multilevel analysis along every
// row, then along every column, so coefficients carry two independent scale
// indices. Coefficients live in a single matrix; square mode uses the
// in-place pyramid layout, rectangle mode the per-axis [coarse | detail
// levels coarsest-first] enumeration on each axis.
enum class Mode2D { square, rectangle };

struct Decomposition2D {
    Mode2D mode = Mode2D::square;
    int levels = 0;
    int nq = 0, np = 0;
    double q_min = 0.0, q_max = 0.0, p_min = 0.0, p_max = 0.0;
    std::vector<double> coeff;  // row-major nq x np

    double& at(int i, int j) { return coeff[static_cast<size_t>(i) * np + j]; }
    double at(int i, int j) const { return coeff[static_cast<size_t>(i) * np + j]; }
};

// Orthonormal periodized analysis/synthesis; energy is preserved exactly and
// idwt2(dwt2(g)) round-trips. Throws BadShape for non-dyadic dims or rows
// and columns shorter than the filter, TooManyLevels when levels exceed
// either axis.
Decomposition2D dwt2(const Grid2D& g, const WaveletFilter& f, int levels, Mode2D mode);
Grid2D idwt2(const Decomposition2D& d, const WaveletFilter& f);

// Discrete 1D basis vectors on n points: the scaling function phi_{level,
// shift} spans slot `shift` of V_level, the wavelet psi_{level, shift} slot
// `shift` of W_level; level in [0, log2(n) - 1], shift in [0, 2^level).
Signal unit_scaling(int n, const WaveletFilter& f, int level, int shift);
Signal unit_wavelet(int n, const WaveletFilter& f, int level, int shift);

enum class TensorFamily { phi_phi, phi_psi, psi_phi, psi_psi };

// Sampled tensor-product basis function on the given grid's box, normalized
// to unit continuum L2 norm (the discrete one-hot synthesis divided by
// sqrt(dq*dp)). Throws IndexOutOfRange for bad levels or shifts.
Grid2D basis_function_2d(const WaveletFilter& f, TensorFamily family, int level_q, int level_p,
                         int shift_q, int shift_p, const Grid2D& domain);

}  // namespace waveleton
