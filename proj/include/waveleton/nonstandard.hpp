#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstddef>
#include <functional>
#include <vector>

#include "waveleton/connection.hpp"
#include "waveleton/dwt.hpp"
#include "waveleton/filters.hpp"

namespace waveleton {

// One level of the non-standard representation. With P the coarse and Q the
// detail projector of the level, A = Q T Q' (detail -> detail),
// B = Q T P' (coarse -> detail), G = P T Q' (detail -> coarse). All three
// are square of the level's half-size and exactly banded for local operators.
struct OperatorBlocks {
    Eigen::SparseMatrix<double> A, B, G;
};

struct NonStandardForm {
    int grid_length = 0;
    int levels = 0;
    WaveletFilter filter;
    std::vector<OperatorBlocks> blocks;   // index j-1 for level j = 1..levels
    Eigen::SparseMatrix<double> coarse;   // remaining coarse-on-coarse block

    std::size_t nonzeros() const;
};

// Dense fine-grid matrices to feed the builder. The derivative matrix is the
// periodic connection-coefficient circulant; the kernel matrix samples
// K(x, y) on the grid with the one-point scaling-function quadrature
// T_ij = dx * K(x_i, x_j), exact to the filter's approximation order.
Eigen::MatrixXd derivative_matrix(int grid_length, const ConnectionCoefficients& cc, double dx);
Eigen::MatrixXd kernel_matrix(int grid_length, double domain_length,
                              const std::function<double(double, double)>& kernel);

// Peel `levels` scales off a dense fine-grid operator by conjugating with
// one analysis step per level and keeping the three interaction blocks;
// whatever remains is the coarse block. Requires a dyadic grid with
// grid_length >= 2^levels * support; throws ShapeMismatch.
NonStandardForm build_nonstandard_form(const Eigen::MatrixXd& dense, const WaveletFilter& f,
                                       int levels);

// Multiscale application: analyze, act blockwise per level, reassemble.
// Equals the dense product within roundoff and costs O(N * band).
Signal apply_nonstandard(const NonStandardForm& nsf, const Signal& s);

struct ThresholdStats {
    std::size_t nonzeros_before = 0;
    std::size_t nonzeros_after = 0;
    // Frobenius norm of everything dropped: a bound on the L2 operator
    // distance between the original and thresholded forms.
    double max_apply_error_bound = 0.0;
};

struct ThresholdResult {
    NonStandardForm nsf;
    ThresholdStats stats;
};

// Zero every block entry with |value| < eps. eps = 0 keeps everything.
ThresholdResult threshold_nonstandard(const NonStandardForm& nsf, double eps);

}  // namespace waveleton
