#pragma once

#include <string>
#include <vector>

namespace waveleton {

enum class WaveletFamily { haar, daubechies, symmlet };

std::string family_name(WaveletFamily f);

// Orthonormal conjugate-quadrature filter pair. Conventions:
//   sum(h) = sqrt(2), sum_k h[k] h[k+2m] = delta_{m0},
//   g[k] = (-1)^k h[L-1-k], and g annihilates polynomials of
//   degree < order.
struct WaveletFilter {
    WaveletFamily family = WaveletFamily::haar;
    int order = 1;          // vanishing moments
    std::vector<double> h;  // low-pass, length 2*order
    std::vector<double> g;  // high-pass, same length

    int length() const { return static_cast<int>(h.size()); }
    int support_length() const { return length() - 1; }
};

// Coefficients are computed from the defining equations (spectral
// factorization of the halfband polynomial, then a Gauss-Newton polish of
// the quadrature-mirror + moment system in extended precision), never read
// from tables. daubechies picks the extremal-phase root set, symmlet the
// assignment minimizing phase nonlinearity. Orders 2..10.
// Throws UnsupportedOrder, ConstructionFailure.
WaveletFilter make_filter(WaveletFamily family, int order);

// Name forms: "haar", "dbN"/"daubechiesN", "symN"/"symmletN".
WaveletFilter make_filter(const std::string& name);

// Residuals of the defining equations; used by validation and tests.
struct FilterResiduals {
    double sum;            // |sum h - sqrt(2)|
    double orthonormality; // max_m |sum_k h_k h_{k+2m} - delta_{m0}|
    // max_{m<order} |sum_k g_k k^m| / sum_k |g_k k^m|: the gross magnitude of
    // the alternating sum grows like k^m, so only the cancellation ratio is a
    // precision-independent statement about the stored coefficients.
    double moments;
};
FilterResiduals filter_residuals(const WaveletFilter& f);

// phi and psi sampled on the dyadic grid over [0, L-1] with spacing
// 2^-depth; (L-1)*2^depth + 1 samples each. Integer values of phi come from
// the eigenvector of the refinement matrix at eigenvalue 1 (sum-normalized),
// finer levels from the two-scale relation. Haar returns the half-open unit
// indicator. depth in [1, 16].
struct ScalingSamples {
    int depth = 0;
    double dx = 0.0;
    std::vector<double> phi;
    std::vector<double> psi;
};
ScalingSamples cascade_eval(const WaveletFilter& f, int dyadic_depth);

// Max phase deviation of the transfer function from its linear fit over
// (0, 0.95*pi]; the symmlet selection objective, exposed for tests.
double phase_nonlinearity(const std::vector<double>& h);

}  // namespace waveleton
