#pragma once

#include <complex>
#include <string>
#include <vector>

#include "waveleton/grid2d.hpp"

namespace waveleton {

// U(q) = sum_k coeffs[k] * q^k.
struct PolynomialPotential {
    std::vector<double> coeffs;

    // Degree of the highest nonzero coefficient; -1 for the zero potential.
    int degree() const;
    bool is_zero() const { return degree() < 0; }
    double value(double q) const;
    // Exact order-th derivative polynomial (zero polynomial once order
    // exceeds the degree, so the Moyal series terminates structurally).
    PolynomialPotential derivative(int order = 1) const;
};

// Real phase-space quasi-distribution sampled on a periodic box.
// values are row-major with row index i over q and column index j over p.
struct WignerState {
    Grid2D grid;
    double hbar = 1.0;
    double mass = 1.0;
    double time = 0.0;
};

struct LindbladParams {
    double gamma = 0.0;      // momentum damping rate
    double diffusion = 0.0;  // momentum diffusion coefficient
};

struct MixtureComponent {
    double weight = 0.0;
    PolynomialPotential potential;
};

// Incoherent superposition: components evolve independently and the
// combined distribution is the weighted sum at every time.
struct MixtureSpec {
    std::vector<MixtureComponent> components;
};

// How partial derivatives on the phase-space grid are computed: banded
// circulants built from scaling-function derivative overlaps (default,
// shares machinery with the operator compression pipeline) or a Fourier
// multiplier used for cross-validation.
enum class DerivBackend { connection, spectral };

struct RhsOptions {
    DerivBackend backend = DerivBackend::connection;
    std::string filter = "db6";  // wavelet family for the stencil backend
};

// The momentum box implied by the chord discretization of the transform:
// dp = pi*hbar/(nq*dq), p in [-pi*hbar/(2 dq), +pi*hbar/(2 dq)), np = nq.
Grid2D wigner_grid_spec(int nq, double q_min, double q_max, double hbar);

// Chord-sum Wigner transform of a wavefunction sampled on nq uniform points
// of the periodic interval [q_min, q_max). Chords longer than a quarter box
// are windowed out to suppress wrap-around ghosts; the p-marginal is exact
// by construction. Requires sum |psi|^2 dq = 1 within 1e-8.
WignerState wigner_transform(const std::vector<std::complex<double>>& psi, double hbar,
                             double q_min, double q_max, double mass = 1.0);

// Normalized Gaussian phase-space distribution on the given box. The values
// are rescaled so the discrete integral is exactly 1.
WignerState gaussian_state(const Grid2D& domain, double q0, double p0, double sigma_q,
                           double sigma_p, double hbar = 1.0, double mass = 1.0);

// order-th periodic partial derivative along axis 0 (q) or axis 1 (p).
Grid2D partial_derivative(const Grid2D& g, int axis, int order, const RhsOptions& opt = {});

// dW/dt for a polynomial potential: the transport term -(p/m) dW/dq plus the
// odd-derivative series sum_l (-1)^l (hbar/2)^(2l) / (2l+1)! *
// U^(2l+1)(q) * d^(2l+1)W/dp^(2l+1), which terminates at l = floor((d-1)/2).
Grid2D moyal_rhs(const WignerState& state, const PolynomialPotential& U,
                 const RhsOptions& opt = {});

// moyal_rhs plus the dissipator 2*gamma*d/dp(p W) + D*d^2W/dp^2.
Grid2D lindblad_rhs(const WignerState& state, const PolynomialPotential& U,
                    const LindbladParams& params, const RhsOptions& opt = {});

struct QuantumnessMetrics {
    double negativity_volume;  // integral of |W| dq dp, minus 1
    double purity;             // 2*pi*hbar * integral of W^2 dq dp
    double min_value;          // most negative sample
};
QuantumnessMetrics quantumness_metrics(const WignerState& state);

double state_mass(const WignerState& state);  // discrete integral of W
double state_l2(const WignerState& state);    // sqrt of integral of W^2

// max |W| on the outermost cell ring divided by max |W| overall; values
// above ~1e-10 indicate the state is touching the periodic boundary.
double boundary_contamination(const WignerState& state);

}  // namespace waveleton
