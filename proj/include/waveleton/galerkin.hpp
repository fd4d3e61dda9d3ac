#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "waveleton/evolve.hpp"
#include "waveleton/grid2d.hpp"
#include "waveleton/wigner.hpp"

namespace waveleton {

// One axis of the tensor ansatz: the leading slots of the 1D multiresolution
// enumeration (slot 0 = coarsest scaling function, slot 2^l + s = wavelet at
// level l, shift s). An empty mode list means the first 2^level slots, i.e.
// the full approximation space of that level.
struct AxisBasis {
    std::string filter = "sym6";
    int level = 5;
    std::vector<int> modes{};

    std::vector<int> resolved_modes() const;
    int count() const {
        return modes.empty() ? (1 << level) : static_cast<int>(modes.size());
    }
};

// Tensor-product wavelet ansatz for functions on a phase-space box.
struct ModeAnsatz {
    AxisBasis q_basis{};
    AxisBasis p_basis{};
    int nq = 256, np = 256;  // underlying grid resolution
    double q_min = -8.0, q_max = 8.0, p_min = -8.0, p_max = 8.0;
    // Optional current coefficient tensor, shape n_q_modes x n_p_modes.
    Eigen::MatrixXd coeffs{};

    int n_q_modes() const { return q_basis.count(); }
    int n_p_modes() const { return p_basis.count(); }
};

// diag(outer(x)) * d^order/dx^order * diag(inner(x)) along one axis.
struct AxisFactor {
    PolynomialPotential outer{{1.0}};
    int order = 0;
    PolynomialPotential inner{{1.0}};
};

// Separable term of a linear operator: (q factor) applied along q composed
// with (p factor) applied along p, acting on the unknown raised to `power`.
// Only power == 1 is in scope; anything else is rejected at assembly.
struct CustomTerm {
    AxisFactor q{};
    AxisFactor p{};
    int power = 1;
};

struct OperatorSpec {
    enum class Kind { moyal, lindblad, custom };
    Kind kind = Kind::moyal;
    // moyal / lindblad parameters
    PolynomialPotential potential{};
    double hbar = 1.0;
    double mass = 1.0;
    LindbladParams lindblad{};
    // custom operator as an explicit list of separable terms
    std::vector<CustomTerm> custom{};
};

// One Kronecker factor pair of the reduced operator; the term contributes
// left * A * right^T to dA/dt.
struct KroneckerTerm {
    Eigen::MatrixXd left;
    Eigen::MatrixXd right;
};

struct ReducedSystem {
    ModeAnsatz ansatz;
    std::vector<KroneckerTerm> terms;
    // Constant inhomogeneity (zero for every in-scope operator).
    Eigen::MatrixXd source;

    // sum_t left_t * a * right_t^T + source
    Eigen::MatrixXd apply(const Eigen::MatrixXd& a) const;
    // Flattened operator matrix with row-major index pairing
    // (alpha, beta) -> alpha * n_p_modes + beta.
    Eigen::MatrixXd dense() const;
};

// Galerkin projection of the operator onto the tensor ansatz. Matrix entries
// are inner products of the operator image of one basis function with
// another; variable coefficients use one-point quadrature at scaling nodes.
ReducedSystem assemble(const OperatorSpec& op, const ModeAnsatz& ansatz);

struct ProjectionResult {
    Eigen::MatrixXd coeffs;
    // relative L2 distance between the ansatz reconstruction and the input
    double reconstruction_error = 0.0;
};

// Analysis coefficients of a grid state in the ansatz basis.
ProjectionResult project_initial(const WignerState& w0, const ModeAnsatz& ansatz);

// Grid-space reconstruction of a coefficient tensor.
Grid2D synthesize_modes(const ModeAnsatz& ansatz, const Eigen::MatrixXd& coeffs);

// Residual projections of a coefficient tensor under the reduced operator:
// zero for stationary solutions of the homogeneous equation.
Eigen::MatrixXd gdr_residual(const ReducedSystem& system, const Eigen::MatrixXd& a);

struct GalerkinTrajectory {
    std::vector<Eigen::MatrixXd> coeffs;  // initial, cadence points, final
    std::vector<int> snapshot_steps;
    std::vector<double> times;
    const Eigen::MatrixXd& final_coeffs() const { return coeffs.back(); }
};

// Method-of-lines integration of dA/dt = reduced operator applied to A.
// rk4 guards the step size against the reduced operator's spectral radius
// (power-iteration estimate); crank_nicolson solves the dense implicit
// system iteratively.
GalerkinTrajectory solve_evolution(const ReducedSystem& system, const Eigen::MatrixXd& a0,
                                   double dt, int steps,
                                   Integrator method = Integrator::rk4,
                                   int snapshot_every = 0, double cfl_safety = 0.9);

// Space-time variant: the unknown is expanded in a time basis as well, the
// equation residual is projected onto all time x space test functions, and
// the initial condition is imposed through weighted penalty rows appended to
// the system. Solved least-squares; suitable for small mode counts.
struct SpaceTimeSystem {
    ModeAnsatz ansatz;
    AxisBasis time_basis;
    int nt = 0;           // time samples
    double t_final = 0.0;
    Eigen::MatrixXd matrix;      // (Nt*Ns + Ns) x (Nt*Ns)
    Eigen::VectorXd rhs;
    Eigen::MatrixXd time_modes;  // nt x Nt sampled time basis vectors
};

SpaceTimeSystem assemble_space_time(const OperatorSpec& op, const ModeAnsatz& ansatz,
                                    const AxisBasis& time_basis, int nt, double t_final,
                                    const Eigen::MatrixXd& a0, double penalty_weight);

Eigen::VectorXd solve_space_time(const SpaceTimeSystem& system);

// Coefficient tensor at one time sample of a space-time solution vector.
Eigen::MatrixXd space_time_coeffs(const SpaceTimeSystem& system, const Eigen::VectorXd& x,
                                  int time_index);

// External inspection dump: the flattened reduced operator as a
// coordinate-list CSV with header (row, col, value) — entries with
// |value| <= drop_tol omitted — plus a JSON metadata file recording the
// ansatz (filters, levels, mode counts, box), the flattening convention,
// the term count, and the nonzero count of the dump.
void export_reduced_system(const ReducedSystem& sys, const std::string& csv_path,
                           const std::string& json_path, double drop_tol = 0.0);

}  // namespace waveleton
