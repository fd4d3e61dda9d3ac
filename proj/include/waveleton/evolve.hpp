#pragma once

#include <optional>
#include <vector>

#include "waveleton/wigner.hpp"

namespace waveleton {

enum class Integrator { rk4, crank_nicolson };

struct EvolveOptions {
    Integrator method = Integrator::rk4;
    double dt = 1e-3;
    int steps = 0;
    RhsOptions deriv{};
    // When set, the dissipative right-hand side is used; otherwise the
    // conservative one.
    std::optional<LindbladParams> lindblad{};
    double cfl_safety = 0.9;     // rk4 step-size guard factor
    int snapshot_every = 0;      // 0 keeps only the initial and final states
    int max_linear_iterations = 2000;  // crank_nicolson solver cap
    double linear_tolerance = 1e-10;   // crank_nicolson relative residual
};

struct StepDiagnostics {
    int step = 0;
    double time = 0.0;
    double mass = 0.0;        // discrete integral of W
    double l2_norm = 0.0;     // sqrt of integral of W^2
    double negativity = 0.0;  // integral of |W| minus 1
};

struct Trajectory {
    std::vector<WignerState> snapshots;  // initial state, cadence points, final state
    std::vector<int> snapshot_steps;     // step index of each snapshot
    std::vector<StepDiagnostics> diagnostics;  // one entry per step, including step 0
    const WignerState& final_state() const { return snapshots.back(); }
};

// Largest stable rk4 time step for the transport + force terms:
// min(dq * m / max|p|, dp / max|U'|) over the grid.
double cfl_limit(const WignerState& state, const PolynomialPotential& U);

// Integrate dW/dt forward by opt.steps steps of opt.dt. rk4 enforces the
// CFL guard (CflViolation); crank_nicolson builds the generator as a sparse
// matrix using the stencil backend and solves each implicit step iteratively
// (SolverDivergence if the solver fails to reach tolerance).
Trajectory evolve(const WignerState& initial, const PolynomialPotential& U,
                  const EvolveOptions& opt);

struct MixtureResult {
    std::vector<Trajectory> components;  // in component order
    WignerState combined;                // weighted sum of the final states
};

// Evolve each mixture component under its own potential with shared
// integrator settings. Components are independent; results are combined in
// index order.
MixtureResult mixture_evolve(const MixtureSpec& mix, const std::vector<WignerState>& initials,
                             const EvolveOptions& opt);

}  // namespace waveleton
