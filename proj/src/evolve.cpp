#include "waveleton/evolve.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "waveleton/connection.hpp"
#include "waveleton/errors.hpp"
#include "waveleton/filters.hpp"

namespace waveleton {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

StepDiagnostics diagnose(int step, const WignerState& s) {
    const auto m = quantumness_metrics(s);
    return StepDiagnostics{step, s.time, state_mass(s), state_l2(s), m.negativity_volume};
}

Grid2D rhs_grid(const WignerState& s, const PolynomialPotential& U, const EvolveOptions& opt) {
    return opt.lindblad ? lindblad_rhs(s, U, *opt.lindblad, opt.deriv) : moyal_rhs(s, U, opt.deriv);
}

void axpy(Grid2D& y, double a, const Grid2D& x) {
    for (std::size_t k = 0; k < y.values.size(); ++k) y.values[k] += a * x.values[k];
}

WignerState rk4_step(const WignerState& s, const PolynomialPotential& U,
                     const EvolveOptions& opt) {
    const double dt = opt.dt;
    WignerState tmp = s;

    const Grid2D k1 = rhs_grid(s, U, opt);
    tmp.grid = s.grid;
    axpy(tmp.grid, 0.5 * dt, k1);
    tmp.time = s.time + 0.5 * dt;
    const Grid2D k2 = rhs_grid(tmp, U, opt);
    tmp.grid = s.grid;
    axpy(tmp.grid, 0.5 * dt, k2);
    const Grid2D k3 = rhs_grid(tmp, U, opt);
    tmp.grid = s.grid;
    axpy(tmp.grid, dt, k3);
    tmp.time = s.time + dt;
    const Grid2D k4 = rhs_grid(tmp, U, opt);

    WignerState out = s;
    axpy(out.grid, dt / 6.0, k1);
    axpy(out.grid, dt / 3.0, k2);
    axpy(out.grid, dt / 3.0, k3);
    axpy(out.grid, dt / 6.0, k4);
    out.time = s.time + dt;
    return out;
}

// Banded circulant for the order-th periodic derivative on n points.
std::vector<Triplet> derivative_band(const WaveletFilter& f, int order, int n, double dx) {
    const auto cc = connection_coefficients(f, order);
    const double scale = 1.0 / std::pow(dx, order);
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(n) * (2 * cc.half_support + 1));
    for (int k = 0; k < n; ++k)
        for (int ell = -cc.half_support; ell <= cc.half_support; ++ell) {
            const double r = cc.at(ell);
            if (r == 0.0) continue;
            t.emplace_back(k, ((k - ell) % n + n) % n, r * scale);
        }
    return t;
}

// Full generator L with vec index i*np + j (row-major grids).
SpMat build_generator(const WignerState& s, const PolynomialPotential& U,
                      const EvolveOptions& opt) {
    const Grid2D& g = s.grid;
    const int nq = g.nq, np = g.np;
    const int N = nq * np;
    const auto f = make_filter(opt.deriv.filter);
    std::vector<Triplet> trip;

    // -(p_j/m) * d/dq : couples rows along q, diagonal in p.
    for (const auto& t : derivative_band(f, 1, nq, g.dq()))
        for (int j = 0; j < np; ++j)
            trip.emplace_back(t.row() * np + j, t.col() * np + j, -g.p(j) / s.mass * t.value());

    // Potential series: diag(c_l U^(2l+1)(q_i)) x d^(2l+1)/dp^(2l+1).
    const int degree = U.degree();
    const int l_max = degree >= 1 ? (degree - 1) / 2 : -1;
    double coeff = 1.0;
    for (int l = 0; l <= l_max; ++l) {
        if (l > 0) {
            const double two_l = 2.0 * l;
            coeff *= -(s.hbar / 2.0) * (s.hbar / 2.0) / (two_l * (two_l + 1.0));
        }
        const PolynomialPotential u_der = U.derivative(2 * l + 1);
        if (u_der.is_zero()) continue;
        const auto band = derivative_band(f, 2 * l + 1, np, g.dp());
        for (int i = 0; i < nq; ++i) {
            const double fac = coeff * u_der.value(g.q(i));
            if (fac == 0.0) continue;
            for (const auto& t : band)
                trip.emplace_back(i * np + t.row(), i * np + t.col(), fac * t.value());
        }
    }

    if (opt.lindblad) {
        const double gamma = opt.lindblad->gamma, diff = opt.lindblad->diffusion;
        if (gamma < 0.0 || diff < 0.0) throw BadParams("damping and diffusion must be non-negative");
        if (gamma > 0.0) {
            // 2 gamma d/dp (p W) = 2 gamma D_p diag(p).
            const auto band = derivative_band(f, 1, np, g.dp());
            for (const auto& t : band)
                for (int i = 0; i < nq; ++i)
                    trip.emplace_back(i * np + t.row(), i * np + t.col(),
                                      2.0 * gamma * t.value() * g.p(t.col()));
        }
        if (diff > 0.0) {
            const auto band = derivative_band(f, 2, np, g.dp());
            for (const auto& t : band)
                for (int i = 0; i < nq; ++i)
                    trip.emplace_back(i * np + t.row(), i * np + t.col(), diff * t.value());
        }
    }

    SpMat L(N, N);
    L.setFromTriplets(trip.begin(), trip.end());
    return L;
}

}  // namespace

double cfl_limit(const WignerState& state, const PolynomialPotential& U) {
    const Grid2D& g = state.grid;
    double p_max = 0.0;
    for (int j = 0; j < g.np; ++j) p_max = std::max(p_max, std::abs(g.p(j)));
    double force_max = 0.0;
    const PolynomialPotential du = U.derivative(1);
    for (int i = 0; i < g.nq; ++i) force_max = std::max(force_max, std::abs(du.value(g.q(i))));
    double limit = std::numeric_limits<double>::infinity();
    if (p_max > 0.0) limit = std::min(limit, g.dq() * state.mass / p_max);
    if (force_max > 0.0) limit = std::min(limit, g.dp() / force_max);
    return limit;
}

Trajectory evolve(const WignerState& initial, const PolynomialPotential& U,
                  const EvolveOptions& opt) {
    if (!(opt.dt > 0.0) || !std::isfinite(opt.dt)) throw BadParams("dt must be positive");
    if (opt.steps < 0) throw BadParams("steps must be >= 0");
    for (double c : U.coeffs)
        if (!std::isfinite(c)) throw BadParams("potential coefficients must be finite");

    Trajectory traj;
    traj.snapshots.push_back(initial);
    traj.snapshot_steps.push_back(0);
    traj.diagnostics.push_back(diagnose(0, initial));
    if (opt.steps == 0) return traj;

    if (opt.method == Integrator::rk4) {
        const double limit = opt.cfl_safety * cfl_limit(initial, U);
        if (opt.dt > limit)
            throw CflViolation("dt " + std::to_string(opt.dt) + " exceeds stable limit " +
                               std::to_string(limit));
        WignerState s = initial;
        for (int step = 1; step <= opt.steps; ++step) {
            s = rk4_step(s, U, opt);
            traj.diagnostics.push_back(diagnose(step, s));
            const bool keep = (opt.snapshot_every > 0 && step % opt.snapshot_every == 0);
            if (keep && step != opt.steps) {
                traj.snapshots.push_back(s);
                traj.snapshot_steps.push_back(step);
            }
        }
        traj.snapshots.push_back(s);
        traj.snapshot_steps.push_back(opt.steps);
        return traj;
    }

    // Trapezoidal implicit step: (I - dt/2 L) w' = (I + dt/2 L) w.
    const int N = initial.grid.nq * initial.grid.np;
    const SpMat L = build_generator(initial, U, opt);
    SpMat identity(N, N);
    identity.setIdentity();
    const SpMat A = identity - (opt.dt / 2.0) * L;
    const SpMat B = identity + (opt.dt / 2.0) * L;

    Eigen::BiCGSTAB<SpMat> solver;
    solver.setTolerance(opt.linear_tolerance);
    solver.setMaxIterations(opt.max_linear_iterations);
    solver.compute(A);
    if (solver.info() != Eigen::Success)
        throw SolverDivergence("implicit step matrix could not be factored");

    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(initial.grid.values.data(), N);
    WignerState s = initial;
    for (int step = 1; step <= opt.steps; ++step) {
        const Eigen::VectorXd rhs = B * w;
        const Eigen::VectorXd next = solver.solveWithGuess(rhs, w);
        w = next;
        if (solver.info() != Eigen::Success)
            throw SolverDivergence("implicit solve stalled at step " + std::to_string(step) +
                                   " (residual " + std::to_string(solver.error()) + ")");
        Eigen::Map<Eigen::VectorXd>(s.grid.values.data(), N) = w;
        s.time = initial.time + step * opt.dt;
        traj.diagnostics.push_back(diagnose(step, s));
        const bool keep = (opt.snapshot_every > 0 && step % opt.snapshot_every == 0);
        if (keep && step != opt.steps) {
            traj.snapshots.push_back(s);
            traj.snapshot_steps.push_back(step);
        }
    }
    traj.snapshots.push_back(s);
    traj.snapshot_steps.push_back(opt.steps);
    return traj;
}

MixtureResult mixture_evolve(const MixtureSpec& mix, const std::vector<WignerState>& initials,
                             const EvolveOptions& opt) {
    if (mix.components.empty()) throw BadParams("mixture needs at least one component");
    if (initials.size() != mix.components.size())
        throw ShapeMismatch("one initial state per mixture component required");
    double total = 0.0;
    for (const auto& c : mix.components) {
        if (c.weight < 0.0) throw BadParams("mixture weights must be non-negative");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw BadParams("mixture weights must sum to 1");
    const Grid2D& ref = initials.front().grid;
    for (const auto& s : initials)
        if (s.grid.nq != ref.nq || s.grid.np != ref.np)
            throw ShapeMismatch("mixture components must share one grid");

    MixtureResult out;
    out.components.reserve(mix.components.size());
    for (std::size_t n = 0; n < mix.components.size(); ++n)
        out.components.push_back(evolve(initials[n], mix.components[n].potential, opt));

    out.combined = out.components.front().final_state();
    for (double& v : out.combined.grid.values) v *= mix.components.front().weight;
    for (std::size_t n = 1; n < mix.components.size(); ++n)
        axpy(out.combined.grid, mix.components[n].weight,
             out.components[n].final_state().grid);
    return out;
}

}  // namespace waveleton
