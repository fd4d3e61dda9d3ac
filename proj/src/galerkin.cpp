#include "waveleton/galerkin.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include <json.hpp>

#include "waveleton/connection.hpp"
#include "waveleton/dwt.hpp"
#include "waveleton/dwt2.hpp"
#include "waveleton/errors.hpp"
#include "waveleton/filters.hpp"
#include "waveleton/io.hpp"

namespace waveleton {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<int> default_modes(int level) {
    if (level < 0) throw BadParams("ansatz level must be >= 0");
    std::vector<int> m(static_cast<std::size_t>(1) << level);
    std::iota(m.begin(), m.end(), 0);
    return m;
}

// Columns are the discrete orthonormal basis vectors of the selected slots.
MatrixXd basis_matrix(int n, const AxisBasis& basis) {
    const auto slots = basis.resolved_modes();
    if (slots.empty()) throw BadParams("axis basis needs at least one mode");
    const WaveletFilter f = make_filter(basis.filter);
    MatrixXd e(n, static_cast<int>(slots.size()));
    for (std::size_t c = 0; c < slots.size(); ++c) {
        const int s = slots[c];
        if (s < 0 || s >= n) throw IndexOutOfRange("mode slot outside the grid");
        Signal v;
        if (s == 0) {
            v = unit_scaling(n, f, 0, 0);
        } else {
            int level = 0;
            while ((2 << level) <= s) ++level;  // level = floor(log2 s)
            v = unit_wavelet(n, f, level, s - (1 << level));
        }
        for (int i = 0; i < n; ++i) e(i, static_cast<int>(c)) = v[i];
    }
    return e;
}

void check_poly(const PolynomialPotential& p, const char* what) {
    for (double c : p.coeffs)
        if (!std::isfinite(c)) throw BadParams(std::string(what) + ": non-finite coefficient");
}

// diag(outer(x)) * D^order * diag(inner(x)) on an n-point periodic axis.
MatrixXd grid_factor(int n, double x0, double dx, const AxisFactor& factor,
                     const WaveletFilter& f) {
    if (factor.order < 0) throw BadParams("derivative order must be >= 0");
    check_poly(factor.outer, "outer coefficient");
    check_poly(factor.inner, "inner coefficient");
    MatrixXd m;
    if (factor.order == 0) {
        m = MatrixXd::Identity(n, n);
    } else {
        const auto cc = connection_coefficients(f, factor.order);
        const double scale = 1.0 / std::pow(dx, factor.order);
        m = MatrixXd::Zero(n, n);
        for (int k = 0; k < n; ++k)
            for (int ell = -cc.half_support; ell <= cc.half_support; ++ell)
                m(k, ((k - ell) % n + n) % n) += cc.at(ell) * scale;
    }
    for (int i = 0; i < n; ++i) {
        const double x = x0 + i * dx;
        m.row(i) *= factor.outer.value(x);
        m.col(i) *= factor.inner.value(x);
    }
    return m;
}

std::vector<CustomTerm> expand_operator(const OperatorSpec& op) {
    if (op.kind == OperatorSpec::Kind::custom) return op.custom;

    std::vector<CustomTerm> terms;
    // Transport: -(p/m) dW/dq.
    CustomTerm transport;
    transport.q = AxisFactor{{{1.0}}, 1, {{1.0}}};
    transport.p = AxisFactor{{{0.0, -1.0 / op.mass}}, 0, {{1.0}}};
    terms.push_back(transport);

    // Odd-derivative series of the polynomial potential.
    const int degree = op.potential.degree();
    const int l_max = degree >= 1 ? (degree - 1) / 2 : -1;
    double coeff = 1.0;
    for (int l = 0; l <= l_max; ++l) {
        if (l > 0) {
            const double two_l = 2.0 * l;
            coeff *= -(op.hbar / 2.0) * (op.hbar / 2.0) / (two_l * (two_l + 1.0));
        }
        PolynomialPotential u_der = op.potential.derivative(2 * l + 1);
        if (u_der.is_zero()) continue;
        for (double& c : u_der.coeffs) c *= coeff;
        CustomTerm t;
        t.q = AxisFactor{u_der, 0, {{1.0}}};
        t.p = AxisFactor{{{1.0}}, 2 * l + 1, {{1.0}}};
        terms.push_back(t);
    }

    if (op.kind == OperatorSpec::Kind::lindblad) {
        const double gamma = op.lindblad.gamma, diff = op.lindblad.diffusion;
        if (gamma < 0.0 || diff < 0.0)
            throw BadParams("damping and diffusion must be non-negative");
        if (gamma > 0.0) {
            CustomTerm drag;  // 2 gamma d/dp (p W)
            drag.q = AxisFactor{{{2.0 * gamma}}, 0, {{1.0}}};
            drag.p = AxisFactor{{{1.0}}, 1, {{0.0, 1.0}}};
            terms.push_back(drag);
        }
        if (diff > 0.0) {
            CustomTerm diffusion;  // D d^2W/dp^2
            diffusion.q = AxisFactor{{{diff}}, 0, {{1.0}}};
            diffusion.p = AxisFactor{{{1.0}}, 2, {{1.0}}};
            terms.push_back(diffusion);
        }
    }
    return terms;
}

void check_coeff_shape(const ModeAnsatz& ansatz, const Eigen::MatrixXd& a) {
    if (a.rows() != ansatz.n_q_modes() || a.cols() != ansatz.n_p_modes())
        throw ShapeMismatch("coefficient tensor shape does not match the ansatz");
}

// Flattened pairing used by ReducedSystem::dense(): (alpha, beta) ->
// alpha * n_p_modes + beta.
VectorXd flatten_rm(const MatrixXd& a) {
    VectorXd v(a.rows() * a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
    return v;
}

MatrixXd unflatten_rm(const VectorXd& v, int rows, int cols) {
    MatrixXd a(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = v(i * cols + j);
    return a;
}

// Deterministic power-iteration estimate of the reduced operator's spectral
// radius, used for the explicit step-size guard.
double spectral_estimate(const ReducedSystem& system) {
    const int nq = system.ansatz.n_q_modes(), np = system.ansatz.n_p_modes();
    MatrixXd v(nq, np);
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    for (int i = 0; i < nq; ++i)
        for (int j = 0; j < np; ++j) {
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            v(i, j) = static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
        }
    v /= v.norm();
    double rho = 0.0;
    for (int it = 0; it < 40; ++it) {
        MatrixXd w = system.apply(v) - system.source;
        const double n = w.norm();
        if (n == 0.0) return 0.0;
        rho = n;
        v = w / n;
    }
    return rho;
}

}  // namespace

std::vector<int> AxisBasis::resolved_modes() const {
    return modes.empty() ? default_modes(level) : modes;
}

Eigen::MatrixXd ReducedSystem::apply(const Eigen::MatrixXd& a) const {
    check_coeff_shape(ansatz, a);
    MatrixXd out = source;
    for (const auto& t : terms) out.noalias() += t.left * a * t.right.transpose();
    return out;
}

Eigen::MatrixXd ReducedSystem::dense() const {
    const int nq = ansatz.n_q_modes(), np = ansatz.n_p_modes();
    const int n = nq * np;
    MatrixXd m = MatrixXd::Zero(n, n);
    for (const auto& t : terms)
        for (int a = 0; a < nq; ++a)
            for (int ap = 0; ap < nq; ++ap)
                m.block(a * np, ap * np, np, np) += t.left(a, ap) * t.right;
    return m;
}

ReducedSystem assemble(const OperatorSpec& op, const ModeAnsatz& ansatz) {
    if (!is_pow2(ansatz.nq) || !is_pow2(ansatz.np))
        throw BadShape("ansatz grid dimensions must be powers of two");
    if (!(ansatz.q_max > ansatz.q_min) || !(ansatz.p_max > ansatz.p_min))
        throw BadGrid("ansatz extents must be increasing");
    const auto terms_spec = expand_operator(op);
    for (const auto& t : terms_spec)
        if (t.power != 1)
            throw UnsupportedNonlinearity(
                "only operators linear in the unknown can be projected; "
                "multilinear couplings are out of scope");

    const WaveletFilter fq = make_filter(ansatz.q_basis.filter);
    const WaveletFilter fp = make_filter(ansatz.p_basis.filter);
    const MatrixXd eq = basis_matrix(ansatz.nq, ansatz.q_basis);
    const MatrixXd ep = basis_matrix(ansatz.np, ansatz.p_basis);
    const double dq = (ansatz.q_max - ansatz.q_min) / ansatz.nq;
    const double dp = (ansatz.p_max - ansatz.p_min) / ansatz.np;

    ReducedSystem system;
    system.ansatz = ansatz;
    system.source = MatrixXd::Zero(eq.cols(), ep.cols());
    for (const auto& t : terms_spec) {
        const MatrixXd fq_grid = grid_factor(ansatz.nq, ansatz.q_min, dq, t.q, fq);
        const MatrixXd fp_grid = grid_factor(ansatz.np, ansatz.p_min, dp, t.p, fp);
        KroneckerTerm kt;
        kt.left = eq.transpose() * fq_grid * eq;
        kt.right = ep.transpose() * fp_grid * ep;
        system.terms.push_back(std::move(kt));
    }
    return system;
}

ProjectionResult project_initial(const WignerState& w0, const ModeAnsatz& ansatz) {
    const Grid2D& g = w0.grid;
    if (g.nq != ansatz.nq || g.np != ansatz.np)
        throw ShapeMismatch("state grid does not match the ansatz resolution");
    const MatrixXd eq = basis_matrix(ansatz.nq, ansatz.q_basis);
    const MatrixXd ep = basis_matrix(ansatz.np, ansatz.p_basis);
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                         Eigen::RowMajor>>
        w(g.values.data(), g.nq, g.np);
    ProjectionResult out;
    out.coeffs = eq.transpose() * w * ep;
    const MatrixXd back = eq * out.coeffs * ep.transpose();
    const double wn = w.norm();
    out.reconstruction_error = wn > 0.0 ? (back - w).norm() / wn : 0.0;
    return out;
}

Grid2D synthesize_modes(const ModeAnsatz& ansatz, const Eigen::MatrixXd& coeffs) {
    check_coeff_shape(ansatz, coeffs);
    const MatrixXd eq = basis_matrix(ansatz.nq, ansatz.q_basis);
    const MatrixXd ep = basis_matrix(ansatz.np, ansatz.p_basis);
    Grid2D g = make_grid(ansatz.nq, ansatz.np, ansatz.q_min, ansatz.q_max, ansatz.p_min,
                         ansatz.p_max);
    const MatrixXd w = eq * coeffs * ep.transpose();
    for (int i = 0; i < g.nq; ++i)
        for (int j = 0; j < g.np; ++j) g.at(i, j) = w(i, j);
    return g;
}

Eigen::MatrixXd gdr_residual(const ReducedSystem& system, const Eigen::MatrixXd& a) {
    return system.apply(a);
}

GalerkinTrajectory solve_evolution(const ReducedSystem& system, const Eigen::MatrixXd& a0,
                                   double dt, int steps, Integrator method,
                                   int snapshot_every, double cfl_safety) {
    check_coeff_shape(system.ansatz, a0);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw BadParams("dt must be positive");
    if (steps < 0) throw BadParams("steps must be >= 0");

    GalerkinTrajectory traj;
    traj.coeffs.push_back(a0);
    traj.snapshot_steps.push_back(0);
    traj.times.push_back(0.0);
    if (steps == 0) return traj;

    auto push = [&](const MatrixXd& a, int step) {
        traj.coeffs.push_back(a);
        traj.snapshot_steps.push_back(step);
        traj.times.push_back(step * dt);
    };

    if (method == Integrator::rk4) {
        const double rho = spectral_estimate(system);
        // rk4 stability region crosses the imaginary axis near 2.8/rho
        if (rho > 0.0 && dt > cfl_safety * 2.78 / rho)
            throw CflViolation("dt " + std::to_string(dt) + " exceeds stable limit " +
                               std::to_string(cfl_safety * 2.78 / rho) +
                               " for the reduced operator");
        MatrixXd a = a0;
        for (int step = 1; step <= steps; ++step) {
            const MatrixXd k1 = system.apply(a);
            const MatrixXd k2 = system.apply(a + 0.5 * dt * k1);
            const MatrixXd k3 = system.apply(a + 0.5 * dt * k2);
            const MatrixXd k4 = system.apply(a + dt * k3);
            a += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (snapshot_every > 0 && step % snapshot_every == 0 && step != steps)
                push(a, step);
            if (step == steps) push(a, step);
        }
        return traj;
    }

    const int n = system.ansatz.n_q_modes() * system.ansatz.n_p_modes();
    const MatrixXd m = system.dense();
    const MatrixXd a_mat = MatrixXd::Identity(n, n) - (dt / 2.0) * m;
    const MatrixXd b_mat = MatrixXd::Identity(n, n) + (dt / 2.0) * m;
    Eigen::BiCGSTAB<MatrixXd> solver;
    solver.setTolerance(1e-12);
    solver.setMaxIterations(10 * n);
    solver.compute(a_mat);
    VectorXd w = flatten_rm(a0);
    const VectorXd src = flatten_rm(system.source);
    MatrixXd a = a0;
    for (int step = 1; step <= steps; ++step) {
        const VectorXd rhs = b_mat * w + dt * src;
        const VectorXd next = solver.solveWithGuess(rhs, w);
        if (solver.info() != Eigen::Success)
            throw SolverDivergence("implicit reduced solve stalled at step " +
                                   std::to_string(step));
        w = next;
        if ((snapshot_every > 0 && step % snapshot_every == 0) || step == steps) {
            a = unflatten_rm(w, static_cast<int>(a0.rows()), static_cast<int>(a0.cols()));
            if (step != steps) push(a, step);
        }
        if (step == steps) push(a, step);
    }
    return traj;
}

SpaceTimeSystem assemble_space_time(const OperatorSpec& op, const ModeAnsatz& ansatz,
                                    const AxisBasis& time_basis, int nt, double t_final,
                                    const Eigen::MatrixXd& a0, double penalty_weight) {
    if (!is_pow2(nt)) throw BadShape("time sample count must be a power of two");
    if (!(t_final > 0.0)) throw BadParams("final time must be positive");
    if (!(penalty_weight > 0.0)) throw BadParams("penalty weight must be positive");
    check_coeff_shape(ansatz, a0);

    SpaceTimeSystem st;
    st.ansatz = ansatz;
    st.time_basis = time_basis;
    st.nt = nt;
    st.t_final = t_final;
    st.time_modes = basis_matrix(nt, time_basis);

    const int n_t = static_cast<int>(st.time_modes.cols());
    const int ns = ansatz.n_q_modes() * ansatz.n_p_modes();
    const MatrixXd m_space = assemble(op, ansatz).dense();

    // Reduced time derivative on the periodic time lattice.
    const WaveletFilter ft = make_filter(time_basis.filter);
    AxisFactor ddt{{{1.0}}, 1, {{1.0}}};
    const MatrixXd dt_grid = grid_factor(nt, 0.0, t_final / nt, ddt, ft);
    const MatrixXd dt_red = st.time_modes.transpose() * dt_grid * st.time_modes;

    MatrixXd big = MatrixXd::Zero(n_t * ns + ns, n_t * ns);
    for (int a = 0; a < n_t; ++a)
        for (int b = 0; b < n_t; ++b) {
            if (dt_red(a, b) != 0.0)
                big.block(a * ns, b * ns, ns, ns) +=
                    dt_red(a, b) * MatrixXd::Identity(ns, ns);
            if (a == b) big.block(a * ns, b * ns, ns, ns) -= m_space;
        }
    // Initial-condition penalty: sum_i0 timebasis(0, i0) X[i0, :] = a0.
    for (int b = 0; b < n_t; ++b)
        big.block(n_t * ns, b * ns, ns, ns) =
            penalty_weight * st.time_modes(0, b) * MatrixXd::Identity(ns, ns);

    VectorXd rhs = VectorXd::Zero(n_t * ns + ns);
    rhs.tail(ns) = penalty_weight * flatten_rm(a0);

    st.matrix = std::move(big);
    st.rhs = std::move(rhs);
    return st;
}

Eigen::VectorXd solve_space_time(const SpaceTimeSystem& system) {
    // The periodic time-derivative stencil and coarse reduced operators both
    // carry exact null vectors (constant and lattice-alternating modes), and
    // products of the two can also vanish at the initial-condition sample, so
    // the stacked system is rank-deficient by construction. Minimum-norm
    // least squares via a truncated SVD keeps those directions at zero.
    Eigen::BDCSVD<MatrixXd> svd(system.matrix,
                                Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    return svd.solve(system.rhs);
}

Eigen::MatrixXd space_time_coeffs(const SpaceTimeSystem& system, const Eigen::VectorXd& x,
                                  int time_index) {
    if (time_index < 0 || time_index >= system.nt)
        throw IndexOutOfRange("time sample outside the lattice");
    const int n_t = static_cast<int>(system.time_modes.cols());
    const int nq = system.ansatz.n_q_modes(), np = system.ansatz.n_p_modes();
    const int ns = nq * np;
    if (x.size() != n_t * ns) throw ShapeMismatch("solution vector has the wrong length");
    MatrixXd a = MatrixXd::Zero(nq, np);
    for (int i0 = 0; i0 < n_t; ++i0)
        a += system.time_modes(time_index, i0) *
             unflatten_rm(x.segment(i0 * ns, ns), nq, np);
    return a;
}

void export_reduced_system(const ReducedSystem& sys, const std::string& csv_path,
                           const std::string& json_path, double drop_tol) {
    if (drop_tol < 0) throw BadValue("drop_tol must be nonnegative");
    const MatrixXd dense = sys.dense();
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < dense.rows(); ++i)
        for (int j = 0; j < dense.cols(); ++j)
            if (std::abs(dense(i, j)) > drop_tol)
                rows.push_back({std::to_string(i), std::to_string(j), format_g17(dense(i, j))});
    write_csv(csv_path, {"row", "col", "value"}, rows);

    nlohmann::json meta = {
        {"q_basis", {{"filter", sys.ansatz.q_basis.filter},
                     {"level", sys.ansatz.q_basis.level},
                     {"modes", sys.ansatz.q_basis.resolved_modes()}}},
        {"p_basis", {{"filter", sys.ansatz.p_basis.filter},
                     {"level", sys.ansatz.p_basis.level},
                     {"modes", sys.ansatz.p_basis.resolved_modes()}}},
        {"grid", {{"nq", sys.ansatz.nq}, {"np", sys.ansatz.np},
                  {"q_min", sys.ansatz.q_min}, {"q_max", sys.ansatz.q_max},
                  {"p_min", sys.ansatz.p_min}, {"p_max", sys.ansatz.p_max}}},
        {"n_q_modes", sys.ansatz.n_q_modes()},
        {"n_p_modes", sys.ansatz.n_p_modes()},
        {"flattening", "row-major: flat = q_mode_index * n_p_modes + p_mode_index"},
        {"kronecker_terms", sys.terms.size()},
        {"source_norm", sys.source.size() ? sys.source.norm() : 0.0},
        {"drop_tolerance", drop_tol},
        {"nonzeros", rows.size()}};
    atomic_write_bytes(json_path, meta.dump(2) + "\n");
}

}  // namespace waveleton
