#include "waveleton/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "waveleton/connection.hpp"
#include "waveleton/errors.hpp"
#include "waveleton/fft.hpp"
#include "waveleton/filters.hpp"

namespace waveleton {

namespace {

void check_state_grid(const Grid2D& g) {
    if (g.nq < 2 || g.np < 2 || static_cast<int>(g.values.size()) != g.nq * g.np)
        throw BadGrid("phase-space grid is malformed");
}

double quad_weight(const Grid2D& g) { return g.dq() * g.dp(); }

}  // namespace

int PolynomialPotential::degree() const {
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
        if (coeffs[k] != 0.0) return k;
    return -1;
}

double PolynomialPotential::value(double q) const {
    double acc = 0.0;
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) acc = acc * q + coeffs[k];
    return acc;
}

PolynomialPotential PolynomialPotential::derivative(int order) const {
    if (order < 0) throw BadParams("potential derivative order must be >= 0");
    PolynomialPotential out = *this;
    for (int pass = 0; pass < order; ++pass) {
        if (out.coeffs.empty()) break;
        std::vector<double> next;
        next.reserve(out.coeffs.size() > 0 ? out.coeffs.size() - 1 : 0);
        for (std::size_t k = 1; k < out.coeffs.size(); ++k)
            next.push_back(static_cast<double>(k) * out.coeffs[k]);
        out.coeffs = std::move(next);
    }
    return out;
}

Grid2D wigner_grid_spec(int nq, double q_min, double q_max, double hbar) {
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw BadParams("hbar must be positive");
    if (nq < 8) throw BadGrid("position grid too small for the chord transform");
    const double dq = (q_max - q_min) / nq;
    if (!(dq > 0.0) || !std::isfinite(dq)) throw BadGrid("position extent must be positive");
    const double p_half = std::numbers::pi * hbar / (2.0 * dq);
    return make_grid(nq, nq, q_min, q_max, -p_half, p_half);
}

WignerState wigner_transform(const std::vector<std::complex<double>>& psi, double hbar,
                             double q_min, double q_max, double mass) {
    const int n = static_cast<int>(psi.size());
    Grid2D grid = wigner_grid_spec(n, q_min, q_max, hbar);
    if (!(mass > 0.0) || !std::isfinite(mass)) throw BadParams("mass must be positive");
    const double dq = grid.dq();

    double norm = 0.0;
    for (const auto& v : psi) norm += std::norm(v);
    norm *= dq;
    if (std::abs(norm - 1.0) > 1e-8)
        throw NotNormalized("wavefunction norm is " + std::to_string(norm));

    // W(q_i, p) = (dq / (pi hbar)) * sum_r psi*(q_{i+r}) psi(q_{i-r}) e^{2 pi I j r / n}
    // with p_j = j * dp. Chords are windowed to |r| <= n/4 - 1 so that a
    // state far from the boundary never correlates with its periodic image;
    // the window is symmetric in r, which keeps the sum exactly real.
    const int window = n / 4 - 1;
    const double scale = dq / (std::numbers::pi * hbar);
    std::vector<std::complex<double>> chord(n);
    for (int i = 0; i < n; ++i) {
        std::fill(chord.begin(), chord.end(), std::complex<double>(0.0, 0.0));
        chord[0] = std::norm(psi[i]);
        for (int r = 1; r <= window; ++r) {
            const std::complex<double> a = std::conj(psi[(i + r) % n]) * psi[(i - r + n) % n];
            chord[r] = a;
            chord[n - r] = std::conj(a);
        }
        fft_backward(chord);
        for (int j = 0; j < n; ++j) {
            const int k = (j - n / 2 + n) % n;  // center p = 0 at column n/2
            grid.at(i, j) = scale * chord[k].real();
        }
    }
    return WignerState{std::move(grid), hbar, mass, 0.0};
}

WignerState gaussian_state(const Grid2D& domain, double q0, double p0, double sigma_q,
                           double sigma_p, double hbar, double mass) {
    check_state_grid(domain);
    if (!(sigma_q > 0.0) || !(sigma_p > 0.0)) throw BadParams("gaussian widths must be positive");
    if (!(hbar > 0.0) || !(mass > 0.0)) throw BadParams("hbar and mass must be positive");
    Grid2D g = domain;
    for (int i = 0; i < g.nq; ++i) {
        const double uq = (g.q(i) - q0) / sigma_q;
        for (int j = 0; j < g.np; ++j) {
            const double up = (g.p(j) - p0) / sigma_p;
            g.at(i, j) = std::exp(-0.5 * (uq * uq + up * up));
        }
    }
    double total = 0.0;
    for (double v : g.values) total += v;
    total *= quad_weight(g);
    if (!(total > 0.0)) throw BadParams("gaussian underflows on this box");
    for (double& v : g.values) v /= total;
    return WignerState{std::move(g), hbar, mass, 0.0};
}

Grid2D partial_derivative(const Grid2D& g, int axis, int order, const RhsOptions& opt) {
    check_state_grid(g);
    if (axis != 0 && axis != 1) throw BadParams("axis must be 0 (q) or 1 (p)");
    if (order < 1) throw BadParams("derivative order must be >= 1");
    const int lines = (axis == 0) ? g.np : g.nq;
    const int len = (axis == 0) ? g.nq : g.np;
    const double dx = (axis == 0) ? g.dq() : g.dp();
    Grid2D out = g;

    if (opt.backend == DerivBackend::spectral) {
        const double period = dx * len;
#pragma omp parallel for schedule(static)
        for (int l = 0; l < lines; ++l) {
            std::vector<double> line(len);
            for (int k = 0; k < len; ++k) line[k] = (axis == 0) ? g.at(k, l) : g.at(l, k);
            auto d = fft_derivative(line, order, period);
            for (int k = 0; k < len; ++k) (axis == 0 ? out.at(k, l) : out.at(l, k)) = d[k];
        }
        return out;
    }

    const auto cc = connection_coefficients(make_filter(opt.filter), order);
#pragma omp parallel for schedule(static)
    for (int l = 0; l < lines; ++l) {
        std::vector<double> line(len);
        for (int k = 0; k < len; ++k) line[k] = (axis == 0) ? g.at(k, l) : g.at(l, k);
        auto d = apply_stencil(cc, line, dx);
        for (int k = 0; k < len; ++k) (axis == 0 ? out.at(k, l) : out.at(l, k)) = d[k];
    }
    return out;
}

Grid2D moyal_rhs(const WignerState& state, const PolynomialPotential& U, const RhsOptions& opt) {
    const Grid2D& g = state.grid;
    check_state_grid(g);

    // Transport: -(p/m) dW/dq.
    Grid2D out = partial_derivative(g, 0, 1, opt);
    for (int i = 0; i < g.nq; ++i)
        for (int j = 0; j < g.np; ++j) out.at(i, j) *= -g.p(j) / state.mass;

    // Odd-derivative potential series; terminates once U^(2l+1) vanishes.
    const int degree = U.degree();
    const int l_max = degree >= 1 ? (degree - 1) / 2 : -1;
    double coeff = 1.0;  // (-1)^l (hbar/2)^(2l) / (2l+1)!
    for (int l = 0; l <= l_max; ++l) {
        if (l > 0) {
            const double two_l = 2.0 * l;
            coeff *= -(state.hbar / 2.0) * (state.hbar / 2.0) / (two_l * (two_l + 1.0));
        }
        const int order = 2 * l + 1;
        const PolynomialPotential u_der = U.derivative(order);
        if (u_der.is_zero()) continue;
        const Grid2D dp_w = partial_derivative(g, 1, order, opt);
        for (int i = 0; i < g.nq; ++i) {
            const double f = coeff * u_der.value(g.q(i));
            for (int j = 0; j < g.np; ++j) out.at(i, j) += f * dp_w.at(i, j);
        }
    }
    return out;
}

Grid2D lindblad_rhs(const WignerState& state, const PolynomialPotential& U,
                    const LindbladParams& params, const RhsOptions& opt) {
    if (params.gamma < 0.0 || params.diffusion < 0.0)
        throw BadParams("damping and diffusion must be non-negative");
    Grid2D out = moyal_rhs(state, U, opt);
    const Grid2D& g = state.grid;
    if (params.gamma > 0.0) {
        Grid2D pw = g;
        for (int i = 0; i < g.nq; ++i)
            for (int j = 0; j < g.np; ++j) pw.at(i, j) *= g.p(j);
        const Grid2D div = partial_derivative(pw, 1, 1, opt);
        for (std::size_t k = 0; k < out.values.size(); ++k)
            out.values[k] += 2.0 * params.gamma * div.values[k];
    }
    if (params.diffusion > 0.0) {
        const Grid2D diff = partial_derivative(g, 1, 2, opt);
        for (std::size_t k = 0; k < out.values.size(); ++k)
            out.values[k] += params.diffusion * diff.values[k];
    }
    return out;
}

QuantumnessMetrics quantumness_metrics(const WignerState& state) {
    check_state_grid(state.grid);
    const double w = quad_weight(state.grid);
    double abs_sum = 0.0, sq_sum = 0.0, min_v = state.grid.values.front();
    for (double v : state.grid.values) {
        abs_sum += std::abs(v);
        sq_sum += v * v;
        min_v = std::min(min_v, v);
    }
    return QuantumnessMetrics{abs_sum * w - 1.0, 2.0 * std::numbers::pi * state.hbar * sq_sum * w,
                              min_v};
}

double state_mass(const WignerState& state) {
    double s = 0.0;
    for (double v : state.grid.values) s += v;
    return s * quad_weight(state.grid);
}

double state_l2(const WignerState& state) {
    double s = 0.0;
    for (double v : state.grid.values) s += v * v;
    return std::sqrt(s * quad_weight(state.grid));
}

double boundary_contamination(const WignerState& state) {
    const Grid2D& g = state.grid;
    check_state_grid(g);
    double edge = 0.0, peak = 0.0;
    for (int i = 0; i < g.nq; ++i)
        for (int j = 0; j < g.np; ++j) {
            const double a = std::abs(g.at(i, j));
            peak = std::max(peak, a);
            if (i == 0 || j == 0 || i == g.nq - 1 || j == g.np - 1) edge = std::max(edge, a);
        }
    return peak > 0.0 ? edge / peak : 0.0;
}

}  // namespace waveleton
