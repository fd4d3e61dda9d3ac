#include "waveleton/filters.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "waveleton/errors.hpp"

namespace waveleton {

namespace {

using cld = std::complex<long double>;

constexpr long double kSqrt2L = 1.41421356237309504880168872420969808L;

long double binomial(int n, int k) {
    long double v = 1.0L;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

// Halfband polynomial B(z) = 4^(M-1) * z^(M-1) * P(sin^2(w/2)) with
// P(y) = sum_k C(M-1+k, k) y^k and y = -(z-1)^2 / (4z). Integer
// coefficients, degree 2M-2; its roots come in reciprocal pairs.
std::vector<long double> halfband_poly(int M) {
    std::vector<long double> b(2 * M - 1, 0.0L);
    for (int k = 0; k <= M - 1; ++k) {
        long double ck = binomial(M - 1 + k, k);
        long double scale = ck * ((k % 2) ? -1.0L : 1.0L) *
                            std::pow(4.0L, static_cast<long double>(M - 1 - k));
        // (z-1)^(2k) * z^(M-1-k)
        for (int j = 0; j <= 2 * k; ++j) {
            long double c = binomial(2 * k, j) * (((2 * k - j) % 2) ? -1.0L : 1.0L);
            b[j + (M - 1 - k)] += scale * c;
        }
    }
    return b;
}

cld poly_eval(const std::vector<long double>& c, cld z) {
    cld v = 0.0L;
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) v = v * z + c[i];
    return v;
}

std::vector<long double> poly_derivative(const std::vector<long double>& c) {
    std::vector<long double> d(c.size() > 1 ? c.size() - 1 : 1, 0.0L);
    for (size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<long double>(i);
    return d;
}

std::vector<cld> polynomial_roots(const std::vector<long double>& coeffs) {
    int n = static_cast<int>(coeffs.size()) - 1;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i)
        companion(i, n - 1) = -static_cast<double>(coeffs[i] / coeffs[n]);
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
    auto d = poly_derivative(coeffs);
    std::vector<cld> roots;
    for (int i = 0; i < n; ++i) {
        cld z(es.eigenvalues()(i).real(), es.eigenvalues()(i).imag());
        for (int it = 0; it < 80; ++it) {
            cld f = poly_eval(coeffs, z);
            cld fp = poly_eval(d, z);
            if (std::abs(fp) == 0.0L) break;
            cld step = f / fp;
            z -= step;
            if (std::abs(step) < 1e-22L * (1.0L + std::abs(z))) break;
        }
        roots.push_back(z);
    }
    return roots;
}

// Orbit of roots under z -> 1/z and conjugation. Complex orbits hold a
// conjugate pair inside the unit circle and its reciprocal pair outside;
// real orbits hold one root inside and one outside.
struct RootOrbit {
    std::vector<cld> inside;
    std::vector<cld> outside;
};

std::vector<RootOrbit> group_orbits(std::vector<cld> roots) {
    std::vector<RootOrbit> orbits;
    std::vector<bool> used(roots.size(), false);
    auto find_nearest = [&](cld target) {
        int best = -1;
        long double bd = 1e30L;
        for (size_t i = 0; i < roots.size(); ++i) {
            if (used[i]) continue;
            long double d = std::abs(roots[i] - target);
            if (d < bd) { bd = d; best = static_cast<int>(i); }
        }
        return best;
    };
    // Deterministic order: by modulus, then argument.
    std::vector<int> order(roots.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        long double ma = std::abs(roots[a]), mb = std::abs(roots[b]);
        if (ma != mb) return ma < mb;
        return std::arg(roots[a]) < std::arg(roots[b]);
    });
    for (int idx : order) {
        if (used[idx]) continue;
        cld r = roots[idx];
        used[idx] = true;
        RootOrbit orbit;
        bool is_real = std::abs(r.imag()) < 1e-10L * (1.0L + std::abs(r));
        if (is_real) {
            r = cld(r.real(), 0.0L);
            int rec = find_nearest(1.0L / r);
            if (rec < 0) throw ConstructionFailure("halfband root pairing failed");
            used[rec] = true;
            cld rr = cld(roots[rec].real(), 0.0L);
            if (std::abs(r) < 1.0L) { orbit.inside = {r}; orbit.outside = {rr}; }
            else                    { orbit.inside = {rr}; orbit.outside = {r}; }
        } else {
            int conj_i = find_nearest(std::conj(r));
            if (conj_i < 0) throw ConstructionFailure("halfband root pairing failed");
            used[conj_i] = true;
            int rec = find_nearest(1.0L / r);
            if (rec < 0) throw ConstructionFailure("halfband root pairing failed");
            used[rec] = true;
            int rec_c = find_nearest(std::conj(1.0L / r));
            if (rec_c < 0) throw ConstructionFailure("halfband root pairing failed");
            used[rec_c] = true;
            cld a = r, b = roots[rec];
            if (std::abs(a) < 1.0L) {
                orbit.inside = {a, std::conj(a)};
                orbit.outside = {b, std::conj(b)};
            } else {
                orbit.inside = {b, std::conj(b)};
                orbit.outside = {a, std::conj(a)};
            }
        }
        orbits.push_back(orbit);
    }
    return orbits;
}

// h from a root selection: h = sqrt2 * coeffs of ((1+z)/2)^M * Q(z)/Q(1).
std::vector<long double> filter_from_roots(int M, const std::vector<cld>& sel) {
    std::vector<cld> q{1.0L};
    for (cld r : sel) {
        std::vector<cld> next(q.size() + 1, cld(0.0L));
        for (size_t i = 0; i < q.size(); ++i) {
            next[i] += q[i] * (-r);
            next[i + 1] += q[i];
        }
        q = next;
    }
    cld q1 = 0.0L;
    for (auto& c : q) q1 += c;
    std::vector<long double> h(2 * M, 0.0L);
    for (int j = 0; j <= M; ++j) {
        long double bincoef = binomial(M, j) / std::pow(2.0L, static_cast<long double>(M));
        for (size_t i = 0; i < q.size(); ++i)
            h[j + i] += bincoef * (q[i] / q1).real();
    }
    for (auto& v : h) v *= kSqrt2L;
    return h;
}

// Gauss-Newton polish of the defining system in long double:
// orthonormality (M rows), alternating moments (M rows), sum (1 row).
void polish_filter(std::vector<long double>& h, int M) {
    using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const int L = 2 * M;
    for (int iter = 0; iter < 60; ++iter) {
        VecL F(2 * M + 1);
        MatL J = MatL::Zero(2 * M + 1, L);
        for (int m = 0; m < M; ++m) {
            long double s = 0.0L;
            for (int k = 0; k + 2 * m < L; ++k) s += h[k] * h[k + 2 * m];
            F(m) = s - (m == 0 ? 1.0L : 0.0L);
            for (int k = 0; k + 2 * m < L; ++k) {
                J(m, k) += h[k + 2 * m];
                J(m, k + 2 * m) += h[k];
            }
        }
        for (int m = 0; m < M; ++m) {
            long double s = 0.0L;
            for (int k = 0; k < L; ++k) {
                long double w = ((k % 2) ? -1.0L : 1.0L) *
                                std::pow(static_cast<long double>(k), static_cast<long double>(m));
                if (k == 0 && m == 0) w = 1.0L;
                s += w * h[k];
                J(M + m, k) = w;
            }
            F(M + m) = s;
        }
        long double sum = 0.0L;
        for (int k = 0; k < L; ++k) { sum += h[k]; J(2 * M, k) = 1.0L; }
        F(2 * M) = sum - kSqrt2L;

        // Equilibrate: moment rows carry weights up to k^(M-1), which would
        // otherwise swamp the normal equations.
        for (int i = 0; i < 2 * M + 1; ++i) {
            long double w = J.row(i).template lpNorm<Eigen::Infinity>();
            if (w > 0.0L) { J.row(i) /= w; F(i) /= w; }
        }
        MatL jtj = J.transpose() * J;
        VecL jtf = J.transpose() * F;
        VecL step = jtj.ldlt().solve(jtf);
        for (int k = 0; k < L; ++k) h[k] -= step(k);
        if (F.template lpNorm<Eigen::Infinity>() < 1e-19L) break;
    }
}

std::vector<double> highpass_from(const std::vector<double>& h) {
    int L = static_cast<int>(h.size());
    std::vector<double> g(L);
    for (int k = 0; k < L; ++k) g[k] = ((k % 2) ? -1.0 : 1.0) * h[L - 1 - k];
    return g;
}

// Energy-center canonical orientation: extremal-phase filters carry their
// mass up front.
void canonicalize(std::vector<long double>& h) {
    long double com = 0.0L, e = 0.0L;
    for (size_t k = 0; k < h.size(); ++k) {
        com += static_cast<long double>(k) * h[k] * h[k];
        e += h[k] * h[k];
    }
    if (com / e > static_cast<long double>(h.size() - 1) / 2.0L)
        std::reverse(h.begin(), h.end());
}

WaveletFilter assemble(WaveletFamily fam, int M, std::vector<long double> hl) {
    canonicalize(hl);
    polish_filter(hl, M);
    WaveletFilter f;
    f.family = fam;
    f.order = M;
    f.h.assign(hl.begin(), hl.end());
    f.g = highpass_from(f.h);
    FilterResiduals r = filter_residuals(f);
    if (r.sum > 1e-12 || r.orthonormality > 1e-12 || r.moments > 1e-10)
        throw ConstructionFailure("filter residuals out of tolerance for order " +
                                  std::to_string(M));
    return f;
}

}  // namespace

std::string family_name(WaveletFamily f) {
    switch (f) {
        case WaveletFamily::haar: return "haar";
        case WaveletFamily::daubechies: return "daubechies";
        case WaveletFamily::symmlet: return "symmlet";
    }
    return "?";
}

double phase_nonlinearity(const std::vector<double>& h) {
    const int n = 512;
    const double wmax = 0.95 * std::numbers::pi;
    std::vector<double> phase(n);
    double prev = 0.0, offset = 0.0;
    for (int i = 0; i < n; ++i) {
        double w = wmax * (i + 1) / n;
        std::complex<double> m0(0.0, 0.0);
        for (size_t k = 0; k < h.size(); ++k)
            m0 += h[k] * std::exp(std::complex<double>(0.0, -w * static_cast<double>(k)));
        double ph = std::arg(m0) + offset;
        while (ph - prev > std::numbers::pi) { ph -= 2 * std::numbers::pi; offset -= 2 * std::numbers::pi; }
        while (ph - prev < -std::numbers::pi) { ph += 2 * std::numbers::pi; offset += 2 * std::numbers::pi; }
        phase[i] = ph;
        prev = ph;
    }
    double sww = 0.0, swp = 0.0;
    for (int i = 0; i < n; ++i) {
        double w = wmax * (i + 1) / n;
        sww += w * w;
        swp += w * phase[i];
    }
    double slope = swp / sww;
    double dev = 0.0;
    for (int i = 0; i < n; ++i) {
        double w = wmax * (i + 1) / n;
        dev = std::max(dev, std::abs(phase[i] - slope * w));
    }
    return dev;
}

WaveletFilter make_filter(WaveletFamily family, int order) {
    if (family == WaveletFamily::haar) {
        if (order != 1)
            throw UnsupportedOrder("haar has order 1");
        WaveletFilter f;
        f.family = family;
        f.order = 1;
        f.h = {1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2};
        f.g = highpass_from(f.h);
        return f;
    }
    if (order < 2 || order > 10)
        throw UnsupportedOrder(family_name(family) + " order must be in [2, 10], got " +
                               std::to_string(order));
    const int M = order;
    auto roots = polynomial_roots(halfband_poly(M));
    auto orbits = group_orbits(roots);

    if (family == WaveletFamily::daubechies) {
        std::vector<cld> sel;
        for (auto& o : orbits) sel.insert(sel.end(), o.inside.begin(), o.inside.end());
        return assemble(family, M, filter_from_roots(M, sel));
    }

    // Symmlet: search all inside/outside assignments for the flattest phase.
    const int n_orbits = static_cast<int>(orbits.size());
    double best_dev = 1e300;
    std::vector<long double> best_h;
    for (unsigned mask = 0; mask < (1u << n_orbits); ++mask) {
        std::vector<cld> sel;
        for (int i = 0; i < n_orbits; ++i) {
            const auto& side = (mask >> i & 1u) ? orbits[i].outside : orbits[i].inside;
            sel.insert(sel.end(), side.begin(), side.end());
        }
        auto hl = filter_from_roots(M, sel);
        std::vector<double> hd(hl.begin(), hl.end());
        double dev = phase_nonlinearity(hd);
        if (dev < best_dev - 1e-12) {
            best_dev = dev;
            best_h = hl;
        }
    }
    return assemble(family, M, best_h);
}

WaveletFilter make_filter(const std::string& name) {
    if (name == "haar") return make_filter(WaveletFamily::haar, 1);
    auto parse_order = [&](size_t prefix) {
        int v = 0;
        for (size_t i = prefix; i < name.size(); ++i) {
            if (name[i] < '0' || name[i] > '9')
                throw BadValue("bad filter name: " + name);
            v = v * 10 + (name[i] - '0');
        }
        if (name.size() == prefix) throw BadValue("bad filter name: " + name);
        return v;
    };
    if (name.rfind("daubechies", 0) == 0)
        return make_filter(WaveletFamily::daubechies, parse_order(10));
    if (name.rfind("db", 0) == 0)
        return make_filter(WaveletFamily::daubechies, parse_order(2));
    if (name.rfind("symmlet", 0) == 0)
        return make_filter(WaveletFamily::symmlet, parse_order(7));
    if (name.rfind("sym", 0) == 0)
        return make_filter(WaveletFamily::symmlet, parse_order(3));
    throw BadValue("unknown filter name: " + name +
                   " (expected haar, dbN/daubechiesN, symN/symmletN)");
}

FilterResiduals filter_residuals(const WaveletFilter& f) {
    const int L = f.length();
    const int M = f.order;
    FilterResiduals r{0.0, 0.0, 0.0};
    // The moment sums cancel across eleven orders of magnitude at high M, so
    // accumulate in extended precision; the residual is a statement about the
    // stored coefficients, not about double-precision summation error.
    long double sum = 0.0L;
    for (double v : f.h) sum += static_cast<long double>(v);
    r.sum = static_cast<double>(std::abs(sum - kSqrt2L));
    for (int m = 0; m < M; ++m) {
        long double s = 0.0L;
        for (int k = 0; k + 2 * m < L; ++k)
            s += static_cast<long double>(f.h[k]) * static_cast<long double>(f.h[k + 2 * m]);
        s -= (m == 0 ? 1.0L : 0.0L);
        r.orthonormality = std::max(r.orthonormality, static_cast<double>(std::abs(s)));
    }
    for (int m = 0; m < M; ++m) {
        long double s = 0.0L, gross = 0.0L;
        for (int k = 0; k < L; ++k) {
            long double t = static_cast<long double>(f.g[k]) *
                            std::pow(static_cast<long double>(k), static_cast<long double>(m));
            s += t;
            gross += std::abs(t);
        }
        // Relative to the gross magnitude: the raw sum spans eleven orders of
        // magnitude across m, so an absolute gate would say nothing about how
        // completely the terms cancel.
        r.moments = std::max(r.moments, static_cast<double>(std::abs(s) / std::max(gross, 1.0L)));
    }
    return r;
}

ScalingSamples cascade_eval(const WaveletFilter& f, int dyadic_depth) {
    if (dyadic_depth < 1 || dyadic_depth > 16)
        throw BadParams("dyadic_depth must be in [1, 16]");
    const int L = f.length();
    const int S = L - 1;  // support length
    ScalingSamples out;
    out.depth = dyadic_depth;
    out.dx = std::ldexp(1.0, -dyadic_depth);

    if (f.family == WaveletFamily::haar) {
        int n = (1 << dyadic_depth) + 1;
        out.phi.assign(n, 1.0);
        out.phi.back() = 0.0;
        out.psi.assign(n, 0.0);
        for (int m = 0; m < n - 1; ++m)
            out.psi[m] = (2 * m < n - 1) ? 1.0 : -1.0;
        return out;
    }

    // Integer samples: eigenvector of T_{ij} = sqrt2 * h[2i-j] at eigenvalue 1.
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(L, L);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) {
            int k = 2 * i - j;
            if (k >= 0 && k < L) T(i, j) = std::numbers::sqrt2 * f.h[k];
        }
    Eigen::EigenSolver<Eigen::MatrixXd> es(T);
    int best = -1;
    double bd = 1e300;
    for (int i = 0; i < L; ++i) {
        double d = std::abs(es.eigenvalues()(i) - std::complex<double>(1.0, 0.0));
        if (d < bd) { bd = d; best = i; }
    }
    if (best < 0 || bd > 1e-8)
        throw ConstructionFailure("refinement matrix has no eigenvalue 1");
    Eigen::VectorXcd vc = es.eigenvectors().col(best);
    int imax = 0;
    for (int i = 1; i < L; ++i)
        if (std::abs(vc(i)) > std::abs(vc(imax))) imax = i;
    Eigen::VectorXd v(L);
    for (int i = 0; i < L; ++i) v(i) = (vc(i) / vc(imax)).real();
    double s = v.sum();
    v /= s;  // partition of unity at the integers

    // Two-scale refinement down to the requested depth; keep the previous
    // level for psi.
    std::vector<double> cur(v.data(), v.data() + L);  // spacing 1, indices 0..S
    std::vector<double> prev;
    for (int d = 1; d <= dyadic_depth; ++d) {
        prev = cur;
        int n_prev = S * (1 << (d - 1));
        int n_cur = S * (1 << d);
        std::vector<double> next(n_cur + 1, 0.0);
        for (int m = 0; m <= n_cur; ++m) {
            // phi(m / 2^d) = sqrt2 * sum_k h_k phi(m / 2^(d-1) - k)
            double acc = 0.0;
            for (int k = 0; k < L; ++k) {
                int idx = m - k * (1 << (d - 1));
                if (idx >= 0 && idx <= n_prev) acc += f.h[k] * prev[idx];
            }
            next[m] = std::numbers::sqrt2 * acc;
        }
        cur = std::move(next);
    }
    out.phi = cur;

    int n_prev = S * (1 << (dyadic_depth - 1));
    int n_out = S * (1 << dyadic_depth);
    out.psi.assign(n_out + 1, 0.0);
    for (int m = 0; m <= n_out; ++m) {
        double acc = 0.0;
        for (int k = 0; k < L; ++k) {
            int idx = m - k * (1 << (dyadic_depth - 1));
            if (idx >= 0 && idx <= n_prev) acc += f.g[k] * prev[idx];
        }
        out.psi[m] = std::numbers::sqrt2 * acc;
    }
    return out;
}

}  // namespace waveleton
