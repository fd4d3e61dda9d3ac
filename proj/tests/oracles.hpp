#pragma once

// Independent reference implementations used to pin expected values in the
// test suites. These deliberately avoid the library's own code paths.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

// Deterministic uniform doubles in [0, 1): raw mt19937_64 draws mapped via
// (x >> 11) * 2^-53 (distribution classes are implementation-defined).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::vector<double> signal(int n, double lo = -1.0, double hi = 1.0) {
        std::vector<double> s(n);
        for (auto& v : s) v = uniform(lo, hi);
        return s;
    }

  private:
    // splitmix64; tiny, fully specified, platform-independent
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t state_;
};

// Closed-form order-2 extremal-phase low-pass filter.
inline std::vector<double> db2_closed_form() {
    const double s3 = std::sqrt(3.0);
    const double d = 4.0 * std::numbers::sqrt2;
    return {(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d};
}

inline double l2_norm(const std::vector<double>& v) {
    double e = 0.0;
    for (double x : v) e += x * x;
    return std::sqrt(e);
}

inline double rel_l2_error(const std::vector<double>& got, const std::vector<double>& want) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < got.size(); ++i) {
        num += (got[i] - want[i]) * (got[i] - want[i]);
        den += want[i] * want[i];
    }
    return std::sqrt(num / den);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double trapezoid(const std::vector<double>& v, double dx) {
    double s = 0.5 * (v.front() + v.back());
    for (size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
    return s * dx;
}

// Periodic spectral derivative on n uniform samples of [0, domain_len):
// own FFT calls, independent of the library's derivative paths.
inline std::vector<double> spectral_derivative(const std::vector<double>& f, int order,
                                               double domain_len) {
    const int n = static_cast<int>(f.size());
    std::vector<std::complex<double>> buf(n);
    for (int i = 0; i < n; ++i) buf[i] = f[i];
    fftw_plan fwd = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf.data()),
                                     reinterpret_cast<fftw_complex*>(buf.data()),
                                     FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(fwd);
    fftw_destroy_plan(fwd);
    for (int k = 0; k < n; ++k) {
        int kk = k <= n / 2 ? k : k - n;
        if (k == n / 2 && order % 2 == 1) kk = 0;  // drop the unmatched Nyquist mode
        std::complex<double> ik(0.0, 2.0 * std::numbers::pi * kk / domain_len);
        std::complex<double> mult = 1.0;
        for (int o = 0; o < order; ++o) mult *= ik;
        buf[k] *= mult / static_cast<double>(n);
    }
    fftw_plan bwd = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf.data()),
                                     reinterpret_cast<fftw_complex*>(buf.data()),
                                     FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(bwd);
    fftw_destroy_plan(bwd);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = buf[i].real();
    return out;
}

// Physicists' Hermite polynomial H_n(x) by recurrence.
inline double hermite(int n, double x) {
    double h0 = 1.0, h1 = 2.0 * x;
    if (n == 0) return h0;
    if (n == 1) return h1;
    for (int k = 2; k <= n; ++k) {
        double h2 = 2.0 * x * h1 - 2.0 * (k - 1) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

// Harmonic-oscillator eigenstate psi_n on a q grid (mass m, frequency w).
inline std::vector<std::complex<double>> oscillator_state(int n, int nq, double qmin,
                                                          double dq, double hbar,
                                                          double m, double w) {
    std::vector<std::complex<double>> psi(nq);
    const double alpha = m * w / hbar;
    double fact = 1.0;
    for (int k = 2; k <= n; ++k) fact *= k;
    const double norm =
        std::pow(alpha / std::numbers::pi, 0.25) / std::sqrt(std::pow(2.0, n) * fact);
    for (int i = 0; i < nq; ++i) {
        double q = qmin + i * dq;
        psi[i] = norm * hermite(n, std::sqrt(alpha) * q) * std::exp(-0.5 * alpha * q * q);
    }
    return psi;
}

// Laguerre polynomial L_n(x).
inline double laguerre(int n, double x) {
    double l0 = 1.0, l1 = 1.0 - x;
    if (n == 0) return l0;
    if (n == 1) return l1;
    for (int k = 2; k <= n; ++k) {
        double l2 = ((2.0 * k - 1.0 - x) * l1 - (k - 1.0) * l0) / k;
        l0 = l1;
        l1 = l2;
    }
    return l1;
}

// Phase-space density of the n-th oscillator eigenstate:
// W_n = (-1)^n / (pi hbar) L_n(2u) exp(-u), u = 2H / (hbar w).
inline double oscillator_wigner(int n, double q, double p, double hbar, double m, double w) {
    double u = (m * w * q * q + p * p / (m * w)) / hbar;
    double sign = (n % 2) ? -1.0 : 1.0;
    return sign / (std::numbers::pi * hbar) * laguerre(n, 2.0 * u) * std::exp(-u);
}

}  // namespace oracle
