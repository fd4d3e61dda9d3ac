#include "waveleton/connection.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "waveleton/errors.hpp"

namespace waveleton {

ConnectionCoefficients connection_coefficients(const WaveletFilter& f, int n) {
    if (n < 1) throw BadParams("derivative order must be >= 1");
    const int M = f.order;
    const int need = (n + 1 + 1) / 2 + 1;  // ceil((n+1)/2) + 1
    if (M < need)
        throw InsufficientRegularity("order-" + std::to_string(M) +
                                     " filter is too rough for derivative order " +
                                     std::to_string(n) + " (need M >= " + std::to_string(need) +
                                     ")");
    const int L = f.length();
    const int K = L - 2;
    const int dim = 2 * K + 1;

    // Autocorrelation a_m = sum_j h_j h_{j+m}; even lags vanish except a_0 = 1.
    std::vector<double> a(static_cast<size_t>(2 * L - 1), 0.0);
    for (int m = -(L - 1); m <= L - 1; ++m) {
        double s = 0.0;
        for (int j = 0; j < L; ++j) {
            int jj = j + m;
            if (jj >= 0 && jj < L) s += f.h[j] * f.h[jj];
        }
        a[static_cast<size_t>(m + L - 1)] = s;
    }

    const double twon = std::ldexp(1.0, n);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
    for (int l = -K; l <= K; ++l)
        for (int m = -(L - 1); m <= L - 1; ++m) {
            if (m != 0 && m % 2 == 0) continue;  // even lags are structurally zero
            int tgt = 2 * l + m;
            if (tgt < -K || tgt > K) continue;
            A(l + K, tgt + K) += twon * a[static_cast<size_t>(m + L - 1)];
        }

    // Null space of (A - I): exactly one dimension of scaling freedom.
    Eigen::MatrixXd B = A - Eigen::MatrixXd::Identity(dim, dim);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double tol = 1e-10 * sv(0);
    int null_dim = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) < tol) ++null_dim;
    if (null_dim != 1)
        throw SingularSystem("two-scale system has a " + std::to_string(null_dim) +
                             "-dimensional null space (expected 1)");
    Eigen::VectorXd v = svd.matrixV().col(dim - 1);

    // Fix the scale so the stencil differentiates t^n exactly.
    double mom = 0.0;
    for (int l = -K; l <= K; ++l) mom += std::pow(static_cast<double>(l), n) * v(l + K);
    if (std::abs(mom) < 1e-12 * v.norm())
        throw SingularSystem("null vector has vanishing order-n moment; cannot normalize");
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    const double scale = ((n % 2) ? -fact : fact) / mom;

    ConnectionCoefficients cc;
    cc.derivative_order = n;
    cc.filter = f;
    cc.half_support = K;
    cc.r.resize(static_cast<size_t>(dim));
    const double parity = (n % 2) ? -1.0 : 1.0;
    for (int l = 0; l <= K; ++l) {
        // enforce the exact parity the true solution carries
        double sym = 0.5 * (v(l + K) * scale + parity * v(-l + K) * scale);
        cc.r[static_cast<size_t>(l + K)] = sym;
        cc.r[static_cast<size_t>(-l + K)] = parity * sym;
    }
    return cc;
}

Signal apply_stencil(const ConnectionCoefficients& cc, const Signal& s, double dx) {
    if (dx <= 0.0) throw BadParams("grid spacing must be positive");
    const int n = static_cast<int>(s.size());
    const int K = cc.half_support;
    Signal out(s.size(), 0.0);
    const double inv = std::pow(dx, -cc.derivative_order);
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int l = -K; l <= K; ++l) acc += cc.at(l) * s[static_cast<size_t>(((k - l) % n + n) % n)];
        out[static_cast<size_t>(k)] = acc * inv;
    }
    return out;
}

}  // namespace waveleton
