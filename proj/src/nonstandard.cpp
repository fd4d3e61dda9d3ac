#include "waveleton/nonstandard.hpp"

#include <cmath>
#include <string>

#include "waveleton/errors.hpp"

namespace waveleton {

namespace {

// Sparse view keeping the exact nonzero pattern: entries outside the band of
// a local operator come out as exact 0.0 from the conjugation products.
Eigen::SparseMatrix<double> sparsify(const Eigen::MatrixXd& m) {
    Eigen::SparseMatrix<double> s = m.sparseView(0.0, 0.0);
    s.makeCompressed();
    return s;
}

// One analysis step as a pair of decimated periodic convolution matrices:
// H maps length-m coarse data to m/2 next-coarse, G to m/2 detail.
void analysis_matrices(const WaveletFilter& f, int m, Eigen::MatrixXd& H, Eigen::MatrixXd& G) {
    const int L = f.length();
    H = Eigen::MatrixXd::Zero(m / 2, m);
    G = Eigen::MatrixXd::Zero(m / 2, m);
    for (int i = 0; i < m / 2; ++i)
        for (int k = 0; k < L; ++k) {
            int col = (2 * i + k) % m;
            H(i, col) += f.h[static_cast<size_t>(k)];
            G(i, col) += f.g[static_cast<size_t>(k)];
        }
}

}  // namespace

std::size_t NonStandardForm::nonzeros() const {
    std::size_t n = static_cast<std::size_t>(coarse.nonZeros());
    for (const auto& b : blocks)
        n += static_cast<std::size_t>(b.A.nonZeros() + b.B.nonZeros() + b.G.nonZeros());
    return n;
}

Eigen::MatrixXd derivative_matrix(int grid_length, const ConnectionCoefficients& cc, double dx) {
    if (grid_length < 1 || dx <= 0.0) throw BadParams("need a nonempty grid and positive spacing");
    const int K = cc.half_support;
    const double inv = std::pow(dx, -cc.derivative_order);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(grid_length, grid_length);
    for (int i = 0; i < grid_length; ++i)
        for (int l = -K; l <= K; ++l)
            T(i, ((i - l) % grid_length + grid_length) % grid_length) += cc.at(l) * inv;
    return T;
}

Eigen::MatrixXd kernel_matrix(int grid_length, double domain_length,
                              const std::function<double(double, double)>& kernel) {
    if (grid_length < 1 || domain_length <= 0.0)
        throw BadParams("need a nonempty grid and positive domain length");
    const double dx = domain_length / grid_length;
    Eigen::MatrixXd T(grid_length, grid_length);
    for (int i = 0; i < grid_length; ++i)
        for (int j = 0; j < grid_length; ++j) T(i, j) = dx * kernel(i * dx, j * dx);
    return T;
}

NonStandardForm build_nonstandard_form(const Eigen::MatrixXd& dense, const WaveletFilter& f,
                                       int levels) {
    const int n = static_cast<int>(dense.rows());
    if (dense.cols() != n) throw ShapeMismatch("operator matrix must be square");
    if (levels < 1) throw BadParams("levels must be >= 1");
    if ((n & (n - 1)) != 0) throw ShapeMismatch("grid length must be a power of two");
    if (static_cast<long>(n) < (1L << levels) * f.support_length())
        throw ShapeMismatch("grid too short: need length >= 2^levels * filter support, got " +
                            std::to_string(n));

    NonStandardForm nsf;
    nsf.grid_length = n;
    nsf.levels = levels;
    nsf.filter = f;
    nsf.blocks.reserve(static_cast<size_t>(levels));

    Eigen::MatrixXd T = dense;
    for (int j = 1; j <= levels; ++j) {
        const int m = static_cast<int>(T.rows());
        Eigen::MatrixXd H, G;
        analysis_matrices(f, m, H, G);
        Eigen::MatrixXd TH = T * H.transpose();
        Eigen::MatrixXd TG = T * G.transpose();
        OperatorBlocks b;
        b.A = sparsify(G * TG);
        b.B = sparsify(G * TH);
        b.G = sparsify(H * TG);
        nsf.blocks.push_back(std::move(b));
        T = H * TH;  // coarse-on-coarse continues to the next level
    }
    nsf.coarse = sparsify(T);
    return nsf;
}

Signal apply_nonstandard(const NonStandardForm& nsf, const Signal& s) {
    if (static_cast<int>(s.size()) != nsf.grid_length)
        throw ShapeMismatch("input length " + std::to_string(s.size()) +
                            " does not match NSF grid " + std::to_string(nsf.grid_length));
    // analysis pass, keeping the coarse and detail vectors of every level
    std::vector<Signal> cs, ds;
    cs.reserve(static_cast<size_t>(nsf.levels) + 1);
    ds.reserve(static_cast<size_t>(nsf.levels));
    cs.push_back(s);
    for (int j = 1; j <= nsf.levels; ++j) {
        auto [a, d] = dwt_step(cs.back(), nsf.filter);
        cs.push_back(std::move(a));
        ds.push_back(std::move(d));
    }

    auto to_vec = [](const Signal& x) {
        return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<long>(x.size()));
    };

    // coarsest contribution, then reassemble level by level
    Eigen::VectorXd y = nsf.coarse * to_vec(cs[static_cast<size_t>(nsf.levels)]);
    for (int j = nsf.levels; j >= 1; --j) {
        const auto& b = nsf.blocks[static_cast<size_t>(j - 1)];
        y += b.G * to_vec(ds[static_cast<size_t>(j - 1)]);
        Eigen::VectorXd od = b.A * to_vec(ds[static_cast<size_t>(j - 1)]) +
                             b.B * to_vec(cs[static_cast<size_t>(j)]);
        Signal yc(y.data(), y.data() + y.size());
        Signal yd(od.data(), od.data() + od.size());
        Signal up = idwt_step(yc, yd, nsf.filter);
        y = Eigen::Map<Eigen::VectorXd>(up.data(), static_cast<long>(up.size()));
    }
    return Signal(y.data(), y.data() + y.size());
}

ThresholdResult threshold_nonstandard(const NonStandardForm& nsf, double eps) {
    if (eps < 0.0) throw BadParams("threshold must be nonnegative");
    ThresholdResult out;
    out.nsf.grid_length = nsf.grid_length;
    out.nsf.levels = nsf.levels;
    out.nsf.filter = nsf.filter;
    out.stats.nonzeros_before = nsf.nonzeros();
    double dropped_sq = 0.0;
    auto cut = [&](const Eigen::SparseMatrix<double>& m) {
        Eigen::SparseMatrix<double> r(m.rows(), m.cols());
        std::vector<Eigen::Triplet<double>> keep;
        keep.reserve(static_cast<size_t>(m.nonZeros()));
        for (int k = 0; k < m.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
                if (std::abs(it.value()) < eps)
                    dropped_sq += it.value() * it.value();
                else
                    keep.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                      it.value());
            }
        r.setFromTriplets(keep.begin(), keep.end());
        r.makeCompressed();
        return r;
    };
    for (const auto& b : nsf.blocks)
        out.nsf.blocks.push_back({cut(b.A), cut(b.B), cut(b.G)});
    out.nsf.coarse = cut(nsf.coarse);
    out.stats.nonzeros_after = out.nsf.nonzeros();
    out.stats.max_apply_error_bound = std::sqrt(dropped_sq);
    return out;
}

}  // namespace waveleton
