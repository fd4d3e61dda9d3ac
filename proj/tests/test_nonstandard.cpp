#include "waveleton/nonstandard.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "waveleton/connection.hpp"
#include "waveleton/errors.hpp"
#include "waveleton/filters.hpp"

using namespace waveleton;

namespace {

double sparse_max_abs(const Eigen::SparseMatrix<double>& m) {
    double mx = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
            mx = std::max(mx, std::abs(it.value()));
    return mx;
}

Signal dense_apply(const Eigen::MatrixXd& T, const Signal& s) {
    Eigen::VectorXd y = T * Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<long>(s.size()));
    return Signal(y.data(), y.data() + y.size());
}

}  // namespace

TEST_CASE("identity operator splits into identity blocks") {
    auto f = make_filter("db2");
    const int n = 64;
    auto nsf = build_nonstandard_form(Eigen::MatrixXd::Identity(n, n), f, 3);
    for (const auto& b : nsf.blocks) {
        Eigen::MatrixXd a = Eigen::MatrixXd(b.A);
        CHECK((a - Eigen::MatrixXd::Identity(a.rows(), a.cols())).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(sparse_max_abs(b.B) < 1e-12);
        CHECK(sparse_max_abs(b.G) < 1e-12);
    }
    Eigen::MatrixXd c = Eigen::MatrixXd(nsf.coarse);
    CHECK((c - Eigen::MatrixXd::Identity(c.rows(), c.cols())).cwiseAbs().maxCoeff() < 1e-12);
    oracle::Rng rng(3);
    auto x = rng.signal(n);
    CHECK(oracle::max_abs_diff(apply_nonstandard(nsf, x), x) < 1e-12);
}

TEST_CASE("zero operator stays zero") {
    auto f = make_filter("db2");
    auto nsf = build_nonstandard_form(Eigen::MatrixXd::Zero(32, 32), f, 2);
    oracle::Rng rng(4);
    for (double v : apply_nonstandard(nsf, rng.signal(32))) CHECK(v == 0.0);
}

TEST_CASE("multiscale application equals the dense product for generic operators") {
    oracle::Rng rng(0xfeed);
    struct Case {
        const char* name;
        int n, levels;
    };
    for (auto [name, n, levels] :
         {Case{"db2", 64, 3}, Case{"db5", 128, 3}, Case{"sym4", 64, 3}, Case{"haar", 32, 5}}) {
        CAPTURE(name);
        CAPTURE(levels);
        auto f = make_filter(name);
        Eigen::MatrixXd T(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) T(i, j) = rng.uniform(-1.0, 1.0);
        auto nsf = build_nonstandard_form(T, f, levels);
        for (int trial = 0; trial < 3; ++trial) {
            auto x = rng.signal(n);
            auto want = dense_apply(T, x);
            auto got = apply_nonstandard(nsf, x);
            double scale = oracle::l2_norm(want);
            CHECK(oracle::max_abs_diff(got, want) < 1e-10 * std::max(scale, 1.0));
        }
    }
}

TEST_CASE("derivative form recovers the analytic derivative of a sine") {
    auto f = make_filter("db3");
    const int n = 256;
    const double dx = 1.0 / n;
    auto cc = connection_coefficients(f, 1);
    auto nsf = build_nonstandard_form(derivative_matrix(n, cc, dx), f, 4);
    Signal x(n), want(n);
    for (int i = 0; i < n; ++i) {
        x[i] = std::sin(2.0 * std::numbers::pi * i * dx);
        want[i] = 2.0 * std::numbers::pi * std::cos(2.0 * std::numbers::pi * i * dx);
    }
    auto got = apply_nonstandard(nsf, x);
    CHECK(oracle::rel_l2_error(got, want) < 1e-5);
}

TEST_CASE("derivative blocks are banded with exact zeros beyond the filter span") {
    auto f = make_filter("db3");
    const int n = 256;
    const int L = f.length();
    auto cc = connection_coefficients(f, 1);
    auto nsf = build_nonstandard_form(derivative_matrix(n, cc, 1.0 / n), f, 3);
    auto band_violation = [&](const Eigen::SparseMatrix<double>& m) {
        double worst = 0.0;
        const int rows = static_cast<int>(m.rows());
        for (int k = 0; k < m.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
                int d = std::abs(static_cast<int>(it.row()) - static_cast<int>(it.col()));
                d = std::min(d, rows - d);  // periodic band distance
                if (d > L) worst = std::max(worst, std::abs(it.value()));
            }
        return worst;
    };
    for (const auto& b : nsf.blocks) {
        CHECK(band_violation(b.A) < 1e-12);
        CHECK(band_violation(b.B) < 1e-12);
        CHECK(band_violation(b.G) < 1e-12);
    }
}

TEST_CASE("kernel operators pass through the form unchanged") {
    auto f = make_filter("sym5");
    const int n = 128;
    auto K = [](double x, double y) { return std::exp(std::cos(2.0 * std::numbers::pi * (x - y))); };
    Eigen::MatrixXd T = kernel_matrix(n, 1.0, K);
    auto nsf = build_nonstandard_form(T, f, 3);
    oracle::Rng rng(11);
    auto x = rng.signal(n);
    auto want = dense_apply(T, x);
    CHECK(oracle::max_abs_diff(apply_nonstandard(nsf, x), want) <
          1e-10 * std::max(oracle::l2_norm(want), 1.0));
}

TEST_CASE("thresholding trades entries for a certified error bound") {
    auto f = make_filter("db3");
    const int n = 512;
    auto cc = connection_coefficients(f, 1);
    auto nsf = build_nonstandard_form(derivative_matrix(n, cc, 1.0 / n), f, 5);

    auto keep_all = threshold_nonstandard(nsf, 0.0);
    CHECK(keep_all.stats.nonzeros_after == keep_all.stats.nonzeros_before);
    CHECK(keep_all.stats.max_apply_error_bound == 0.0);

    auto drop_all = threshold_nonstandard(nsf, 1e30);
    CHECK(drop_all.stats.nonzeros_after == 0);
    oracle::Rng rng(21);
    auto x = rng.signal(n);
    for (double v : apply_nonstandard(drop_all.nsf, x)) CHECK(v == 0.0);

    auto t = threshold_nonstandard(nsf, 1e-8);
    CHECK(t.stats.nonzeros_after < t.stats.nonzeros_before);
    auto want = apply_nonstandard(nsf, x);
    auto got = apply_nonstandard(t.nsf, x);
    double err = 0.0;
    for (size_t i = 0; i < x.size(); ++i) err += (want[i] - got[i]) * (want[i] - got[i]);
    err = std::sqrt(err);
    CHECK(err < 1e-6 * oracle::l2_norm(want));
    // the Frobenius bound certifies the observed deviation
    CHECK(err <= t.stats.max_apply_error_bound * oracle::l2_norm(x) + 1e-14);
}

TEST_CASE("shape guards") {
    auto f = make_filter("db3");
    CHECK_THROWS_AS(build_nonstandard_form(Eigen::MatrixXd::Identity(64, 64), f, 4),
                    ShapeMismatch);  // needs 2^4 * 5 = 80 points
    CHECK_THROWS_AS(build_nonstandard_form(Eigen::MatrixXd::Identity(96, 96), f, 2),
                    ShapeMismatch);  // not a power of two
    CHECK_THROWS_AS(build_nonstandard_form(Eigen::MatrixXd::Zero(64, 32), f, 2), ShapeMismatch);
    auto nsf = build_nonstandard_form(Eigen::MatrixXd::Identity(64, 64), f, 2);
    CHECK_THROWS_AS(apply_nonstandard(nsf, std::vector<double>(32, 1.0)), ShapeMismatch);
}
