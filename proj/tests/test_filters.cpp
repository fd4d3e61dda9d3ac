#include "waveleton/filters.hpp"

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "waveleton/errors.hpp"

using namespace waveleton;

TEST_CASE("order-2 extremal-phase filter matches the closed form") {
    auto f = make_filter(WaveletFamily::daubechies, 2);
    auto want = oracle::db2_closed_form();
    REQUIRE(f.h.size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(f.h[k] == doctest::Approx(want[k]).epsilon(1e-12));
}

TEST_CASE("defining equations hold for every supported filter") {
    std::vector<WaveletFilter> all{make_filter(WaveletFamily::haar, 1)};
    for (int m = 2; m <= 10; ++m) {
        all.push_back(make_filter(WaveletFamily::daubechies, m));
        all.push_back(make_filter(WaveletFamily::symmlet, m));
    }
    for (const auto& f : all) {
        CAPTURE(family_name(f.family));
        CAPTURE(f.order);
        REQUIRE(f.length() == 2 * f.order);
        auto r = filter_residuals(f);
        CHECK(r.sum < 1e-12);
        CHECK(r.orthonormality < 1e-12);
        CHECK(r.moments < 1e-10);
        // alternating-flip convention
        for (int k = 0; k < f.length(); ++k)
            CHECK(f.g[k] ==
                  doctest::Approx(((k % 2) ? -1.0 : 1.0) * f.h[f.length() - 1 - k]).epsilon(1e-15));
        // h and g are orthogonal at all even shifts
        for (int m = 1 - f.order; m < f.order; ++m) {
            double s = 0.0;
            for (int k = 0; k < f.length(); ++k) {
                int kk = k + 2 * m;
                if (kk >= 0 && kk < f.length()) s += f.h[k] * f.g[kk];
            }
            CHECK(std::abs(s) < 1e-12);
        }
    }
}

TEST_CASE("symmlet selection flattens the phase relative to extremal phase") {
    for (int m : {4, 6, 8, 10}) {
        auto sym = make_filter(WaveletFamily::symmlet, m);
        auto db = make_filter(WaveletFamily::daubechies, m);
        CAPTURE(m);
        CHECK(phase_nonlinearity(sym.h) < phase_nonlinearity(db.h));
    }
}

TEST_CASE("filter construction rejects unsupported orders and names") {
    CHECK_THROWS_AS(make_filter(WaveletFamily::daubechies, 1), UnsupportedOrder);
    CHECK_THROWS_AS(make_filter(WaveletFamily::daubechies, 11), UnsupportedOrder);
    CHECK_THROWS_AS(make_filter(WaveletFamily::symmlet, 0), UnsupportedOrder);
    CHECK_THROWS_AS(make_filter(WaveletFamily::haar, 2), UnsupportedOrder);
    CHECK_THROWS_AS(make_filter("dbx"), BadValue);
    CHECK_THROWS_AS(make_filter("coif3"), BadValue);
    CHECK(make_filter("haar").order == 1);
    CHECK(make_filter("db7").order == 7);
    CHECK(make_filter("sym8").family == WaveletFamily::symmlet);
}

TEST_CASE("haar cascade returns the half-open unit indicator") {
    for (int depth : {1, 4, 10}) {
        auto s = cascade_eval(make_filter("haar"), depth);
        int n = (1 << depth) + 1;
        REQUIRE(static_cast<int>(s.phi.size()) == n);
        for (int m = 0; m < n - 1; ++m) CHECK(s.phi[m] == 1.0);
        CHECK(s.phi[n - 1] == 0.0);
        // Riemann sum of the indicator is exactly 1
        double sum = 0.0;
        for (int m = 0; m < n - 1; ++m) sum += s.phi[m];
        CHECK(sum * s.dx == doctest::Approx(1.0).epsilon(1e-15));
        // step pattern of psi
        CHECK(s.psi[0] == 1.0);
        CHECK(s.psi[(n - 1) / 2] == -1.0);
    }
}

TEST_CASE("cascade samples satisfy the two-scale equation on the dyadic grid") {
    for (const char* name : {"db2", "db4", "sym6"}) {
        auto f = make_filter(name);
        auto s = cascade_eval(f, 6);
        auto coarse = cascade_eval(f, 5);
        const int S = f.support_length();
        double resid = 0.0;
        for (size_t m = 0; m < s.phi.size(); ++m) {
            // phi(x) = sqrt2 sum_k h_k phi(2x - k), 2x on the depth-5 grid
            double acc = 0.0;
            for (int k = 0; k < f.length(); ++k) {
                long idx = static_cast<long>(m) - static_cast<long>(k) * (1 << 5);
                if (idx >= 0 && idx <= static_cast<long>(S) * (1 << 5))
                    acc += f.h[k] * coarse.phi[idx];
            }
            resid = std::max(resid, std::abs(s.phi[m] - std::numbers::sqrt2 * acc));
        }
        CAPTURE(name);
        CHECK(resid < 1e-12);
    }
}

TEST_CASE("cascade integrals and moments") {
    for (const char* name : {"db2", "db3", "db6", "sym8"}) {
        auto f = make_filter(name);
        auto s = cascade_eval(f, 12);
        CAPTURE(name);
        CHECK(oracle::trapezoid(s.phi, s.dx) == doctest::Approx(1.0).epsilon(1e-6));
        // partition of unity at an off-integer dyadic point
        const int S = f.support_length();
        double part = 0.0;
        for (int j = 0; j < S; ++j) {
            size_t idx = (1 << 11) + static_cast<size_t>(j) * (1 << 12);  // x = 0.5 + j
            if (idx < s.phi.size()) part += s.phi[idx];
        }
        CHECK(part == doctest::Approx(1.0).epsilon(1e-9));
        // first `order` moments of psi vanish
        for (int m = 0; m < f.order; ++m) {
            std::vector<double> integrand(s.psi.size());
            for (size_t i = 0; i < s.psi.size(); ++i)
                integrand[i] = s.psi[i] * std::pow(i * s.dx, m);
            CHECK(std::abs(oracle::trapezoid(integrand, s.dx)) < 1e-6);
        }
    }
}

TEST_CASE("cascade rejects out-of-range depths") {
    auto f = make_filter("db2");
    CHECK_THROWS_AS(cascade_eval(f, 0), BadParams);
    CHECK_THROWS_AS(cascade_eval(f, 17), BadParams);
}
