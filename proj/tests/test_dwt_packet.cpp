#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "waveleton/dwt.hpp"
#include "waveleton/errors.hpp"
#include "waveleton/filters.hpp"
#include "waveleton/packet.hpp"

using namespace waveleton;

TEST_CASE("single haar butterfly on a two-sample signal") {
    auto f = make_filter("haar");
    auto dec = dwt_periodic({1.0, 3.0}, f, 1);
    REQUIRE(dec.coarse.size() == 1);
    REQUIRE(dec.details.size() == 1);
    CHECK(dec.coarse[0] == doctest::Approx(2.0 * std::numbers::sqrt2).epsilon(1e-15));
    CHECK(dec.details[0][0] == doctest::Approx(-std::numbers::sqrt2).epsilon(1e-15));
}

TEST_CASE("round trip and energy preservation across filters, sizes, and depths") {
    oracle::Rng rng(0x5eedu);
    for (const char* name : {"haar", "db2", "db5", "sym4", "sym8"}) {
        auto f = make_filter(name);
        for (int n : {64, 256, 1024}) {
            auto x = rng.signal(n);
            int maxl = max_levels(n);
            for (int levels : {1, maxl / 2, maxl}) {
                if (levels < 1) continue;
                CAPTURE(name);
                CAPTURE(n);
                CAPTURE(levels);
                auto dec = dwt_periodic(x, f, levels);
                REQUIRE(static_cast<int>(dec.details.size()) == levels);
                CHECK(dec.coarse.size() == x.size() >> levels);
                auto back = idwt_periodic(dec, f);
                CHECK(oracle::max_abs_diff(back, x) < 1e-9);
                double e_coeff = 0.0;
                for (double v : dec.coarse) e_coeff += v * v;
                for (const auto& d : dec.details)
                    for (double v : d) e_coeff += v * v;
                double e_sig = 0.0;
                for (double v : x) e_sig += v * v;
                CHECK(std::abs(e_coeff - e_sig) < 1e-10 * e_sig);
            }
        }
    }
}

TEST_CASE("analysis and synthesis steps are adjoint") {
    auto f = make_filter("db3");
    const int n = 32;
    oracle::Rng rng(7);
    auto x = rng.signal(n);
    auto ya = rng.signal(n / 2);
    auto yd = rng.signal(n / 2);
    auto [a, d] = dwt_step(x, f);
    double lhs = 0.0;
    for (int i = 0; i < n / 2; ++i) lhs += a[i] * ya[i] + d[i] * yd[i];
    auto z = idwt_step(ya, yd, f);
    double rhs = 0.0;
    for (int i = 0; i < n; ++i) rhs += x[i] * z[i];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
}

TEST_CASE("transform rejects bad lengths and depths") {
    auto f = make_filter("db2");
    CHECK_THROWS_AS(dwt_periodic(std::vector<double>(48, 1.0), f, 2), BadLength);
    CHECK_THROWS_AS(dwt_periodic(std::vector<double>(2, 1.0), f, 1), BadLength);
    CHECK_THROWS_AS(dwt_periodic(std::vector<double>(64, 1.0), f, 7), TooManyLevels);
    CHECK_NOTHROW(dwt_periodic(std::vector<double>(64, 1.0), f, 6));
}

namespace {

using Tiling = std::vector<std::pair<int, int>>;  // (depth, index) bands

std::vector<Tiling> enumerate_tilings(int d, int i, int depth_left) {
    std::vector<Tiling> out;
    out.push_back({{d, i}});
    if (depth_left == 0) return out;
    auto left = enumerate_tilings(d + 1, 2 * i, depth_left - 1);
    auto right = enumerate_tilings(d + 1, 2 * i + 1, depth_left - 1);
    for (const auto& l : left)
        for (const auto& r : right) {
            Tiling t = l;
            t.insert(t.end(), r.begin(), r.end());
            out.push_back(std::move(t));
        }
    return out;
}

bool covers_unit_interval(Tiling t) {
    std::sort(t.begin(), t.end(), [](auto a, auto b) {
        return a.second * (1 << (20 - a.first)) < b.second * (1 << (20 - b.first));
    });
    long pos = 0;  // in units of 2^-20
    for (auto [d, i] : t) {
        if (static_cast<long>(i) * (1 << (20 - d)) != pos) return false;
        pos += 1L << (20 - d);
    }
    return pos == (1L << 20);
}

}  // namespace

TEST_CASE("depth-3 best basis matches exhaustive search over all 26 tilings") {
    auto tilings = enumerate_tilings(0, 0, 3);
    REQUIRE(tilings.size() == 26);
    auto f = make_filter("db2");
    oracle::Rng rng(0xabcdef);
    for (int trial = 0; trial < 5; ++trial) {
        auto x = rng.signal(64);
        auto tree = packet_best_basis(x, f, 3);
        double brute = 1e308;
        for (const auto& t : tilings) {
            double c = 0.0;
            for (auto [d, i] : t) c += tree.node(d, i).cost;
            brute = std::min(brute, c);
        }
        CAPTURE(trial);
        CHECK(tree.best_cost == doctest::Approx(brute).epsilon(1e-12));
        Tiling chosen;
        for (const auto* n : tree.chosen_nodes()) chosen.emplace_back(n->depth, n->index);
        CHECK(covers_unit_interval(chosen));
        double recost = 0.0;
        for (auto [d, i] : chosen) recost += tree.node(d, i).cost;
        CHECK(recost == doctest::Approx(tree.best_cost).epsilon(1e-12));
    }
}

TEST_CASE("best basis never costs more than the pyramid tiling") {
    auto f = make_filter("sym4");
    oracle::Rng rng(99);
    for (int trial = 0; trial < 4; ++trial) {
        auto x = rng.signal(128);
        int depth = 5;
        auto tree = packet_best_basis(x, f, depth);
        // pyramid tiling: detail band at each depth plus the deepest coarse band
        double pyr = 0.0;
        for (int d = 1; d <= depth; ++d) pyr += tree.node(d, 1).cost;
        pyr += tree.node(depth, 0).cost;
        CHECK(tree.best_cost <= pyr + 1e-12);
    }
}

TEST_CASE("a pure tone concentrates into a few packet coefficients") {
    const int n = 256;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i)
        x[i] = std::sin(2.0 * std::numbers::pi * 16.0 * i / n);
    auto f = make_filter("sym8");
    auto tree = packet_best_basis(x, f, max_levels(n));
    std::vector<double> mags;
    for (const auto* leaf : tree.chosen_nodes())
        for (double v : leaf->coeffs) mags.push_back(v * v);
    std::sort(mags.rbegin(), mags.rend());
    double total = 0.0, top4 = 0.0;
    for (size_t i = 0; i < mags.size(); ++i) {
        total += mags[i];
        if (i < 4) top4 += mags[i];
    }
    CHECK(top4 >= 0.90 * total);
}
