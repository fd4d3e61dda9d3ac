#include "waveleton/evolve.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "waveleton/errors.hpp"

using namespace waveleton;

namespace {

double rel_l2(const Grid2D& got, const Grid2D& want) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < got.values.size(); ++k) {
        num += (got.values[k] - want.values[k]) * (got.values[k] - want.values[k]);
        den += want.values[k] * want.values[k];
    }
    return std::sqrt(num / den);
}

const PolynomialPotential kHarmonic{{0.0, 0.0, 0.5}};  // U = q^2 / 2, omega = 1

}  // namespace

TEST_CASE("zero steps is the identity") {
    auto w = gaussian_state(make_grid(64, 64, -6.0, 6.0, -6.0, 6.0), 1.0, 0.0, 0.7, 0.7);
    EvolveOptions opt;
    opt.steps = 0;
    auto traj = evolve(w, kHarmonic, opt);
    CHECK(traj.snapshots.size() == 1);
    CHECK(traj.diagnostics.size() == 1);
    CHECK(oracle::max_abs_diff(traj.final_state().grid.values, w.grid.values) == 0.0);
    CHECK(traj.diagnostics[0].mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("time step guard rejects unstable explicit steps") {
    auto w = gaussian_state(make_grid(64, 64, -6.0, 6.0, -6.0, 6.0), 1.0, 0.0, 0.7, 0.7);
    const double limit = cfl_limit(w, kHarmonic);
    CHECK(limit == doctest::Approx(w.grid.dq() / 6.0).epsilon(1e-12));
    EvolveOptions opt;
    opt.dt = 2.0 * limit;
    opt.steps = 1;
    CHECK_THROWS_AS(evolve(w, kHarmonic, opt), CflViolation);
    opt.dt = -0.1;
    CHECK_THROWS_AS(evolve(w, kHarmonic, opt), BadParams);
}

TEST_CASE("coherent state completes one harmonic period") {
    // Rigid rotation of phase space: after T = 2 pi the state returns.
    auto w0 = gaussian_state(make_grid(128, 128, -8.0, 8.0, -8.0, 8.0), 2.0, 0.0,
                             std::sqrt(0.5), std::sqrt(0.5));
    EvolveOptions opt;
    opt.steps = 640;
    opt.dt = 2.0 * std::numbers::pi / opt.steps;
    opt.snapshot_every = 160;  // quarter-period snapshots
    auto traj = evolve(w0, kHarmonic, opt);
    CHECK(rel_l2(traj.final_state().grid, w0.grid) < 0.01);
    CHECK(traj.final_state().time == doctest::Approx(2.0 * std::numbers::pi));
    // quarter period: centroid rotates (q0, 0) -> (0, -q0)
    const auto& quarter = traj.snapshots[1];
    CHECK(traj.snapshot_steps[1] == 160);
    double mq = 0.0, mp = 0.0;
    for (int i = 0; i < 128; ++i)
        for (int j = 0; j < 128; ++j) {
            mq += quarter.grid.q(i) * quarter.grid.at(i, j);
            mp += quarter.grid.p(j) * quarter.grid.at(i, j);
        }
    mq *= quarter.grid.dq() * quarter.grid.dp();
    mp *= quarter.grid.dq() * quarter.grid.dp();
    CHECK(std::abs(mq) < 0.02);
    CHECK(mp == doctest::Approx(-2.0).epsilon(0.01));
    // mass is conserved to roundoff by the zero-column-sum stencils
    for (const auto& d : traj.diagnostics) CHECK(std::abs(d.mass - 1.0) < 1e-6);
}

TEST_CASE("free packet shears exactly as the analytic solution") {
    const double sq = 0.6, sp = 0.6, t_final = 1.0;
    auto w0 = gaussian_state(make_grid(128, 128, -8.0, 8.0, -8.0, 8.0), -1.0, 0.0, sq, sp);
    EvolveOptions opt;
    opt.steps = 80;
    opt.dt = t_final / opt.steps;
    auto traj = evolve(w0, PolynomialPotential{}, opt);
    Grid2D want = w0.grid;
    double total = 0.0;
    for (int i = 0; i < 128; ++i)
        for (int j = 0; j < 128; ++j) {
            const double q = want.q(i) - want.p(j) * t_final - (-1.0);
            const double p = want.p(j) - 0.0;
            want.at(i, j) = std::exp(-0.5 * (q * q / (sq * sq) + p * p / (sp * sp)));
            total += want.at(i, j);
        }
    total *= want.dq() * want.dp();
    for (auto& v : want.values) v /= total;
    CHECK(rel_l2(traj.final_state().grid, want) < 0.01);
}

TEST_CASE("implicit stepper matches the explicit one and conserves mass") {
    auto w0 = gaussian_state(make_grid(64, 64, -6.0, 6.0, -6.0, 6.0), 1.2, 0.0,
                             std::sqrt(0.5), std::sqrt(0.5));
    const double t_final = 1.0;

    EvolveOptions fine;
    fine.steps = 100;
    fine.dt = t_final / fine.steps;
    auto reference = evolve(w0, kHarmonic, fine);

    EvolveOptions cn;
    cn.method = Integrator::crank_nicolson;
    cn.steps = 25;
    cn.dt = t_final / cn.steps;  // larger than the explicit stability limit
    CHECK(cn.dt > cfl_limit(w0, kHarmonic));
    auto traj = evolve(w0, kHarmonic, cn);
    CHECK(rel_l2(traj.final_state().grid, reference.final_state().grid) < 0.01);
    for (const auto& d : traj.diagnostics) CHECK(std::abs(d.mass - 1.0) < 1e-8);
}

TEST_CASE("implicit solver reports a stall instead of returning garbage") {
    auto w0 = gaussian_state(make_grid(32, 32, -6.0, 6.0, -6.0, 6.0), 1.0, 0.0, 0.8, 0.8);
    EvolveOptions cn;
    cn.method = Integrator::crank_nicolson;
    cn.dt = 50.0;
    cn.steps = 1;
    cn.max_linear_iterations = 1;
    cn.linear_tolerance = 1e-14;
    CHECK_THROWS_AS(evolve(w0, kHarmonic, cn), SolverDivergence);
}

TEST_CASE("damped oscillator relaxes to the stationary gaussian") {
    const double gamma = 0.25, diffusion = 0.25;
    auto w0 = gaussian_state(make_grid(64, 64, -6.0, 6.0, -6.0, 6.0), 1.5, -0.5, 0.9, 0.6);
    EvolveOptions opt;
    opt.lindblad = LindbladParams{gamma, diffusion};
    // the drag term adds 2*gamma*|p| to the momentum advection speed, so
    // stay well inside the conservative-guard limit
    opt.dt = 0.0125;
    opt.steps = 2400;  // t = 30: the displaced centroid decays like exp(-gamma t)
    auto traj = evolve(w0, kHarmonic, opt);
    auto stationary = gaussian_state(w0.grid, 0.0, 0.0, std::sqrt(diffusion / (2.0 * gamma)),
                                     std::sqrt(diffusion / (2.0 * gamma)));
    CHECK(rel_l2(traj.final_state().grid, stationary.grid) < 5e-3);
    for (const auto& d : traj.diagnostics) CHECK(std::abs(d.mass - 1.0) < 1e-8);
    // the L2 norm settles at the stationary-gaussian value
    CHECK(traj.diagnostics.back().l2_norm ==
          doctest::Approx(state_l2(stationary)).epsilon(0.01));
}

TEST_CASE("mixtures evolve componentwise and combine linearly") {
    auto grid = make_grid(64, 64, -6.0, 6.0, -6.0, 6.0);
    auto a = gaussian_state(grid, 1.0, 0.0, 0.7, 0.7);
    auto b = gaussian_state(grid, -1.5, 0.5, 0.6, 0.8);
    EvolveOptions opt;
    opt.steps = 40;
    opt.dt = 0.01;

    SUBCASE("single component of weight one reduces to plain evolution") {
        MixtureSpec mix{{{1.0, kHarmonic}}};
        auto res = mixture_evolve(mix, {a}, opt);
        auto plain = evolve(a, kHarmonic, opt);
        CHECK(oracle::max_abs_diff(res.combined.grid.values,
                                   plain.final_state().grid.values) == 0.0);
    }

    SUBCASE("two identical components reproduce either one") {
        MixtureSpec mix{{{0.5, kHarmonic}, {0.5, kHarmonic}}};
        auto res = mixture_evolve(mix, {a, a}, opt);
        auto plain = evolve(a, kHarmonic, opt);
        CHECK(oracle::max_abs_diff(res.combined.grid.values,
                                   plain.final_state().grid.values) < 1e-15);
    }

    SUBCASE("combined state is the weighted sum of component evolutions") {
        PolynomialPotential stiffer{{0.0, 0.0, 1.0}};
        MixtureSpec mix{{{0.3, kHarmonic}, {0.7, stiffer}}};
        auto res = mixture_evolve(mix, {a, b}, opt);
        auto ea = evolve(a, kHarmonic, opt);
        auto eb = evolve(b, stiffer, opt);
        double worst = 0.0;
        for (std::size_t k = 0; k < res.combined.grid.values.size(); ++k)
            worst = std::max(worst, std::abs(res.combined.grid.values[k] -
                                             0.3 * ea.final_state().grid.values[k] -
                                             0.7 * eb.final_state().grid.values[k]));
        CHECK(worst < 1e-15);
        CHECK(std::abs(state_mass(res.combined) - 1.0) < 1e-8);
    }

    SUBCASE("scaled photon-number potentials keep unit combined mass") {
        // weights ~ truncated Poissonian; potentials n * g with g = x^2
        std::vector<double> w = {0.36788, 0.36788, 0.18394};
        double total = w[0] + w[1] + w[2];
        for (auto& x : w) x /= total;
        MixtureSpec mix;
        for (int n = 0; n < 3; ++n)
            mix.components.push_back(
                {w[n], PolynomialPotential{{0.0, 0.0, 0.35 * n}}});
        auto res = mixture_evolve(mix, {a, a, a}, opt);
        CHECK(std::abs(state_mass(res.combined) - 1.0) < 1e-8);
        CHECK(res.components.size() == 3);
    }

    SUBCASE("invalid specs are rejected") {
        MixtureSpec bad{{{0.6, kHarmonic}, {0.6, kHarmonic}}};
        CHECK_THROWS_AS(mixture_evolve(bad, {a, b}, opt), BadParams);
        MixtureSpec mix{{{0.5, kHarmonic}, {0.5, kHarmonic}}};
        CHECK_THROWS_AS(mixture_evolve(mix, {a}, opt), ShapeMismatch);
    }
}
