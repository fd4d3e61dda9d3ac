#include "waveleton/patterns.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "waveleton/errors.hpp"
#include "waveleton/galerkin.hpp"

namespace waveleton {

namespace {

// splitmix64: tiny, fully specified, platform-independent
std::uint64_t next_u64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    return static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
}

void check_band(const MatrixSpec& spec, int n) {
    if (spec.width < 1 || spec.width >= n)
        throw BadSpec("band width must be in [1, matrix size)");
    if (!std::isfinite(spec.band_value) || !std::isfinite(spec.off_value))
        throw BadSpec("band values must be finite");
}

ModeAnsatz ansatz_for(const SynthesisSpec& spec) {
    ModeAnsatz ansatz;
    ansatz.q_basis = AxisBasis{spec.filter, spec.max_level, {}};
    ansatz.p_basis = AxisBasis{spec.filter, spec.max_level, {}};
    ansatz.nq = spec.nq;
    ansatz.np = spec.np;
    ansatz.q_min = spec.q_min;
    ansatz.q_max = spec.q_max;
    ansatz.p_min = spec.p_min;
    ansatz.p_max = spec.p_max;
    return ansatz;
}

}  // namespace

CoefficientMatrix generate_matrix(const MatrixSpec& spec, int n) {
    if (n < 2) throw BadSpec("coefficient matrix size must be at least 2");
    CoefficientMatrix m;
    m.n = n;
    m.values.assign(static_cast<std::size_t>(n) * n, 0.0);

    switch (spec.kind) {
        case MatrixKind::ones:
            std::fill(m.values.begin(), m.values.end(), 1.0);
            break;
        case MatrixKind::band_diagonal:
            check_band(spec, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    m.at(i, j) = std::abs(i - j) < spec.width ? spec.band_value
                                                              : spec.off_value;
            break;
        case MatrixKind::band_triangular:
            check_band(spec, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    m.at(i, j) = (j >= i && j - i < spec.width) ? spec.band_value
                                                                : spec.off_value;
            break;
        case MatrixKind::random_uniform: {
            std::uint64_t state = spec.seed ? spec.seed : 0x9e3779b97f4a7c15ull;
            for (double& v : m.values) v = uniform01(state);
            break;
        }
        case MatrixKind::explicit_values:
            if (spec.values.size() != m.values.size())
                throw BadSpec("explicit matrix data size does not match n*n");
            for (double v : spec.values)
                if (!std::isfinite(v)) throw BadSpec("matrix entries must be finite");
            m.values = spec.values;
            break;
    }
    return m;
}

Grid2D synthesize(const CoefficientMatrix& a, const SynthesisSpec& spec) {
    if (spec.max_level < 0 || spec.max_level > 30)
        throw BadSpec("synthesis level out of range");
    const int modes = 1 << spec.max_level;
    if (a.n != modes)
        throw ShapeMismatch("matrix size " + std::to_string(a.n) +
                            " does not match the " + std::to_string(modes) +
                            " modes of level " + std::to_string(spec.max_level));
    if (modes > spec.nq || modes > spec.np)
        throw ShapeMismatch("mode count exceeds a grid axis");

    Eigen::MatrixXd coeffs(a.n, a.n);
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) coeffs(i, j) = a.at(i, j);
    return synthesize_modes(ansatz_for(spec), coeffs);
}

namespace {

// Shared metric core: `raw` holds a rows x cols array of coefficient-like
// values, row-major. Throws ZeroField when the array is empty or all zero.
PatternMetrics metrics_of_values(const std::vector<double>& raw, int rows,
                                 int cols) {
    const std::size_t count = raw.size();
    if (count == 0) throw ZeroField("empty value array");

    std::vector<double> energy(count);
    double total = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double e = raw[k] * raw[k];
        energy[k] = e;
        total += e;
    }
    if (total <= 0.0) throw ZeroField("array has no energy");

    PatternMetrics out;

    double sum_sq = 0.0, max_e = 0.0, entropy = 0.0;
    for (double e : energy) {
        sum_sq += e * e;
        max_e = std::max(max_e, e);
        if (e > 0.0) {
            const double share = e / total;
            entropy -= share * std::log(share);
        }
    }
    out.max_cell_share = max_e / total;
    out.participation_ratio =
        (total * total / sum_sq) / static_cast<double>(count);
    out.coeff_entropy =
        count > 1 ? entropy / std::log(static_cast<double>(count)) : 0.0;

    std::sort(energy.begin(), energy.end(), std::greater<double>());
    double cum = 0.0;
    std::size_t needed = 0;
    while (needed < count && cum < 0.5 * total) cum += energy[needed++];
    out.concentration_50 =
        static_cast<double>(needed) / static_cast<double>(count);

    // Distance to the best separable (rank-1) approximation, relative to the
    // total energy: sqrt(1 - sigma_1^2 / ||W||_F^2).
    Eigen::MatrixXd w(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            w(i, j) = raw[static_cast<std::size_t>(i) * cols + j];
    Eigen::BDCSVD<Eigen::MatrixXd> svd(w);
    const double s1 = svd.singularValues()(0);
    const double ratio = std::min(1.0, (s1 * s1) / total);
    out.rank1_distance = std::sqrt(std::max(0.0, 1.0 - ratio));
    return out;
}

}  // namespace

PatternMetrics compute_metrics(const Grid2D& grid) {
    if (grid.values.empty()) throw ZeroField("empty grid");
    return metrics_of_values(grid.values, grid.nq, grid.np);
}

PatternMetrics compute_metrics(const CoefficientMatrix& a) {
    if (a.values.empty()) throw ZeroField("empty coefficient matrix");
    return metrics_of_values(a.values, a.n, a.n);
}

PatternClass classify(const PatternMetrics& m, const ClassifyThresholds& t) {
    if (m.concentration_50 <= t.c_lo && m.coeff_entropy <= t.e_lo)
        return PatternClass::waveleton;
    if (m.coeff_entropy >= t.e_hi) return PatternClass::chaotic_like;
    return PatternClass::intermediate;
}

const char* pattern_class_name(PatternClass c) {
    switch (c) {
        case PatternClass::waveleton: return "waveleton";
        case PatternClass::chaotic_like: return "chaotic_like";
        case PatternClass::intermediate: return "intermediate";
    }
    return "intermediate";
}

PersistenceResult waveleton_persistence(const CoefficientMatrix& a0,
                                        const SynthesisSpec& syn,
                                        const PolynomialPotential& potential,
                                        const EvolveOptions& opt,
                                        double concentration_threshold) {
    WignerState state;
    state.grid = synthesize(a0, syn);
    state.hbar = syn.hbar;
    state.mass = syn.mass;

    PersistenceResult out;
    out.threshold = concentration_threshold;

    // Mode-occupancy reading: each kept snapshot is projected back onto the
    // synthesis basis and measured as a coefficient matrix, so the series
    // reports how many modes carry the state. Grid-cell energy area is
    // conserved exactly by the transport flow and cannot register shear
    // delocalization; mode occupancy can.
    const ModeAnsatz ansatz = ansatz_for(syn);
    const Trajectory traj = evolve(state, potential, opt);
    out.localized_throughout = true;
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const ProjectionResult proj =
            project_initial(traj.snapshots[k], ansatz);
        CoefficientMatrix a;
        a.n = static_cast<int>(proj.coeffs.rows());
        a.values.resize(static_cast<std::size_t>(a.n) * a.n);
        for (int i = 0; i < a.n; ++i)
            for (int j = 0; j < a.n; ++j) a.at(i, j) = proj.coeffs(i, j);
        const PatternMetrics m = compute_metrics(a);
        out.times.push_back(traj.snapshots[k].time);
        out.series.push_back(m);
        if (m.concentration_50 > concentration_threshold)
            out.localized_throughout = false;
    }
    return out;
}

}  // namespace waveleton
