#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "waveleton/evolve.hpp"
#include "waveleton/grid2d.hpp"
#include "waveleton/wigner.hpp"

namespace waveleton {

// Generators for the coefficient matrices that drive pattern synthesis.
enum class MatrixKind {
    ones,             // every entry 1
    band_diagonal,    // band_value on |i - j| < width, off_value elsewhere
    band_triangular,  // band_value on 0 <= j - i < width (one-sided band)
    random_uniform,   // seeded uniform draws in [0, 1)
    explicit_values,  // caller-provided entries
};

struct MatrixSpec {
    MatrixKind kind = MatrixKind::ones;
    int width = 1;             // band kinds only
    double band_value = 5.0;   // value on the band
    double off_value = 1.0;    // value off the band
    std::uint64_t seed = 0;    // random_uniform only
    std::vector<double> values{};  // explicit_values only, row-major n*n
};

struct CoefficientMatrix {
    int n = 0;
    std::vector<double> values;  // row-major n x n

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const {
        return values[static_cast<std::size_t>(i) * n + j];
    }
};

// Deterministic matrix construction; throws BadSpec for invalid requests
// (n < 2, band width outside [1, n), explicit data of the wrong size or with
// non-finite entries).
CoefficientMatrix generate_matrix(const MatrixSpec& spec, int n);

// Where and how a coefficient matrix becomes a phase-space field. The mode
// set per axis is the first 2^max_level slots of the separable enumeration:
// slot 0 is the coarsest scaling function, slot 2^l + s the level-l wavelet
// at shift s (coarse first, levels ascending, shifts ascending within a
// level). A matrix row/column count of 2^max_level is therefore required.
struct SynthesisSpec {
    std::string filter = "sym6";
    int max_level = 4;
    int nq = 256, np = 256;
    double q_min = 0.0, q_max = 1.0;
    double p_min = 0.0, p_max = 1.0;
    double hbar = 1.0, mass = 1.0;  // attached to states built for evolution
};

// W(q, p) = sum_ij a_ij u_i(q) v_j(p) over the included modes, evaluated on
// the grid. Linear in the matrix. Throws ShapeMismatch when the matrix size
// does not equal 2^max_level or exceeds a grid axis.
Grid2D synthesize(const CoefficientMatrix& a, const SynthesisSpec& spec);

// Localization/delocalization measures over a square array of coefficients,
// all invariant under scaling of the values. Two sources feed the same
// formulas: the cells of a sampled field (grid overload) or the mode
// coefficients of a synthesis matrix (matrix overload). The grid reading
// measures where the field's energy sits in phase space; the matrix reading
// measures how many basis modes carry it.
struct PatternMetrics {
    // Smallest fraction of entries holding at least half the squared-value
    // energy.
    double concentration_50 = 0.0;
    // (sum e)^2 / sum e^2 over entry energies e, divided by the entry count:
    // 1 for uniform magnitudes, ~0 for a single occupied entry.
    double participation_ratio = 0.0;
    // Shannon entropy of the normalized entry energies divided by log(entry
    // count): 1 for uniform magnitudes, 0 for a single occupied entry.
    double coeff_entropy = 0.0;
    // Largest single-entry share of the energy.
    double max_cell_share = 0.0;
    // Auxiliary separability proxy: relative distance of the array to its
    // best rank-1 (separable) approximation. Not used for classification.
    double rank1_distance = 0.0;
};

// Metrics over the grid cells. Throws ZeroField when every cell is zero.
PatternMetrics compute_metrics(const Grid2D& grid);

// Metrics over the entries of a synthesis coefficient matrix. Throws
// ZeroField when every entry is zero.
PatternMetrics compute_metrics(const CoefficientMatrix& a);

enum class PatternClass { waveleton, chaotic_like, intermediate };

struct ClassifyThresholds {
    double c_lo = 0.05;  // waveleton: concentration_50 at or below this...
    double e_lo = 0.5;   // ...and entropy at or below this
    double e_hi = 0.9;   // chaotic_like: entropy at or above this
};

PatternClass classify(const PatternMetrics& m, const ClassifyThresholds& t = {});

const char* pattern_class_name(PatternClass c);

// Mode-occupancy metrics sampled along a grid-space evolution of the
// synthesized field: every kept snapshot is projected back onto the
// synthesis basis and measured as a coefficient matrix. (Cell-energy area
// is exactly conserved by the transport flow, so only mode occupancy can
// register shear delocalization.)
struct PersistenceResult {
    std::vector<double> times;            // one entry per sampled state
    std::vector<PatternMetrics> series;   // mode-space metrics at those times
    bool localized_throughout = false;    // concentration_50 <= threshold at
                                          // every sample
    double threshold = 0.0;
};

// Synthesize a0, evolve it under the potential with the given integrator
// settings, and measure the mode-occupancy metrics of every kept snapshot.
PersistenceResult waveleton_persistence(const CoefficientMatrix& a0,
                                        const SynthesisSpec& syn,
                                        const PolynomialPotential& potential,
                                        const EvolveOptions& opt,
                                        double concentration_threshold = 0.05);

}  // namespace waveleton
