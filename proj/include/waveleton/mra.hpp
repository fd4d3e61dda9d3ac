#pragma once

#include <vector>

#include "waveleton/dwt.hpp"

namespace waveleton {

// Contribution of a single resolution slot to the signal: zero out all
// other coefficients and synthesize. The coarse part plus every detail
// level sums to the original signal (telescoping identity).
Signal reconstruct_coarse(const MraDecomposition& d, const WaveletFilter& f);
// level is an absolute detail level in [coarse_level, J-1]; throws LevelOutOfRange.
Signal reconstruct_detail(const MraDecomposition& d, const WaveletFilter& f, int level);

// Per-level energy split; entries sum to the signal's squared norm.
struct MultiNorm {
    int coarse_level = 0;
    double coarse_energy = 0.0;
    std::vector<double> detail_energies;  // coarsest-first, levels c..J-1
    double total = 0.0;
};
MultiNorm multi_norm(const MraDecomposition& d);

// Smallest level N such that every detail level strictly finer than N has
// norm <= eps (truncating after N then changes the reconstruction by at
// most eps per level). Never returns less than the coarse level; if even
// the finest level exceeds eps, returns J-1 with converged = false.
struct CutoffResult {
    int level = 0;
    bool converged = false;
};
CutoffResult cutoff_level(const MraDecomposition& d, double eps);

// Demo signals on n uniform samples of [0, 1). Throws BadParams.
Signal kick_signal(int n, double center, double amplitude = 1.0, double width_cells = 4.0);
struct Kick {
    double center;     // in [0, 1)
    double amplitude;
};
Signal multikick_signal(int n, const std::vector<Kick>& kicks, double width_cells = 4.0);
// sum_{k<terms} a^k cos(b^k pi t); requires a in (0,1), integer b >= 2,
// a*b > 1, terms >= 1.
Signal rw_fractal_signal(int n, double a = 0.5, int b = 3, int terms = 20);

}  // namespace waveleton
