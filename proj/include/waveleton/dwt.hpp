#pragma once

#include <utility>
#include <vector>

#include "waveleton/filters.hpp"

namespace waveleton {

using Signal = std::vector<double>;

// Multiresolution coefficient layout for a signal of length 2^J analyzed
// `levels` times. coarse has length 2^c with c = J - levels; details are
// stored coarsest-first: details[t] belongs to level c + t and has length
// 2^(c+t). Flattened order [coarse | details...] is the canonical
// enumeration used by the 2D rectangle mode and the mode ansatz.
struct MraDecomposition {
    int signal_length = 0;
    int levels = 0;
    Signal coarse;
    std::vector<Signal> details;

    int coarse_level() const;
    double energy() const;
    Signal flatten() const;
};

// One analysis step, circular convolution + keep even-indexed outputs:
// a_m = sum_k h_k s[(2m+k) mod n], d_m likewise with g.
std::pair<Signal, Signal> dwt_step(const Signal& s, const WaveletFilter& f);
// Exact adjoint of dwt_step.
Signal idwt_step(const Signal& coarse, const Signal& detail, const WaveletFilter& f);

// Periodic analysis/synthesis. Throws BadLength (length not a power of two,
// or shorter than the filter support) and TooManyLevels (levels > log2 n or
// levels < 1).
MraDecomposition dwt_periodic(const Signal& s, const WaveletFilter& f, int levels);
Signal idwt_periodic(const MraDecomposition& d, const WaveletFilter& f);

int log2_exact(int n);  // throws BadLength unless n is a power of two
int max_levels(int n);

}  // namespace waveleton
