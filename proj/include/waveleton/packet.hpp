#pragma once

#include <vector>

#include "waveleton/dwt.hpp"

namespace waveleton {

// Full wavelet-packet tree to a fixed depth. Node (d, i) holds the i-th
// frequency band at depth d (i in [0, 2^d)); children of (d, i) are
// (d+1, 2i) from h and (d+1, 2i+1) from g. Nodes are stored breadth-first:
// index = 2^d - 1 + i.
struct PacketNode {
    int depth = 0;
    int index = 0;
    Signal coeffs;
    double cost = 0.0;   // additive entropy of this node alone
    bool chosen = false; // member of the selected tiling
};

struct PacketTree {
    int depth = 0;
    int signal_length = 0;
    double total_energy = 0.0;
    double best_cost = 0.0;
    std::vector<PacketNode> nodes;

    const PacketNode& node(int d, int i) const;
    std::vector<const PacketNode*> chosen_nodes() const;
};

// Additive Shannon cost sum p log p with p = c^2 / total_energy; the
// normalizer is the whole signal's energy so costs add across disjoint
// covers. Zero-energy signals cost 0.
double entropy_cost(const Signal& coeffs, double total_energy);

// Coifman-Wickerhauser best basis: minimal additive cost over all
// admissible tilings (every leaf-or-split cover of the depth-limited tree).
// Ties prefer the parent. Throws BadLength / TooManyLevels as dwt_periodic.
PacketTree packet_best_basis(const Signal& s, const WaveletFilter& f, int max_depth);

}  // namespace waveleton
