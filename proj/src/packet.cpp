#include "waveleton/packet.hpp"

#include <cmath>
#include <string>

#include "waveleton/errors.hpp"

namespace waveleton {

const PacketNode& PacketTree::node(int d, int i) const {
    return nodes[(1 << d) - 1 + i];
}

std::vector<const PacketNode*> PacketTree::chosen_nodes() const {
    std::vector<const PacketNode*> out;
    for (const auto& n : nodes)
        if (n.chosen) out.push_back(&n);
    return out;
}

double entropy_cost(const Signal& coeffs, double total_energy) {
    if (total_energy <= 0.0) return 0.0;
    double cost = 0.0;
    for (double c : coeffs) {
        double p = c * c / total_energy;
        if (p > 0.0) cost -= p * std::log(p);
    }
    return cost;
}

PacketTree packet_best_basis(const Signal& s, const WaveletFilter& f, int max_depth) {
    const int n = static_cast<int>(s.size());
    const int J = log2_exact(n);
    if (n < f.length())
        throw BadLength("signal shorter than filter length");
    if (max_depth < 1 || max_depth > J)
        throw TooManyLevels("packet depth must be in [1, " + std::to_string(J) + "]");

    PacketTree tree;
    tree.depth = max_depth;
    tree.signal_length = n;
    for (double v : s) tree.total_energy += v * v;
    tree.nodes.resize((2 << max_depth) - 1);

    tree.nodes[0].depth = 0;
    tree.nodes[0].index = 0;
    tree.nodes[0].coeffs = s;
    for (int d = 0; d < max_depth; ++d) {
        for (int i = 0; i < (1 << d); ++i) {
            const auto& parent = tree.nodes[(1 << d) - 1 + i];
            auto [a, g] = dwt_step(parent.coeffs, f);
            auto& c0 = tree.nodes[(2 << d) - 1 + 2 * i];
            auto& c1 = tree.nodes[(2 << d) - 1 + 2 * i + 1];
            c0.depth = c1.depth = d + 1;
            c0.index = 2 * i;
            c1.index = 2 * i + 1;
            c0.coeffs = std::move(a);
            c1.coeffs = std::move(g);
        }
    }
    for (auto& node : tree.nodes) node.cost = entropy_cost(node.coeffs, tree.total_energy);

    // Bottom-up dynamic program; best[k] is the minimal cost of covering
    // node k's band with admissible descendants.
    std::vector<double> best(tree.nodes.size(), 0.0);
    std::vector<bool> split(tree.nodes.size(), false);
    for (int d = max_depth; d >= 0; --d) {
        for (int i = 0; i < (1 << d); ++i) {
            int k = (1 << d) - 1 + i;
            if (d == max_depth) {
                best[k] = tree.nodes[k].cost;
                continue;
            }
            double child_cost = best[(2 << d) - 1 + 2 * i] + best[(2 << d) - 1 + 2 * i + 1];
            if (child_cost < tree.nodes[k].cost) {
                best[k] = child_cost;
                split[k] = true;
            } else {
                best[k] = tree.nodes[k].cost;
            }
        }
    }
    tree.best_cost = best[0];

    // Mark the chosen tiling.
    std::vector<int> stack{0};
    while (!stack.empty()) {
        int k = stack.back();
        stack.pop_back();
        if (!split[k]) {
            tree.nodes[k].chosen = true;
            continue;
        }
        int d = tree.nodes[k].depth, i = tree.nodes[k].index;
        stack.push_back((2 << d) - 1 + 2 * i);
        stack.push_back((2 << d) - 1 + 2 * i + 1);
    }
    return tree;
}

}  // namespace waveleton
