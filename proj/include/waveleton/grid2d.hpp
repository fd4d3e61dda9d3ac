#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "waveleton/errors.hpp"

namespace waveleton {

// Phase-space sample grid: rows index q, columns index p, row-major values.
// Cell centers sit at the lower edge of each cell: q_i = q_min + i*dq.
struct Grid2D {
    int nq = 0, np = 0;
    double q_min = 0.0, q_max = 0.0, p_min = 0.0, p_max = 0.0;
    std::vector<double> values;

    double& at(int i, int j) { return values[static_cast<size_t>(i) * np + j]; }
    double at(int i, int j) const { return values[static_cast<size_t>(i) * np + j]; }
    double dq() const { return (q_max - q_min) / nq; }
    double dp() const { return (p_max - p_min) / np; }
    double q(int i) const { return q_min + i * dq(); }
    double p(int j) const { return p_min + j * dp(); }
};

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Zero-filled grid with validated dyadic dims and finite extents.
inline Grid2D make_grid(int nq, int np, double q_min, double q_max, double p_min, double p_max) {
    if (!is_pow2(nq) || !is_pow2(np)) throw BadGrid("grid dims must be powers of two");
    if (!(std::isfinite(q_min) && std::isfinite(q_max) && std::isfinite(p_min) &&
          std::isfinite(p_max)) ||
        q_max <= q_min || p_max <= p_min)
        throw BadGrid("grid extents must be finite with max > min");
    Grid2D g;
    g.nq = nq;
    g.np = np;
    g.q_min = q_min;
    g.q_max = q_max;
    g.p_min = p_min;
    g.p_max = p_max;
    g.values.assign(static_cast<size_t>(nq) * np, 0.0);
    return g;
}

}  // namespace waveleton
