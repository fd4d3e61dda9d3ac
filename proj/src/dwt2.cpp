#include "waveleton/dwt2.hpp"

#include <string>

#include "waveleton/errors.hpp"

namespace waveleton {

namespace {

void check_dims(int nq, int np, const WaveletFilter& f, int levels) {
    if (!is_pow2(nq) || !is_pow2(np)) throw BadShape("grid dims must be powers of two");
    if (nq < f.length() || np < f.length())
        throw BadShape("both axes must be at least the filter length");
    if (levels < 1 || levels > max_levels(nq) || levels > max_levels(np))
        throw TooManyLevels("levels must fit the shorter axis");
}

// One analysis/synthesis step over the leading m entries of a row or column
// viewed through stride.
void step_analyze(std::vector<double>& buf, double* base, int m, int stride,
                  const WaveletFilter& f) {
    buf.resize(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) buf[static_cast<size_t>(k)] = base[static_cast<ptrdiff_t>(k) * stride];
    auto [a, d] = dwt_step(buf, f);
    for (int k = 0; k < m / 2; ++k) {
        base[static_cast<ptrdiff_t>(k) * stride] = a[static_cast<size_t>(k)];
        base[static_cast<ptrdiff_t>(k + m / 2) * stride] = d[static_cast<size_t>(k)];
    }
}

void step_synthesize(std::vector<double>& buf, double* base, int m, int stride,
                     const WaveletFilter& f) {
    Signal a(static_cast<size_t>(m / 2)), d(static_cast<size_t>(m / 2));
    for (int k = 0; k < m / 2; ++k) {
        a[static_cast<size_t>(k)] = base[static_cast<ptrdiff_t>(k) * stride];
        d[static_cast<size_t>(k)] = base[static_cast<ptrdiff_t>(k + m / 2) * stride];
    }
    buf = idwt_step(a, d, f);
    for (int k = 0; k < m; ++k) base[static_cast<ptrdiff_t>(k) * stride] = buf[static_cast<size_t>(k)];
}

}  // namespace

Decomposition2D dwt2(const Grid2D& g, const WaveletFilter& f, int levels, Mode2D mode) {
    check_dims(g.nq, g.np, f, levels);
    Decomposition2D d;
    d.mode = mode;
    d.levels = levels;
    d.nq = g.nq;
    d.np = g.np;
    d.q_min = g.q_min;
    d.q_max = g.q_max;
    d.p_min = g.p_min;
    d.p_max = g.p_max;
    d.coeff = g.values;
    std::vector<double> buf;
    if (mode == Mode2D::square) {
        for (int l = 0; l < levels; ++l) {
            const int mq = g.nq >> l, mp = g.np >> l;
            for (int i = 0; i < mq; ++i) step_analyze(buf, &d.at(i, 0), mp, 1, f);
            for (int j = 0; j < mp; ++j) step_analyze(buf, &d.at(0, j), mq, d.np, f);
        }
    } else {
        for (int i = 0; i < g.nq; ++i)
            for (int l = 0; l < levels; ++l) step_analyze(buf, &d.at(i, 0), g.np >> l, 1, f);
        for (int j = 0; j < g.np; ++j)
            for (int l = 0; l < levels; ++l) step_analyze(buf, &d.at(0, j), g.nq >> l, d.np, f);
    }
    return d;
}

Grid2D idwt2(const Decomposition2D& d, const WaveletFilter& f) {
    check_dims(d.nq, d.np, f, d.levels);
    Grid2D g = make_grid(d.nq, d.np, d.q_min, d.q_max, d.p_min, d.p_max);
    g.values = d.coeff;
    std::vector<double> buf;
    auto cell = [&](int i, int j) -> double* { return &g.values[static_cast<size_t>(i) * d.np + j]; };
    if (d.mode == Mode2D::square) {
        for (int l = d.levels - 1; l >= 0; --l) {
            const int mq = d.nq >> l, mp = d.np >> l;
            for (int j = 0; j < mp; ++j) step_synthesize(buf, cell(0, j), mq, d.np, f);
            for (int i = 0; i < mq; ++i) step_synthesize(buf, cell(i, 0), mp, 1, f);
        }
    } else {
        for (int j = 0; j < d.np; ++j)
            for (int l = d.levels - 1; l >= 0; --l) step_synthesize(buf, cell(0, j), d.nq >> l, d.np, f);
        for (int i = 0; i < d.nq; ++i)
            for (int l = d.levels - 1; l >= 0; --l) step_synthesize(buf, cell(i, 0), d.np >> l, 1, f);
    }
    return g;
}

namespace {

Signal unit_1d(int n, const WaveletFilter& f, int level, int shift, bool wavelet) {
    const int J = max_levels(n);
    if (level < 0 || level >= J)
        throw IndexOutOfRange("basis level must be in [0, " + std::to_string(J - 1) + "], got " +
                              std::to_string(level));
    if (shift < 0 || shift >= (1 << level))
        throw IndexOutOfRange("shift must be in [0, 2^level), got " + std::to_string(shift));
    MraDecomposition dec;
    dec.signal_length = n;
    dec.levels = J - level;
    dec.coarse.assign(static_cast<size_t>(1) << level, 0.0);
    for (int l = level; l < J; ++l) dec.details.emplace_back(static_cast<size_t>(1) << l, 0.0);
    if (wavelet)
        dec.details[0][static_cast<size_t>(shift)] = 1.0;
    else
        dec.coarse[static_cast<size_t>(shift)] = 1.0;
    return idwt_periodic(dec, f);
}

}  // namespace

Signal unit_scaling(int n, const WaveletFilter& f, int level, int shift) {
    return unit_1d(n, f, level, shift, false);
}

Signal unit_wavelet(int n, const WaveletFilter& f, int level, int shift) {
    return unit_1d(n, f, level, shift, true);
}

Grid2D basis_function_2d(const WaveletFilter& f, TensorFamily family, int level_q, int level_p,
                         int shift_q, int shift_p, const Grid2D& domain) {
    const bool q_wavelet = family == TensorFamily::psi_phi || family == TensorFamily::psi_psi;
    const bool p_wavelet = family == TensorFamily::phi_psi || family == TensorFamily::psi_psi;
    Signal u = unit_1d(domain.nq, f, level_q, shift_q, q_wavelet);
    Signal v = unit_1d(domain.np, f, level_p, shift_p, p_wavelet);
    Grid2D g = make_grid(domain.nq, domain.np, domain.q_min, domain.q_max, domain.p_min,
                         domain.p_max);
    const double norm = 1.0 / std::sqrt(g.dq() * g.dp());
    for (int i = 0; i < g.nq; ++i)
        for (int j = 0; j < g.np; ++j) g.at(i, j) = u[static_cast<size_t>(i)] * v[static_cast<size_t>(j)] * norm;
    return g;
}

}  // namespace waveleton
