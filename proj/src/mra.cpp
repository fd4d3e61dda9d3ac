#include "waveleton/mra.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "waveleton/errors.hpp"

namespace waveleton {

namespace {
MraDecomposition zeros_like(const MraDecomposition& d) {
    MraDecomposition z;
    z.signal_length = d.signal_length;
    z.levels = d.levels;
    z.coarse.assign(d.coarse.size(), 0.0);
    z.details.resize(d.details.size());
    for (size_t i = 0; i < d.details.size(); ++i) z.details[i].assign(d.details[i].size(), 0.0);
    return z;
}
}  // namespace

Signal reconstruct_coarse(const MraDecomposition& d, const WaveletFilter& f) {
    MraDecomposition z = zeros_like(d);
    z.coarse = d.coarse;
    return idwt_periodic(z, f);
}

Signal reconstruct_detail(const MraDecomposition& d, const WaveletFilter& f, int level) {
    const int c = d.coarse_level();
    const int J = log2_exact(d.signal_length);
    if (level < c || level >= J)
        throw LevelOutOfRange("detail level must be in [" + std::to_string(c) + ", " +
                       std::to_string(J - 1) + "], got " + std::to_string(level));
    MraDecomposition z = zeros_like(d);
    z.details[level - c] = d.details[level - c];
    return idwt_periodic(z, f);
}

MultiNorm multi_norm(const MraDecomposition& d) {
    MultiNorm mn;
    mn.coarse_level = d.coarse_level();
    for (double v : d.coarse) mn.coarse_energy += v * v;
    mn.detail_energies.reserve(d.details.size());
    for (const auto& lvl : d.details) {
        double e = 0.0;
        for (double v : lvl) e += v * v;
        mn.detail_energies.push_back(e);
    }
    mn.total = mn.coarse_energy;
    for (double e : mn.detail_energies) mn.total += e;
    return mn;
}

CutoffResult cutoff_level(const MraDecomposition& d, double eps) {
    if (eps < 0.0) throw BadParams("eps must be nonnegative");
    MultiNorm mn = multi_norm(d);
    const int c = mn.coarse_level;
    const int J = c + d.levels;
    // Finest level whose norm exceeds eps; everything finer is negligible.
    int exceeder = c - 1;
    for (int j = J - 1; j >= c; --j) {
        if (std::sqrt(mn.detail_energies[j - c]) > eps) {
            exceeder = j;
            break;
        }
    }
    // If even the finest level exceeds eps the cutoff cannot be certified.
    return {std::max(exceeder, c), exceeder < J - 1};
}

Signal kick_signal(int n, double center, double amplitude, double width_cells) {
    if (n < 1 || center < 0.0 || center >= 1.0 || width_cells <= 0.0)
        throw BadParams("kick: need n >= 1, center in [0,1), width > 0");
    Signal s(n, 0.0);
    double sigma = width_cells / n;
    for (int i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / n;
        // periodic distance to the center
        double dt = std::abs(t - center);
        dt = std::min(dt, 1.0 - dt);
        s[i] = amplitude * std::exp(-dt * dt / (2.0 * sigma * sigma));
    }
    return s;
}

Signal multikick_signal(int n, const std::vector<Kick>& kicks, double width_cells) {
    if (kicks.empty()) throw BadParams("multikick: need at least one kick");
    Signal s(n, 0.0);
    for (const auto& k : kicks) {
        Signal one = kick_signal(n, k.center, k.amplitude, width_cells);
        for (int i = 0; i < n; ++i) s[i] += one[i];
    }
    return s;
}

Signal rw_fractal_signal(int n, double a, int b, int terms) {
    if (n < 1 || a <= 0.0 || a >= 1.0 || b < 2 || terms < 1 || a * b <= 1.0)
        throw BadParams("rw_fractal: need a in (0,1), integer b >= 2, a*b > 1, terms >= 1");
    Signal s(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / n;
        double acc = 0.0;
        double ak = 1.0;
        double bk = 1.0;
        for (int k = 0; k < terms; ++k) {
            acc += ak * std::cos(bk * std::numbers::pi * t);
            ak *= a;
            bk *= b;
        }
        s[i] = acc;
    }
    return s;
}

}  // namespace waveleton
