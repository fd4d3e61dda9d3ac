#include "waveleton/dwt.hpp"

#include <cmath>
#include <string>

#include "waveleton/errors.hpp"

namespace waveleton {

int log2_exact(int n) {
    if (n < 1 || (n & (n - 1)) != 0)
        throw BadLength("length must be a power of two, got " + std::to_string(n));
    int j = 0;
    while ((1 << j) < n) ++j;
    return j;
}

int max_levels(int n) { return log2_exact(n); }

int MraDecomposition::coarse_level() const { return log2_exact(signal_length) - levels; }

double MraDecomposition::energy() const {
    double e = 0.0;
    for (double v : coarse) e += v * v;
    for (const auto& d : details)
        for (double v : d) e += v * v;
    return e;
}

Signal MraDecomposition::flatten() const {
    Signal out;
    out.reserve(signal_length);
    out.insert(out.end(), coarse.begin(), coarse.end());
    for (const auto& d : details) out.insert(out.end(), d.begin(), d.end());
    return out;
}

std::pair<Signal, Signal> dwt_step(const Signal& s, const WaveletFilter& f) {
    const int n = static_cast<int>(s.size());
    const int L = f.length();
    const int half = n / 2;
    Signal a(half, 0.0), d(half, 0.0);
    for (int m = 0; m < half; ++m) {
        double ca = 0.0, cd = 0.0;
        for (int k = 0; k < L; ++k) {
            double v = s[(2 * m + k) % n];
            ca += f.h[k] * v;
            cd += f.g[k] * v;
        }
        a[m] = ca;
        d[m] = cd;
    }
    return {std::move(a), std::move(d)};
}

Signal idwt_step(const Signal& coarse, const Signal& detail, const WaveletFilter& f) {
    const int half = static_cast<int>(coarse.size());
    const int n = 2 * half;
    const int L = f.length();
    Signal s(n, 0.0);
    for (int m = 0; m < half; ++m) {
        for (int k = 0; k < L; ++k) {
            int i = (2 * m + k) % n;
            s[i] += f.h[k] * coarse[m] + f.g[k] * detail[m];
        }
    }
    return s;
}

MraDecomposition dwt_periodic(const Signal& s, const WaveletFilter& f, int levels) {
    const int n = static_cast<int>(s.size());
    const int J = log2_exact(n);
    if (n < f.length())
        throw BadLength("signal length " + std::to_string(n) +
                        " shorter than filter length " + std::to_string(f.length()));
    if (levels < 1 || levels > J)
        throw TooManyLevels("levels must be in [1, " + std::to_string(J) + "], got " +
                            std::to_string(levels));
    MraDecomposition out;
    out.signal_length = n;
    out.levels = levels;
    out.details.resize(levels);
    Signal cur = s;
    for (int l = 0; l < levels; ++l) {
        auto [a, d] = dwt_step(cur, f);
        // detail produced at step l belongs to level J - 1 - l; store
        // coarsest-first.
        out.details[levels - 1 - l] = std::move(d);
        cur = std::move(a);
    }
    out.coarse = std::move(cur);
    return out;
}

Signal idwt_periodic(const MraDecomposition& d, const WaveletFilter& f) {
    Signal cur = d.coarse;
    for (int t = 0; t < d.levels; ++t) cur = idwt_step(cur, d.details[t], f);
    if (static_cast<int>(cur.size()) != d.signal_length)
        throw ShapeMismatch("decomposition does not reassemble to signal_length");
    return cur;
}

}  // namespace waveleton
