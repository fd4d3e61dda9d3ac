#include "waveleton/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "waveleton/errors.hpp"

namespace waveleton {

namespace {

// FFTW plan creation/destruction is not thread safe; execution of a plan on
// its own arrays is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

void transform_inplace(std::vector<std::complex<double>>& a, int sign) {
    if (a.empty()) throw BadLength("fft: empty input");
    auto* data = reinterpret_cast<fftw_complex*>(a.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(a.size()), data, data, sign, FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw Error("fft: planner failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
}

}  // namespace

void fft_forward(std::vector<std::complex<double>>& a) { transform_inplace(a, FFTW_FORWARD); }

void fft_backward(std::vector<std::complex<double>>& a) { transform_inplace(a, FFTW_BACKWARD); }

std::vector<double> fft_derivative(const std::vector<double>& s, int order, double period) {
    if (s.empty()) throw BadLength("fft_derivative: empty input");
    if (order < 0) throw BadParams("fft_derivative: negative order");
    if (!(period > 0.0) || !std::isfinite(period))
        throw BadParams("fft_derivative: period must be positive");
    const int n = static_cast<int>(s.size());
    if (order == 0) return s;

    std::vector<std::complex<double>> a(s.begin(), s.end());
    fft_forward(a);
    const double base = 2.0 * std::numbers::pi / period;
    for (int k = 0; k < n; ++k) {
        int signed_k = (k <= n / 2) ? k : k - n;
        if (k == n / 2 && n % 2 == 0 && order % 2 == 1) signed_k = 0;  // keep result real
        const std::complex<double> ik(0.0, base * signed_k);
        a[k] *= std::pow(ik, order);
    }
    fft_backward(a);
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) out[k] = a[k].real() / n;
    return out;
}

}  // namespace waveleton
