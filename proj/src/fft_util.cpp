#include "ringloc/fft_util.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace ringloc::fft {
namespace {

enum class Kind { R2C_1D, C2R_1D, R2C_2D, C2R_2D };

using PlanKey = std::tuple<Kind, int, int>;

// Plan creation is not thread-safe in FFTW; executions on distinct arrays are.
// Plans are built once per (kind, size) with FFTW_UNALIGNED so they can be
// executed on arbitrary caller buffers via the new-array interface.
std::mutex g_plan_mutex;
std::map<PlanKey, fftw_plan> g_plans;

fftw_plan get_plan(Kind kind, int n0, int n1) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    const PlanKey key{kind, n0, n1};
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;

    const int nreal = (kind == Kind::R2C_1D || kind == Kind::C2R_1D) ? n0 : n0 * n1;
    const int ncplx = (kind == Kind::R2C_1D || kind == Kind::C2R_1D) ? n0 / 2 + 1
                                                                     : n0 * (n1 / 2 + 1);
    double* re = fftw_alloc_real(nreal);
    fftw_complex* cx = fftw_alloc_complex(ncplx);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = nullptr;
    switch (kind) {
        case Kind::R2C_1D: plan = fftw_plan_dft_r2c_1d(n0, re, cx, flags); break;
        case Kind::C2R_1D: plan = fftw_plan_dft_c2r_1d(n0, cx, re, flags); break;
        case Kind::R2C_2D: plan = fftw_plan_dft_r2c_2d(n0, n1, re, cx, flags); break;
        case Kind::C2R_2D: plan = fftw_plan_dft_c2r_2d(n0, n1, cx, re, flags); break;
    }
    fftw_free(re);
    fftw_free(cx);
    g_plans.emplace(key, plan);
    return plan;
}

fftw_complex* fc(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }
const fftw_complex* fc(const std::complex<double>* p) {
    return reinterpret_cast<const fftw_complex*>(p);
}

}  // namespace

void forward_r2c(int n, const double* in, std::complex<double>* out) {
    fftw_execute_dft_r2c(get_plan(Kind::R2C_1D, n, 1), const_cast<double*>(in), fc(out));
}

void inverse_c2r(int n, const std::complex<double>* in, double* out) {
    // c2r destroys its input; work on a copy.
    std::vector<std::complex<double>> tmp(in, in + n / 2 + 1);
    fftw_execute_dft_c2r(get_plan(Kind::C2R_1D, n, 1), fc(tmp.data()), out);
    const double scale = 1.0 / n;
    for (int i = 0; i < n; ++i) out[i] *= scale;
}

void forward_r2c_2d(int n0, int n1, const double* in, std::complex<double>* out) {
    fftw_execute_dft_r2c(get_plan(Kind::R2C_2D, n0, n1), const_cast<double*>(in), fc(out));
}

void inverse_c2r_2d(int n0, int n1, std::complex<double>* in, double* out) {
    fftw_execute_dft_c2r(get_plan(Kind::C2R_2D, n0, n1), fc(in), out);
    const double scale = 1.0 / (static_cast<double>(n0) * n1);
    const std::size_t total = static_cast<std::size_t>(n0) * n1;
    for (std::size_t i = 0; i < total; ++i) out[i] *= scale;
}

int next_fast_size(int n) {
    while (true) {
        int m = n;
        while (m % 2 == 0) m /= 2;
        while (m % 3 == 0) m /= 3;
        while (m % 5 == 0) m /= 5;
        if (m == 1) return n;
        ++n;
    }
}

}  // namespace ringloc::fft
