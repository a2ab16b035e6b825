#include "ringloc/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ringloc/fft_util.hpp"

namespace ringloc {

SpectrumFreq SpectrumFreq::of(const Spectrum& spec) {
    SpectrumFreq out;
    out.n_theta = spec.n_theta;
    out.n_omega = spec.n_omega;
    const int nb = spec.n_theta / 2 + 1;
    out.cols.resize(static_cast<std::size_t>(spec.n_omega) * nb);
    std::vector<double> col(spec.n_theta);
    for (int w = 0; w < spec.n_omega; ++w) {
        for (int t = 0; t < spec.n_theta; ++t) col[t] = spec.at(t, w);
        fft::forward_r2c(spec.n_theta, col.data(), out.cols.data() + static_cast<std::size_t>(w) * nb);
    }
    return out;
}

CorrVector circular_xcorr_1d(const SpectrumFreq& a, const SpectrumFreq& b) {
    if (a.n_theta != b.n_theta || a.n_omega != b.n_omega)
        throw std::invalid_argument("circular_xcorr_1d: shape mismatch");
    const int n = a.n_theta;
    const int nb = n / 2 + 1;
    std::vector<std::complex<double>> acc(nb, {0.0, 0.0});
    for (int w = 0; w < a.n_omega; ++w) {
        const auto* pa = a.cols.data() + static_cast<std::size_t>(w) * nb;
        const auto* pb = b.cols.data() + static_cast<std::size_t>(w) * nb;
        for (int k = 0; k < nb; ++k) acc[k] += pa[k] * std::conj(pb[k]);
    }
    CorrVector out;
    out.values.resize(n);
    fft::inverse_c2r(n, acc.data(), out.values.data());
    return out;
}

CorrVector circular_xcorr_1d(const Spectrum& a, const Spectrum& b) {
    return circular_xcorr_1d(SpectrumFreq::of(a), SpectrumFreq::of(b));
}

GridFreq GridFreq::of(const BevGrid& grid) {
    if (grid.channels != 1)
        throw std::invalid_argument("xcorr_2d: expects single-channel grids");
    GridFreq out;
    out.side = grid.side();
    out.padded = fft::next_fast_size(2 * out.side - 1);
    const int p = out.padded;
    std::vector<double> padded(static_cast<std::size_t>(p) * p, 0.0);
    const float* src = grid.plane(0);
    for (int i = 0; i < out.side; ++i)
        for (int j = 0; j < out.side; ++j)
            padded[static_cast<std::size_t>(i) * p + j] = src[static_cast<std::size_t>(i) * out.side + j];
    out.freq.resize(static_cast<std::size_t>(p) * (p / 2 + 1));
    fft::forward_r2c_2d(p, p, padded.data(), out.freq.data());
    return out;
}

CorrMap xcorr_2d(const GridFreq& a, const GridFreq& b) {
    if (a.side != b.side || a.padded != b.padded)
        throw std::invalid_argument("xcorr_2d: shape mismatch");
    const int p = a.padded;
    std::vector<std::complex<double>> prod(a.freq.size());
    for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = a.freq[k] * std::conj(b.freq[k]);
    std::vector<double> circ(static_cast<std::size_t>(p) * p);
    fft::inverse_c2r_2d(p, p, prod.data(), circ.data());

    CorrMap out;
    out.side = a.side;
    const int dim = out.dim();
    out.values.resize(static_cast<std::size_t>(dim) * dim);
    for (int dx = -(a.side - 1); dx <= a.side - 1; ++dx) {
        const int ix = (dx % p + p) % p;
        for (int dy = -(a.side - 1); dy <= a.side - 1; ++dy) {
            const int iy = (dy % p + p) % p;
            out.at(dx, dy) = circ[static_cast<std::size_t>(ix) * p + iy];
        }
    }
    return out;
}

CorrMap xcorr_2d(const BevGrid& a, const BevGrid& b) {
    if (a.side() != b.side())
        throw std::invalid_argument("xcorr_2d: shape mismatch");
    return xcorr_2d(GridFreq::of(a), GridFreq::of(b));
}

Peak1D peak(const CorrVector& corr) {
    if (corr.values.empty()) throw std::invalid_argument("peak: empty input");
    Peak1D best{corr.values[0], 0};
    for (int i = 1; i < corr.size(); ++i)
        if (corr.values[i] > best.score) best = {corr.values[i], i};
    return best;
}

Peak2D peak(const CorrMap& corr) {
    return peak_within(corr, corr.side - 1);
}

Peak2D peak_within(const CorrMap& corr, int max_cells) {
    if (corr.values.empty()) throw std::invalid_argument("peak: empty input");
    max_cells = std::min(max_cells, corr.side - 1);
    bool first = true;
    Peak2D best;
    for (int dx = -max_cells; dx <= max_cells; ++dx) {
        for (int dy = -max_cells; dy <= max_cells; ++dy) {
            const double v = corr.at(dx, dy);
            if (first || v > best.score) {
                best = {v, dx, dy};
                first = false;
            }
        }
    }
    return best;
}

std::vector<double> softmax(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("softmax: empty input");
    const double m = *std::max_element(values.begin(), values.end());
    std::vector<double> out(values.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = std::exp(values[i] - m);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

}  // namespace ringloc
