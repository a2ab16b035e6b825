#include "ringloc/repr.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "ringloc/fft_util.hpp"

namespace ringloc {

namespace {

// SplitMix64: fully specified, platform-stable stream for fixed banks.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

void normalize_sum(std::vector<float>& v) {
    double s = 0.0;
    for (float x : v) s += x;
    for (float& x : v) x = static_cast<float>(x / s);
}

}  // namespace

FilterBank FilterBank::identity(int channels) {
    FilterBank bank;
    bank.weights.assign(channels, 1.f / static_cast<float>(channels));
    bank.kernel1d = {1.f};
    bank.kernel2d = {1.f};
    bank.k2 = 1;
    return bank;
}

FilterBank FilterBank::seeded(int channels, std::uint64_t seed) {
    if (seed == 0) return identity(channels);
    SplitMix64 rng(seed);
    FilterBank bank;
    bank.weights.resize(channels);
    for (float& w : bank.weights) w = static_cast<float>(0.2 + rng.uniform());
    normalize_sum(bank.weights);
    bank.kernel1d.resize(5);
    for (float& k : bank.kernel1d) k = static_cast<float>(0.1 + rng.uniform());
    normalize_sum(bank.kernel1d);
    bank.k2 = 3;
    bank.kernel2d.resize(9);
    for (float& k : bank.kernel2d) k = static_cast<float>(0.1 + rng.uniform());
    normalize_sum(bank.kernel2d);
    return bank;
}

Sinogram radon_transform(const BevGrid& grid, int n_theta) {
    const int n = grid.side();
    if (n_theta <= 0) n_theta = n;
    Sinogram sino(n_theta, n, grid.channels);
    const double ctr = n / 2.0;
    const float cell = static_cast<float>(grid.spec.cell_size_m);
    std::vector<double> colsum(n);
    for (int k = 0; k < n_theta; ++k) {
        const double theta = kTwoPi * k / n_theta;
        // Sample the grid rotated by -theta; line integrals become column sums.
        const double c = std::cos(theta), s = std::sin(theta);
        for (int ch = 0; ch < grid.channels; ++ch) {
            const float* src = grid.plane(ch);
            std::fill(colsum.begin(), colsum.end(), 0.0);
            for (int i = 0; i < n; ++i) {
                const double pu = i + 0.5 - ctr;
                double acc = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double pv = j + 0.5 - ctr;
                    const double su = c * pu - s * pv + ctr;
                    const double sv = s * pu + c * pv + ctr;
                    acc += sample_bilinear(src, n, su, sv);
                }
                colsum[i] = acc;
            }
            for (int i = 0; i < n; ++i)
                sino.at(k, i, ch) = static_cast<float>(colsum[i]) * cell;
        }
    }
    return sino;
}

PolarGrid polar_transform(const BevGrid& grid, int n_theta) {
    const int n = grid.side();
    if (n_theta <= 0) n_theta = n;
    const int n_r = n / 2;
    PolarGrid polar(n_theta, n_r);
    const double ctr = n / 2.0;
    const float* src = grid.plane(0);
    for (int k = 0; k < n_theta; ++k) {
        const double theta = kTwoPi * k / n_theta;
        const double c = std::cos(theta), s = std::sin(theta);
        for (int kr = 0; kr < n_r; ++kr) {
            const double r = kr + 0.5;
            polar.at(k, kr) = sample_bilinear(src, n, ctr + r * c, ctr + r * s);
        }
    }
    return polar;
}

Sinogram aggregate_channels(const Sinogram& sino, const FilterBank& bank) {
    if (static_cast<int>(bank.weights.size()) != sino.channels)
        throw std::invalid_argument("aggregate_channels: bank/sinogram channel mismatch");
    Sinogram mixed(sino.n_theta, sino.n_tau, 1);
    for (int c = 0; c < sino.channels; ++c) {
        const float w = bank.weights[c];
        for (int t = 0; t < sino.n_theta; ++t)
            for (int tau = 0; tau < sino.n_tau; ++tau)
                mixed.at(t, tau) += w * sino.at(t, tau, c);
    }
    if (bank.kernel1d.size() == 1 && bank.kernel1d[0] == 1.f) return mixed;
    const int klen = static_cast<int>(bank.kernel1d.size());
    const int off = klen / 2;
    Sinogram out(sino.n_theta, sino.n_tau, 1);
    for (int t = 0; t < sino.n_theta; ++t) {
        for (int m = 0; m < klen; ++m) {
            const int src = ((t + m - off) % sino.n_theta + sino.n_theta) % sino.n_theta;
            const float w = bank.kernel1d[m];
            for (int tau = 0; tau < sino.n_tau; ++tau)
                out.at(t, tau) += w * mixed.at(src, tau);
        }
    }
    return out;
}

Spectrum magnitude_spectrum(const Sinogram& sino, int n_omega) {
    if (sino.channels != 1)
        throw std::invalid_argument("magnitude_spectrum: expects a single-channel sinogram");
    if (n_omega <= 0) n_omega = sino.n_tau / 4;
    if (n_omega > sino.n_tau / 2)
        throw std::invalid_argument("magnitude_spectrum: n_omega exceeds Nyquist");
    Spectrum spec(sino.n_theta, n_omega);
    std::vector<double> row(sino.n_tau);
    std::vector<std::complex<double>> freq(sino.n_tau / 2 + 1);
    for (int t = 0; t < sino.n_theta; ++t) {
        for (int tau = 0; tau < sino.n_tau; ++tau) row[tau] = sino.at(t, tau);
        fft::forward_r2c(sino.n_tau, row.data(), freq.data());
        for (int w = 0; w < n_omega; ++w)
            spec.at(t, w) = static_cast<float>(std::abs(freq[w + 1]));  // DC dropped
    }
    return spec;
}

Spectrum polar_magnitude_spectrum(const PolarGrid& polar, int n_omega) {
    if (n_omega <= 0) n_omega = polar.n_r / 4;
    if (n_omega > polar.n_r / 2)
        throw std::invalid_argument("polar_magnitude_spectrum: n_omega exceeds Nyquist");
    Spectrum spec(polar.n_theta, n_omega);
    std::vector<double> row(polar.n_r);
    std::vector<std::complex<double>> freq(polar.n_r / 2 + 1);
    for (int t = 0; t < polar.n_theta; ++t) {
        for (int r = 0; r < polar.n_r; ++r) row[r] = polar.at(t, r);
        fft::forward_r2c(polar.n_r, row.data(), freq.data());
        for (int w = 0; w < n_omega; ++w)
            spec.at(t, w) = static_cast<float>(std::abs(freq[w + 1]));
    }
    return spec;
}

BevGrid collapse_channels(const BevGrid& grid, const FilterBank& bank) {
    if (static_cast<int>(bank.weights.size()) != grid.channels)
        throw std::invalid_argument("collapse_channels: bank/grid channel mismatch");
    BevGrid out(grid.spec, 1);
    const int n = grid.side();
    float* dst = out.plane(0);
    for (int c = 0; c < grid.channels; ++c) {
        const float w = bank.weights[c];
        const float* src = grid.plane(c);
        for (std::size_t idx = 0; idx < static_cast<std::size_t>(n) * n; ++idx)
            dst[idx] += w * src[idx];
    }
    return out;
}

BevGrid neural_bev(const BevGrid& grid, const FilterBank& bank) {
    BevGrid mixed = collapse_channels(grid, bank);
    if (bank.k2 == 1 && bank.kernel2d[0] == 1.f) return mixed;
    const int n = grid.side();
    const int off = bank.k2 / 2;
    BevGrid out(grid.spec, 1);
    for (int i = 0; i < n; ++i) {
        for (int a = 0; a < bank.k2; ++a) {
            const int si = i + a - off;
            if (si < 0 || si >= n) continue;
            for (int b = 0; b < bank.k2; ++b) {
                const float w = bank.kernel2d[static_cast<std::size_t>(a) * bank.k2 + b];
                const int lo = std::max(0, off - b), hi = std::min(n, n + off - b);
                for (int j = lo; j < hi; ++j)
                    out.at(i, j) += w * mixed.at(si, j + b - off);
            }
        }
    }
    return out;
}

void l2_normalize(Spectrum& spec) {
    double norm = 0.0;
    for (float v : spec.data) norm += static_cast<double>(v) * v;
    norm = std::sqrt(norm);
    if (norm <= 0.0) return;
    for (float& v : spec.data) v = static_cast<float>(v / norm);
}

void l2_normalize(BevGrid& grid) {
    double norm = 0.0;
    for (float v : grid.data) norm += static_cast<double>(v) * v;
    norm = std::sqrt(norm);
    if (norm <= 0.0) return;
    for (float& v : grid.data) v = static_cast<float>(v / norm);
}

}  // namespace ringloc
