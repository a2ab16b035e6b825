#pragma once

#include <cstdint>
#include <vector>

#include "ringloc/bev.hpp"

namespace ringloc {

/// Radon-space representation S(theta, tau): n_theta angle bins over [0, 2*pi),
/// n_tau signed offset bins symmetric about 0 (one per grid column).
struct Sinogram {
    int n_theta = 0;
    int n_tau = 0;
    int channels = 1;
    std::vector<float> data;  // [theta][tau][channel] -> plane-major per channel

    Sinogram() = default;
    Sinogram(int nt, int ntau, int ch)
        : n_theta(nt), n_tau(ntau), channels(ch),
          data(static_cast<std::size_t>(nt) * ntau * ch, 0.f) {}

    float& at(int t, int tau, int c = 0) {
        return data[(static_cast<std::size_t>(c) * n_theta + t) * n_tau + tau];
    }
    float at(int t, int tau, int c = 0) const {
        return data[(static_cast<std::size_t>(c) * n_theta + t) * n_tau + tau];
    }
};

/// Per-row Fourier magnitudes of a sinogram along tau: rotation equivariant,
/// translation invariant. DC dropped, lowest n_omega frequency bins kept.
struct Spectrum {
    int n_theta = 0;
    int n_omega = 0;
    std::vector<float> data;  // row-major [theta][omega]

    Spectrum() = default;
    Spectrum(int nt, int nw) : n_theta(nt), n_omega(nw), data(static_cast<std::size_t>(nt) * nw, 0.f) {}

    float& at(int t, int w) { return data[static_cast<std::size_t>(t) * n_omega + w]; }
    float at(int t, int w) const { return data[static_cast<std::size_t>(t) * n_omega + w]; }
};

/// Polar resampling p(theta, r); falsification baseline for the Radon pathway.
struct PolarGrid {
    int n_theta = 0;
    int n_r = 0;
    std::vector<float> data;  // row-major [theta][r]

    PolarGrid() = default;
    PolarGrid(int nt, int nr) : n_theta(nt), n_r(nr), data(static_cast<std::size_t>(nt) * nr, 0.f) {}

    float& at(int t, int r) { return data[static_cast<std::size_t>(t) * n_r + r]; }
    float at(int t, int r) const { return data[static_cast<std::size_t>(t) * n_r + r]; }
};

/// Fixed, deterministic stand-in for the learned feature extractors: per-channel
/// aggregation weights (nonnegative, summing to 1) plus small convolution
/// kernels, 1D circular along theta and 2D zero-padded on the BEV plane.
struct FilterBank {
    std::vector<float> weights;    // one per input channel
    std::vector<float> kernel1d;   // odd length, applied along theta
    std::vector<float> kernel2d;   // k2 x k2 row-major
    int k2 = 1;

    static FilterBank identity(int channels);
    /// Seeded random bank: random normalized weights and smoothing kernels.
    static FilterBank seeded(int channels, std::uint64_t seed);
};

struct ReprConfig {
    int n_theta = 0;  // 0 -> side_cells
    int n_omega = 0;  // 0 -> n_tau / 4
};

/// Rotate-and-sum Radon transform, per channel. Row k integrates along lines
/// at angle theta_k = 2*pi*k/n_theta; tau bin = grid column of the rotated grid.
Sinogram radon_transform(const BevGrid& grid, int n_theta = 0);

/// Bilinear polar resampling about the grid center of channel 0.
PolarGrid polar_transform(const BevGrid& grid, int n_theta = 0);

/// Weighted channel sum followed by the bank's circular 1D convolution along theta.
Sinogram aggregate_channels(const Sinogram& sino, const FilterBank& bank);

/// Per-row DFT magnitude along tau; DC dropped, lowest n_omega bins kept.
Spectrum magnitude_spectrum(const Sinogram& sino, int n_omega = 0);

/// Weighted channel sum followed by the bank's 2D convolution (zero padding,
/// same size): the translation-equivariant neural BEV.
BevGrid neural_bev(const BevGrid& grid, const FilterBank& bank);

/// Weighted channel sum only (the linear part of neural_bev / the Radon input).
BevGrid collapse_channels(const BevGrid& grid, const FilterBank& bank);

/// Same construction applied to the polar pathway, for the equivariance
/// comparison study: per-row DFT magnitude of the polar grid along r.
Spectrum polar_magnitude_spectrum(const PolarGrid& polar, int n_omega = 0);

void l2_normalize(Spectrum& spec);
void l2_normalize(BevGrid& grid);

}  // namespace ringloc
