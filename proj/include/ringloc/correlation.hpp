#pragma once

#include <complex>
#include <vector>

#include "ringloc/repr.hpp"

namespace ringloc {

/// c(d) over circular angle shifts d in [0, n_theta).
struct CorrVector {
    std::vector<double> values;

    int size() const { return static_cast<int>(values.size()); }
};

/// Full linear 2D cross-correlation over signed cell shifts in
/// [-(side-1), side-1]^2, stored row-major with index (d + side - 1).
struct CorrMap {
    int side = 0;  // input grid side
    std::vector<double> values;

    int dim() const { return 2 * side - 1; }
    double at(int dx, int dy) const {
        return values[static_cast<std::size_t>(dx + side - 1) * dim() + (dy + side - 1)];
    }
    double& at(int dx, int dy) {
        return values[static_cast<std::size_t>(dx + side - 1) * dim() + (dy + side - 1)];
    }
};

struct Peak1D {
    double score = 0.0;
    int index = 0;
};

struct Peak2D {
    double score = 0.0;
    int dx = 0, dy = 0;
};

/// Cached per-column DFTs of a spectrum, reused across correlations.
struct SpectrumFreq {
    int n_theta = 0;
    int n_omega = 0;
    std::vector<std::complex<double>> cols;  // [omega][n_theta/2+1]

    static SpectrumFreq of(const Spectrum& spec);
};

/// Cached zero-padded 2D DFT of a single-channel grid.
struct GridFreq {
    int side = 0;
    int padded = 0;
    std::vector<std::complex<double>> freq;  // padded x (padded/2+1)

    static GridFreq of(const BevGrid& grid);
};

/// c(d) = sum_theta sum_omega a(theta, omega) * b((theta - d) mod n_theta, omega),
/// via per-column Fourier products summed over omega.
CorrVector circular_xcorr_1d(const Spectrum& a, const Spectrum& b);
CorrVector circular_xcorr_1d(const SpectrumFreq& a, const SpectrumFreq& b);

/// Full linear cross-correlation: c(dx, dy) = sum a(x, y) * b(x - dx, y - dy),
/// via zero-padded Fourier products. Inputs must be equal square single-channel grids.
CorrMap xcorr_2d(const BevGrid& a, const BevGrid& b);
CorrMap xcorr_2d(const GridFreq& a, const GridFreq& b);

/// First maximum in scan order (deterministic tie-break).
Peak1D peak(const CorrVector& corr);
Peak2D peak(const CorrMap& corr);
/// Peak restricted to |dx|, |dy| <= max_cells.
Peak2D peak_within(const CorrMap& corr, int max_cells);

/// Max-subtracted softmax; sums to 1.
std::vector<double> softmax(const std::vector<double>& values);

}  // namespace ringloc
