#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ringloc {

struct PropertyResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SelftestOptions {
    std::uint64_t seed = 1;
    int grid_side = 64;
    /// Fault injection for the mutation check: routes the "Radon" pathway of the
    /// translation-invariance property through the polar transform instead.
    bool inject_polar_fault = false;
};

/// Runs the invariant battery (equivariance theorems, Fourier/convolution
/// lemmas, Radon symmetry, Radon-vs-polar separation, FFT oracles).
std::vector<PropertyResult> run_selftest(const SelftestOptions& opt);

}  // namespace ringloc
