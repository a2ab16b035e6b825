#pragma once

#include <cstdint>
#include <vector>

#include "ringloc/geometry.hpp"

namespace ringloc {

/// Platform-stable RNG (SplitMix64 core) so synthetic worlds are reproducible
/// byte-for-byte across runs and compilers.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed ^ 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }
    /// Box-Muller, fully deterministic.
    double gaussian();
};

/// Deterministic synthetic world: vertical structures (walls, boxes, poles)
/// with height variation plus sparse ground clutter, as a world-frame point set.
PointCloud generate_world(std::uint64_t seed, double extent_m, int n_structures);

/// Simulated observation: world points within max_range of the pose, expressed
/// in the sensor frame, with per-point dropout and Gaussian position noise.
PointCloud render_scan(const PointCloud& world, const Pose2& pose, double max_range_m,
                       double dropout_rate, double noise_sigma_m, std::uint64_t seed);

}  // namespace ringloc
