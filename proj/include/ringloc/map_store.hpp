#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ringloc/config.hpp"
#include "ringloc/repr.hpp"

namespace ringloc {

struct MapFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MapVersionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MapFingerprintError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MapTruncatedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Stored map observation: pose in the map frame plus precomputed
/// representations, all derived from `bev` under the database config.
struct Keyframe {
    int id = 0;
    Pose2 pose;
    BevGrid bev;       // multi-channel occupancy
    Spectrum spectrum; // L2-normalized rotation-branch representation
    BevGrid neural;    // L2-normalized single-channel translation-branch representation
};

struct KeyframeDatabase {
    PipelineConfig config;
    std::uint64_t fingerprint = 0;
    std::vector<Keyframe> keyframes;

    bool empty() const { return keyframes.empty(); }
    std::size_t size() const { return keyframes.size(); }
};

/// Builds the derived representations for one observation. The cloud is
/// ground-removed, voxelized, and encoded through both equivariant pathways.
Keyframe make_keyframe(int id, const Pose2& pose, const PointCloud& cloud,
                       const PipelineConfig& cfg, const FilterBank& bank);

/// Greedy interval sampling: an observation is kept when its XY distance to the
/// last kept pose is >= interval_m (the first is always kept). Representations
/// are precomputed, optionally in parallel (output independent of thread count).
KeyframeDatabase build_map(const std::vector<std::pair<PointCloud, Pose2>>& observations,
                           double interval_m, const PipelineConfig& cfg, int n_threads = 1);

void save_map(const KeyframeDatabase& db, const std::string& path);
KeyframeDatabase load_map(const std::string& path);

/// Keyframe with minimal XY distance to the pose; ties break to the smaller id.
std::pair<int, double> nearest_keyframe(const KeyframeDatabase& db, const Pose2& pose);

/// Poses file: ASCII "id theta x y" lines, '#' comments.
std::vector<std::pair<int, Pose2>> load_poses(const std::string& path);
void save_poses(const std::vector<std::pair<int, Pose2>>& poses, const std::string& path);

}  // namespace ringloc
