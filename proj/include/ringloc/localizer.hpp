#pragma once

#include "ringloc/correlation.hpp"
#include "ringloc/map_store.hpp"

namespace ringloc {

/// Relative pose (query -> keyframe) with the branch scores it was ranked by.
struct PairEstimate {
    Pose2 pose;
    double rotation_score = 0.0;
    double translation_score = 0.0;
};

struct RankedRetrieval {
    std::vector<std::pair<int, PairEstimate>> entries;  // sorted: score desc, id asc
};

struct RotationEstimate {
    double theta_hat = 0.0;
    double theta_alt = 0.0;  // theta_hat + pi (the Radon ambiguity twin)
    double score = 0.0;
    CorrVector corr;
};

struct TranslationEstimate {
    double dx_m = 0.0;
    double dy_m = 0.0;
    int dx_cells = 0;
    int dy_cells = 0;
    double score = 0.0;
};

/// Correlates the two spectra over circular theta shifts. Both the peak angle
/// and its pi-offset twin are reported; the ambiguity is resolved downstream.
RotationEstimate estimate_rotation(const Spectrum& a_q, const Spectrum& a_m);

/// Rotates the query BEV by theta, filters both sides into neural BEVs, and
/// reads the relative translation off the 2D correlation peak (clipped to
/// max_translation_cells). `map_freq`, when supplied, reuses a cached map-side DFT.
TranslationEstimate estimate_translation(const BevGrid& b_q, const BevGrid& b_m, double theta,
                                         const FilterBank& bank, const LocalizerConfig& cfg,
                                         const GridFreq* map_freq = nullptr);

/// Full pair localization: rotation estimate, dual-hypothesis translation
/// scoring (resolves the pi-ambiguity), combined relative pose.
PairEstimate localize_pair(const Keyframe& query, const Keyframe& map_kf,
                           const FilterBank& bank, const LocalizerConfig& cfg);

/// Exhaustive PR-by-PE search: localize_pair against every keyframe, ranked by
/// translation score. Deterministic for any thread count.
RankedRetrieval pr_by_pe_search(const Keyframe& query, const KeyframeDatabase& db,
                                const LocalizerConfig& cfg, int n_threads = 1);

/// Local exhaustive 3-DoF refinement around the coarse angle. The coarse angle
/// is in the candidate set, so the returned score never drops.
PairEstimate refine_pose(const Keyframe& query, const Keyframe& map_kf, const PairEstimate& coarse,
                         const FilterBank& bank, const LocalizerConfig& cfg);

struct IcpResult {
    Pose2 pose;
    double residual_m = 0.0;
    int iterations = 0;
    bool degenerate = false;
};

/// 2D point-to-point ICP on ground-removed XY projections with a monotone
/// residual acceptance rule. Degenerate (collinear) geometry returns init flagged.
IcpResult icp_refine(const PointCloud& query_cloud, const PointCloud& map_cloud,
                     const Pose2& init, const LocalizerConfig& cfg);

/// T^M_Q = T^M_{M_i} * T^{M_i}_Q.
Pose2 compose_global_pose(const Pose2& map_pose, const Pose2& relative);

}  // namespace ringloc
