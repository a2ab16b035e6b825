#pragma once

#include <cstdint>

#include "ringloc/bev.hpp"

namespace ringloc {

/// Parameters of the exhaustive localizer.
struct LocalizerConfig {
    double refine_window_deg = 2.25;   // one default theta-bin at n_theta = 160
    double refine_step_deg = 0.5625;   // bin / 4
    int max_translation_cells = 80;    // side / 2
    bool icp_enabled = false;
    int icp_max_iters = 30;
    double icp_tol_m = 1e-3;

    void validate() const {
        if (refine_window_deg < 0.0 || refine_step_deg <= 0.0 ||
            max_translation_cells <= 0 || icp_max_iters <= 0 || icp_tol_m <= 0.0)
            throw std::invalid_argument("LocalizerConfig: parameters must be positive");
    }
};

/// Everything that determines the representations stored in a map. Two maps
/// (or a map and a query pipeline) are comparable only when these match.
struct PipelineConfig {
    GridSpec grid;
    double ground_z_m = 0.3;
    int n_theta = 0;        // 0 -> grid.side_cells
    int n_omega = 0;        // 0 -> n_tau / 4
    std::uint64_t bank_seed = 0;  // 0 -> identity filter bank
    LocalizerConfig localizer;

    int theta_bins() const { return n_theta > 0 ? n_theta : grid.side_cells; }
    int omega_bins() const { return n_omega > 0 ? n_omega : grid.side_cells / 4; }

    /// FNV-1a over the representation-relevant fields; embedded in map files so
    /// mixed-config comparisons fail loudly.
    std::uint64_t fingerprint() const;
};

}  // namespace ringloc
