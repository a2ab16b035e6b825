#pragma once

#include <vector>

#include "ringloc/correlation.hpp"

namespace ringloc {

/// Circular-wrapped bimodal Gaussian over n_theta bins with equal-weight modes
/// at the bins of theta_star and theta_star - pi, normalized to sum 1.
std::vector<double> bimodal_target(double theta_star, int n_theta, double sigma_bins);

/// KL(p || softmax(corr)) with p the bimodal target. Terms with p = 0 contribute 0.
double rotation_kl_loss(const CorrVector& corr, double theta_star, double sigma_bins);

/// -log softmax(corr) at the ground-truth shift cell.
double translation_nll_loss(const CorrMap& corr, int x_star_cells, int y_star_cells);

}  // namespace ringloc
