#include "ringloc/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ringloc/geometry.hpp"

namespace ringloc {

std::vector<double> bimodal_target(double theta_star, int n_theta, double sigma_bins) {
    if (n_theta <= 0 || n_theta % 2 != 0)
        throw std::invalid_argument("bimodal_target: n_theta must be positive and even");
    if (sigma_bins <= 0.0) throw std::invalid_argument("bimodal_target: sigma_bins must be > 0");
    const int mode = static_cast<int>(std::lround(wrap_angle(theta_star) * n_theta / kTwoPi)) % n_theta;
    const int mode2 = (mode + n_theta / 2) % n_theta;
    std::vector<double> p(n_theta, 0.0);
    for (int k = 0; k < n_theta; ++k) {
        for (int center : {mode, mode2}) {
            int d = std::abs(k - center);
            d = std::min(d, n_theta - d);  // circular wrap
            p[k] += std::exp(-0.5 * (static_cast<double>(d) * d) / (sigma_bins * sigma_bins));
        }
    }
    double sum = 0.0;
    for (double v : p) sum += v;
    for (double& v : p) v /= sum;
    return p;
}

double rotation_kl_loss(const CorrVector& corr, double theta_star, double sigma_bins) {
    const std::vector<double> p = bimodal_target(theta_star, corr.size(), sigma_bins);
    const std::vector<double> q = softmax(corr.values);
    double kl = 0.0;
    for (int k = 0; k < corr.size(); ++k) {
        if (p[k] <= 0.0) continue;
        kl += p[k] * std::log(p[k] / q[k]);
    }
    return kl;
}

double translation_nll_loss(const CorrMap& corr, int x_star_cells, int y_star_cells) {
    const int half = corr.side - 1;
    if (std::abs(x_star_cells) > half || std::abs(y_star_cells) > half)
        throw std::out_of_range("translation_nll_loss: ground-truth shift out of range");
    // log softmax without materializing the full distribution.
    const double m = *std::max_element(corr.values.begin(), corr.values.end());
    double sum = 0.0;
    for (double v : corr.values) sum += std::exp(v - m);
    return -(corr.at(x_star_cells, y_star_cells) - m - std::log(sum));
}

}  // namespace ringloc
