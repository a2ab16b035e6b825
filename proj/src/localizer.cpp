#include "ringloc/localizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <unordered_map>

namespace ringloc {

RotationEstimate estimate_rotation(const Spectrum& a_q, const Spectrum& a_m) {
    // With map = rotate(query, theta), A_M(k) = A_Q(k - theta_bins): correlating
    // the map rows against shifted query rows peaks at d = theta_bins.
    RotationEstimate est;
    est.corr = circular_xcorr_1d(a_m, a_q);
    const Peak1D pk = peak(est.corr);
    const int n = est.corr.size();
    est.theta_hat = kTwoPi * pk.index / n;
    est.theta_alt = wrap_angle(est.theta_hat + kTwoPi / 2.0);
    est.score = pk.score;
    return est;
}

namespace {

/// conv2 + normalize applied to an already channel-collapsed grid.
BevGrid filtered_neural(const BevGrid& collapsed, const FilterBank& bank) {
    FilterBank single;
    single.weights = {1.f};
    single.kernel1d = {1.f};
    single.kernel2d = bank.kernel2d;
    single.k2 = bank.k2;
    BevGrid out = neural_bev(collapsed, single);
    l2_normalize(out);
    return out;
}

BevGrid collapse_if_needed(const BevGrid& grid, const FilterBank& bank) {
    if (grid.channels == 1) return grid;
    return collapse_channels(grid, bank);
}

}  // namespace

TranslationEstimate estimate_translation(const BevGrid& b_q, const BevGrid& b_m, double theta,
                                         const FilterBank& bank, const LocalizerConfig& cfg,
                                         const GridFreq* map_freq) {
    if (b_q.spec != b_m.spec)
        throw std::invalid_argument("estimate_translation: grid spec mismatch");
    // Channel collapse commutes with rotation, so rotate a single plane.
    BevGrid q_rot = rotate_grid(collapse_if_needed(b_q, bank), theta);
    BevGrid nq = filtered_neural(q_rot, bank);

    GridFreq local_freq;
    if (map_freq == nullptr) {
        BevGrid nm = filtered_neural(collapse_if_needed(b_m, bank), bank);
        local_freq = GridFreq::of(nm);
        map_freq = &local_freq;
    }
    const CorrMap corr = xcorr_2d(*map_freq, GridFreq::of(nq));
    const Peak2D pk = peak_within(corr, cfg.max_translation_cells);

    TranslationEstimate est;
    est.dx_cells = pk.dx;
    est.dy_cells = pk.dy;
    est.dx_m = pk.dx * b_q.spec.cell_size_m;
    est.dy_m = pk.dy * b_q.spec.cell_size_m;
    est.score = pk.score;
    return est;
}

PairEstimate localize_pair(const Keyframe& query, const Keyframe& map_kf,
                           const FilterBank& bank, const LocalizerConfig& cfg) {
    const RotationEstimate rot = estimate_rotation(query.spectrum, map_kf.spectrum);

    BevGrid nm = map_kf.neural;
    l2_normalize(nm);
    const GridFreq map_freq = GridFreq::of(nm);

    BevGrid collapsed = collapse_if_needed(query.bev, bank);
    const TranslationEstimate t_hat =
        estimate_translation(collapsed, map_kf.bev, rot.theta_hat, bank, cfg, &map_freq);
    const TranslationEstimate t_alt =
        estimate_translation(collapsed, map_kf.bev, rot.theta_alt, bank, cfg, &map_freq);

    const bool take_hat = t_hat.score >= t_alt.score;
    const TranslationEstimate& t = take_hat ? t_hat : t_alt;
    PairEstimate est;
    est.pose = Pose2(take_hat ? rot.theta_hat : rot.theta_alt, t.dx_m, t.dy_m);
    est.rotation_score = rot.score;
    est.translation_score = t.score;
    return est;
}

RankedRetrieval pr_by_pe_search(const Keyframe& query, const KeyframeDatabase& db,
                                const LocalizerConfig& cfg, int n_threads) {
    if (db.empty()) throw std::invalid_argument("pr_by_pe_search: empty database");
    const FilterBank bank = FilterBank::seeded(db.config.grid.n_z_channels, db.config.bank_seed);

    std::vector<std::pair<int, PairEstimate>> entries(db.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < db.size();) {
            const Keyframe& kf = db.keyframes[k];
            entries[k] = {kf.id, localize_pair(query, kf, bank, cfg)};
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second.translation_score != b.second.translation_score)
            return a.second.translation_score > b.second.translation_score;
        return a.first < b.first;
    });
    return RankedRetrieval{std::move(entries)};
}

PairEstimate refine_pose(const Keyframe& query, const Keyframe& map_kf, const PairEstimate& coarse,
                         const FilterBank& bank, const LocalizerConfig& cfg) {
    const double window = cfg.refine_window_deg * kTwoPi / 360.0;
    const double step = cfg.refine_step_deg * kTwoPi / 360.0;
    const int half_steps = window > 0.0 ? static_cast<int>(std::lround(window / step)) : 0;

    BevGrid nm = map_kf.neural;
    l2_normalize(nm);
    const GridFreq map_freq = GridFreq::of(nm);
    const BevGrid collapsed = collapse_if_needed(query.bev, bank);

    PairEstimate best = coarse;
    bool have = false;
    for (int k = -half_steps; k <= half_steps; ++k) {
        const double theta = coarse.pose.theta + k * step;
        const TranslationEstimate t =
            estimate_translation(collapsed, map_kf.bev, theta, bank, cfg, &map_freq);
        if (!have || t.score > best.translation_score) {
            best.pose = Pose2(theta, t.dx_m, t.dy_m);
            best.translation_score = t.score;
            have = true;
        }
    }
    return best;
}

namespace {

struct Grid2DIndex {
    double cell;
    std::unordered_map<std::int64_t, std::vector<int>> buckets;

    static std::int64_t key(int cx, int cy) {
        return (static_cast<std::int64_t>(cx) << 32) ^ static_cast<std::uint32_t>(cy);
    }

    Grid2DIndex(const std::vector<std::pair<double, double>>& pts, double cell_m) : cell(cell_m) {
        for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
            const int cx = static_cast<int>(std::floor(pts[i].first / cell));
            const int cy = static_cast<int>(std::floor(pts[i].second / cell));
            buckets[key(cx, cy)].push_back(i);
        }
    }

    /// Nearest point index within one cell ring, or -1.
    int nearest(const std::vector<std::pair<double, double>>& pts, double x, double y,
                double& best_d2) const {
        const int cx = static_cast<int>(std::floor(x / cell));
        const int cy = static_cast<int>(std::floor(y / cell));
        int best = -1;
        best_d2 = std::numeric_limits<double>::infinity();
        for (int dx = -1; dx <= 1; ++dx) {
            for (int dy = -1; dy <= 1; ++dy) {
                auto it = buckets.find(key(cx + dx, cy + dy));
                if (it == buckets.end()) continue;
                for (int i : it->second) {
                    const double ddx = pts[i].first - x, ddy = pts[i].second - y;
                    const double d2 = ddx * ddx + ddy * ddy;
                    if (d2 < best_d2) {
                        best_d2 = d2;
                        best = i;
                    }
                }
            }
        }
        return best;
    }
};

double mean_residual(const std::vector<std::pair<double, double>>& q,
                     const std::vector<std::pair<double, double>>& m, const Grid2DIndex& index,
                     const Pose2& T) {
    double sum = 0.0;
    int count = 0;
    for (const auto& [qx, qy] : q) {
        double tx, ty;
        apply_pose(T, qx, qy, tx, ty);
        double d2;
        if (index.nearest(m, tx, ty, d2) >= 0) {
            sum += std::sqrt(d2);
            ++count;
        }
    }
    return count > 0 ? sum / count : std::numeric_limits<double>::infinity();
}

}  // namespace

IcpResult icp_refine(const PointCloud& query_cloud, const PointCloud& map_cloud,
                     const Pose2& init, const LocalizerConfig& cfg) {
    if (query_cloud.empty() || map_cloud.empty())
        throw std::invalid_argument("icp_refine: clouds must be nonempty");

    std::vector<std::pair<double, double>> q, m;
    q.reserve(query_cloud.size());
    m.reserve(map_cloud.size());
    for (const Point3& p : query_cloud.points) q.emplace_back(p.x, p.y);
    for (const Point3& p : map_cloud.points) m.emplace_back(p.x, p.y);

    IcpResult result;
    result.pose = init;

    // Collinearity check on the map projection.
    {
        double mx = 0, my = 0;
        for (const auto& [x, y] : m) { mx += x; my += y; }
        mx /= m.size();
        my /= m.size();
        double sxx = 0, syy = 0, sxy = 0;
        for (const auto& [x, y] : m) {
            sxx += (x - mx) * (x - mx);
            syy += (y - my) * (y - my);
            sxy += (x - mx) * (y - my);
        }
        const double tr = sxx + syy;
        const double det = sxx * syy - sxy * sxy;
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
        const double lambda_min = tr / 2.0 - disc;
        if (tr <= 0.0 || lambda_min <= 1e-9 * tr) {
            result.degenerate = true;
            result.residual_m = mean_residual(q, m, Grid2DIndex(m, 2.0), init);
            return result;
        }
    }

    const Grid2DIndex index(m, 2.0);
    double residual = mean_residual(q, m, index, result.pose);
    result.residual_m = residual;

    for (int iter = 0; iter < cfg.icp_max_iters; ++iter) {
        // Pair transformed query points to map neighbors.
        double qcx = 0, qcy = 0, mcx = 0, mcy = 0;
        std::vector<std::pair<double, double>> tq, tm;
        for (const auto& [qx, qy] : q) {
            double tx, ty;
            apply_pose(result.pose, qx, qy, tx, ty);
            double d2;
            const int j = index.nearest(m, tx, ty, d2);
            if (j < 0) continue;
            tq.emplace_back(tx, ty);
            tm.push_back(m[j]);
            qcx += tx; qcy += ty;
            mcx += m[j].first; mcy += m[j].second;
        }
        if (tq.size() < 3) break;
        qcx /= tq.size(); qcy /= tq.size();
        mcx /= tq.size(); mcy /= tq.size();

        double sc = 0.0, ss = 0.0;
        for (std::size_t i = 0; i < tq.size(); ++i) {
            const double ax = tq[i].first - qcx, ay = tq[i].second - qcy;
            const double bx = tm[i].first - mcx, by = tm[i].second - mcy;
            sc += ax * bx + ay * by;
            ss += ax * by - ay * bx;
        }
        const double dtheta = std::atan2(ss, sc);
        const double c = std::cos(dtheta), s = std::sin(dtheta);
        Pose2 delta(dtheta, mcx - (c * qcx - s * qcy), mcy - (s * qcx + c * qcy));
        const Pose2 candidate = compose(delta, result.pose);

        const double cand_res = mean_residual(q, m, index, candidate);
        if (cand_res > residual) break;  // monotone acceptance
        const double change = residual - cand_res;
        result.pose = candidate;
        residual = cand_res;
        result.residual_m = residual;
        result.iterations = iter + 1;
        if (change < cfg.icp_tol_m) break;
    }
    return result;
}

Pose2 compose_global_pose(const Pose2& map_pose, const Pose2& relative) {
    return compose(map_pose, relative);
}

}  // namespace ringloc
