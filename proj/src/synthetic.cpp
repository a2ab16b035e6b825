#include "ringloc/synthetic.hpp"

#include <cmath>
#include <stdexcept>

namespace ringloc {

double Rng::gaussian() {
    double u1 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

namespace {

void add_column(PointCloud& cloud, Rng& rng, double x, double y, double height,
                double jitter) {
    for (double z = 0.4; z < height; z += 0.35) {
        Point3 p;
        p.x = static_cast<float>(x + jitter * (rng.uniform() - 0.5));
        p.y = static_cast<float>(y + jitter * (rng.uniform() - 0.5));
        p.z = static_cast<float>(z + 0.1 * (rng.uniform() - 0.5));
        cloud.points.push_back(p);
    }
}

void add_wall(PointCloud& cloud, Rng& rng, double extent) {
    const double x0 = rng.uniform(-extent / 2, extent / 2);
    const double y0 = rng.uniform(-extent / 2, extent / 2);
    const double len = rng.uniform(6.0, 22.0);
    const double dir = rng.uniform(0.0, kTwoPi);
    const double height = rng.uniform(2.5, 8.0);
    const double c = std::cos(dir), s = std::sin(dir);
    for (double d = 0.0; d < len; d += 0.4)
        add_column(cloud, rng, x0 + d * c, y0 + d * s, height * (0.7 + 0.3 * rng.uniform()), 0.1);
}

void add_box(PointCloud& cloud, Rng& rng, double extent) {
    const double cx = rng.uniform(-extent / 2, extent / 2);
    const double cy = rng.uniform(-extent / 2, extent / 2);
    const double w = rng.uniform(2.0, 8.0), h = rng.uniform(2.0, 8.0);
    const double yaw = rng.uniform(0.0, kTwoPi);
    const double height = rng.uniform(2.0, 6.0);
    const double c = std::cos(yaw), s = std::sin(yaw);
    auto edge = [&](double ax, double ay, double bx, double by) {
        const double len = std::hypot(bx - ax, by - ay);
        for (double d = 0.0; d < len; d += 0.45) {
            const double lx = ax + (bx - ax) * d / len, ly = ay + (by - ay) * d / len;
            add_column(cloud, rng, cx + c * lx - s * ly, cy + s * lx + c * ly, height, 0.08);
        }
    };
    edge(-w / 2, -h / 2, w / 2, -h / 2);
    edge(w / 2, -h / 2, w / 2, h / 2);
    edge(w / 2, h / 2, -w / 2, h / 2);
    edge(-w / 2, h / 2, -w / 2, -h / 2);
}

void add_pole(PointCloud& cloud, Rng& rng, double extent) {
    const double x = rng.uniform(-extent / 2, extent / 2);
    const double y = rng.uniform(-extent / 2, extent / 2);
    const double height = rng.uniform(1.5, 7.0);
    for (int k = 0; k < 3; ++k) add_column(cloud, rng, x, y, height, 0.15);
}

}  // namespace

PointCloud generate_world(std::uint64_t seed, double extent_m, int n_structures) {
    if (extent_m <= 0.0) throw std::invalid_argument("generate_world: extent must be > 0");
    Rng rng(seed);
    PointCloud world;
    for (int i = 0; i < n_structures; ++i) {
        switch (rng.uniform_int(3)) {
            case 0: add_wall(world, rng, extent_m); break;
            case 1: add_box(world, rng, extent_m); break;
            default: add_pole(world, rng, extent_m); break;
        }
    }
    // Sparse ground clutter below the default ground threshold.
    if (n_structures > 0) {
        const int n_ground = n_structures * 20;
        for (int i = 0; i < n_ground; ++i) {
            Point3 p;
            p.x = static_cast<float>(rng.uniform(-extent_m / 2, extent_m / 2));
            p.y = static_cast<float>(rng.uniform(-extent_m / 2, extent_m / 2));
            p.z = static_cast<float>(rng.uniform(-0.05, 0.25));
            world.points.push_back(p);
        }
    }
    return world;
}

PointCloud render_scan(const PointCloud& world, const Pose2& pose, double max_range_m,
                       double dropout_rate, double noise_sigma_m, std::uint64_t seed) {
    if (dropout_rate < 0.0 || dropout_rate > 1.0)
        throw std::invalid_argument("render_scan: dropout_rate must be in [0, 1]");
    Rng rng(seed);
    const Pose2 inv = inverse(pose);
    PointCloud scan;
    for (const Point3& p : world.points) {
        const double d = std::hypot(p.x - pose.x, p.y - pose.y);
        if (d > max_range_m) continue;
        if (dropout_rate > 0.0 && rng.uniform() < dropout_rate) continue;
        double sx, sy;
        apply_pose(inv, p.x, p.y, sx, sy);
        Point3 q;
        if (noise_sigma_m > 0.0) {
            q.x = static_cast<float>(sx + noise_sigma_m * rng.gaussian());
            q.y = static_cast<float>(sy + noise_sigma_m * rng.gaussian());
            q.z = static_cast<float>(p.z + noise_sigma_m * rng.gaussian());
        } else {
            q.x = static_cast<float>(sx);
            q.y = static_cast<float>(sy);
            q.z = p.z;
        }
        scan.points.push_back(q);
    }
    return scan;
}

}  // namespace ringloc
