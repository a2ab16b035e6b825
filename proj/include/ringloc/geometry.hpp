#pragma once

#include <cmath>
#include <vector>

namespace ringloc {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Normalize an angle into [0, 2*pi).
inline double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    return t;
}

/// Minimal circular distance between two angles, in [0, pi].
inline double angular_distance(double a, double b) {
    double d = std::fabs(wrap_angle(a) - wrap_angle(b));
    return d > kTwoPi / 2.0 ? kTwoPi - d : d;
}

/// SE(2) pose: rotation theta in [0, 2*pi) plus planar translation in meters.
struct Pose2 {
    double theta = 0.0;
    double x = 0.0;
    double y = 0.0;

    Pose2() = default;
    Pose2(double theta_, double x_, double y_) : theta(wrap_angle(theta_)), x(x_), y(y_) {}

    static Pose2 identity() { return {}; }
};

/// Composition a * b (apply b first, then a).
Pose2 compose(const Pose2& a, const Pose2& b);

Pose2 inverse(const Pose2& p);

/// Apply the pose to a planar point: R_theta * p + t.
inline void apply_pose(const Pose2& T, double px, double py, double& ox, double& oy) {
    const double c = std::cos(T.theta), s = std::sin(T.theta);
    ox = c * px - s * py + T.x;
    oy = s * px + c * py + T.y;
}

struct Point3 {
    float x = 0.f, y = 0.f, z = 0.f;
};

/// Unordered set of 3D points in the sensor frame. May be empty.
struct PointCloud {
    std::vector<Point3> points;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

/// Applies the SE(2) transform to the XY components of every point; z is kept.
PointCloud transform_cloud(const PointCloud& cloud, const Pose2& pose);

/// Rotation error [deg] and translation error [m] between two poses.
/// RE is the circular angular distance; TE is the planar distance of gt^-1 * est.
void pose_errors(const Pose2& est, const Pose2& gt, double& re_deg, double& te_m);

}  // namespace ringloc
