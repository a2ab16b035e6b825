#include "ringloc/geometry.hpp"

namespace ringloc {

Pose2 compose(const Pose2& a, const Pose2& b) {
    double bx, by;
    apply_pose(a, b.x, b.y, bx, by);
    return Pose2(a.theta + b.theta, bx, by);
}

Pose2 inverse(const Pose2& p) {
    const double c = std::cos(p.theta), s = std::sin(p.theta);
    // R^T * (-t)
    return Pose2(-p.theta, -(c * p.x + s * p.y), -(-s * p.x + c * p.y));
}

PointCloud transform_cloud(const PointCloud& cloud, const Pose2& pose) {
    PointCloud out;
    out.points.reserve(cloud.size());
    const double c = std::cos(pose.theta), s = std::sin(pose.theta);
    for (const Point3& p : cloud.points) {
        Point3 q;
        q.x = static_cast<float>(c * p.x - s * p.y + pose.x);
        q.y = static_cast<float>(s * p.x + c * p.y + pose.y);
        q.z = p.z;
        out.points.push_back(q);
    }
    return out;
}

void pose_errors(const Pose2& est, const Pose2& gt, double& re_deg, double& te_m) {
    re_deg = angular_distance(est.theta, gt.theta) * 180.0 / (kTwoPi / 2.0);
    Pose2 delta = compose(inverse(gt), est);
    te_m = std::hypot(delta.x, delta.y);
}

}  // namespace ringloc
