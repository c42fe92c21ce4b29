#include "slicesim/apps/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "slicesim/common/error.hpp"

namespace slicesim::apps {

namespace {

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
Vec2 sub(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
double norm(Vec2 a) { return std::hypot(a.x, a.y); }

PathProjection project_line(const PathSpec& path, Vec2 p) {
    const double len = norm(path.direction);
    const Vec2 u{path.direction.x / len, path.direction.y / len};
    const Vec2 rel = sub(p, path.origin);
    return {cross(u, rel), std::atan2(u.y, u.x), dot(u, rel)};
}

PathProjection project_circle(const PathSpec& path, Vec2 p) {
    const Vec2 rel = sub(p, path.center);
    const double dist = norm(rel);
    // At the centre every point is nearest; parameter 0 is the +x point.
    const double angle = dist > 0.0 ? std::atan2(rel.y, rel.x) : 0.0;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    PathProjection out;
    if (!path.clockwise) {
        out.cross_track = path.radius - dist;
        out.tangent_heading = normalize_angle(angle + std::numbers::pi / 2.0);
        double a = std::fmod(angle + two_pi, two_pi);
        out.parameter = a * path.radius;
    } else {
        out.cross_track = dist - path.radius;
        out.tangent_heading = normalize_angle(angle - std::numbers::pi / 2.0);
        double a = std::fmod(two_pi - angle, two_pi);
        out.parameter = a * path.radius;
    }
    return out;
}

PathProjection project_polyline(const PathSpec& path, Vec2 p) {
    const auto& w = path.waypoints;
    const std::size_t segments = path.loop ? w.size() : w.size() - 1;
    double best_dist = std::numeric_limits<double>::infinity();
    double travelled = 0.0;
    PathProjection best;
    for (std::size_t i = 0; i < segments; ++i) {
        const Vec2 a = w[i];
        const Vec2 b = w[(i + 1) % w.size()];
        const Vec2 ab = sub(b, a);
        const double len = norm(ab);
        if (len == 0.0) continue;
        const double t = std::clamp(dot(sub(p, a), ab) / (len * len), 0.0, 1.0);
        const Vec2 nearest{a.x + t * ab.x, a.y + t * ab.y};
        const double dist = norm(sub(p, nearest));
        // Strict comparison keeps the earliest (lowest parameter) of equal candidates.
        if (dist < best_dist) {
            best_dist = dist;
            const double side = cross(ab, sub(p, a));
            best.cross_track = side > 0.0 ? dist : (side < 0.0 ? -dist : 0.0);
            best.tangent_heading = std::atan2(ab.y, ab.x);
            best.parameter = travelled + t * len;
        }
        travelled += len;
    }
    return best;
}

}  // namespace

void PathSpec::validate() const {
    switch (kind) {
        case PathKind::StraightLine:
            if (norm(direction) == 0.0) throw ConfigError("straight path needs a nonzero direction");
            break;
        case PathKind::Circle:
            if (!(radius > 0.0)) throw ConfigError("circle path needs radius > 0");
            break;
        case PathKind::Waypoints: {
            if (waypoints.size() < 2) throw ConfigError("waypoint path needs at least 2 points");
            bool moves = false;
            for (std::size_t i = 1; i < waypoints.size(); ++i) {
                moves |= norm(sub(waypoints[i], waypoints[i - 1])) > 0.0;
            }
            if (!moves) throw ConfigError("waypoint path has zero length");
            break;
        }
    }
    if (!(cruise_speed >= 0.0)) throw ConfigError("cruise speed must be non-negative");
}

PathProjection project_onto_path(const PathSpec& path, Vec2 position) {
    switch (path.kind) {
        case PathKind::StraightLine: return project_line(path, position);
        case PathKind::Circle: return project_circle(path, position);
        case PathKind::Waypoints: return project_polyline(path, position);
    }
    return {};
}

WheelCommand path_controller_step(const Pose& estimate, const PathSpec& path,
                                  const ControllerGains& gains, double v_ref,
                                  const RobotGeometry& geometry) {
    const auto proj = project_onto_path(path, {estimate.x, estimate.y});
    const double heading_error = normalize_angle(proj.tangent_heading - estimate.theta);
    double omega = -gains.k_cross_track * proj.cross_track + gains.k_heading * heading_error;
    omega = std::clamp(omega, -gains.omega_max, gains.omega_max);
    const double half_axle = geometry.axle_length / 2.0;
    return {(v_ref - omega * half_axle) / geometry.wheel_radius,
            (v_ref + omega * half_axle) / geometry.wheel_radius};
}

}  // namespace slicesim::apps
