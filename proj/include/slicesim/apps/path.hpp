#pragma once

#include <vector>

#include "slicesim/apps/robot.hpp"

namespace slicesim::apps {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

enum class PathKind { StraightLine, Circle, Waypoints };

/// Reference trajectory for the path controller.
struct PathSpec {
    PathKind kind = PathKind::StraightLine;
    // StraightLine
    Vec2 origin;
    Vec2 direction{1.0, 0.0};
    // Circle, traversed counter-clockwise unless `clockwise`
    Vec2 center;
    double radius = 1.0;
    bool clockwise = false;
    // Waypoints
    std::vector<Vec2> waypoints;
    bool loop = false;

    double cruise_speed = 0.2;  // m/s

    /// Throws ConfigError on degenerate geometry.
    void validate() const;
};

/// Nearest-point relation between a position and the path.
struct PathProjection {
    double cross_track = 0.0;      // signed, positive when left of the path
    double tangent_heading = 0.0;  // rad
    double parameter = 0.0;        // arc length of the nearest point
};

/// Ties between equally near points resolve to the lowest path parameter.
PathProjection project_onto_path(const PathSpec& path, Vec2 position);

struct ControllerGains {
    double k_cross_track = 20.0;  // 1/(m s)
    double k_heading = 4.0;       // 1/s
    double omega_max = 4.0;       // rad/s
};

struct WheelCommand {
    double omega_left = 0.0;
    double omega_right = 0.0;
};

/// Proportional steering on cross-track and heading error at cruise speed
/// v_ref, converted to wheel speeds by inverse differential-drive kinematics.
WheelCommand path_controller_step(const Pose& estimate, const PathSpec& path,
                                  const ControllerGains& gains, double v_ref,
                                  const RobotGeometry& geometry);

}  // namespace slicesim::apps
