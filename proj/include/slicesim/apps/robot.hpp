#pragma once

#include <cstdint>

namespace slicesim::apps {

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;  // rad, (-pi, pi]
};

/// Differential-drive geometry. Defaults are GoPiGo3-class values.
struct RobotGeometry {
    double wheel_radius = 0.033;  // m
    double axle_length = 0.117;   // m
    int ticks_per_rev = 360;

    void validate() const;
};

/// Maps an angle onto (-pi, pi].
double normalize_angle(double a);

struct RobotState {
    Pose pose;
    RobotGeometry geometry;
    double omega_left = 0.0;   // rad/s
    double omega_right = 0.0;  // rad/s
    std::int64_t encoder_left = 0;
    std::int64_t encoder_right = 0;
    // Fractional ticks not yet emitted, always in [0, 1).
    double residual_left = 0.0;
    double residual_right = 0.0;
};

/// Explicit Euler step of the unicycle model driven by the two wheel speeds.
/// Encoders accumulate wheel rotation and emit whole ticks.
RobotState robot_step(RobotState state, double dt);

/// Midpoint dead-reckoning from encoder increments.
Pose odometry_update(Pose estimate, std::int64_t delta_ticks_left, std::int64_t delta_ticks_right,
                     const RobotGeometry& geometry);

}  // namespace slicesim::apps
