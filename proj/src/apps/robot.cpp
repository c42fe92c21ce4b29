#include "slicesim/apps/robot.hpp"

#include <cmath>
#include <numbers>

#include "slicesim/common/error.hpp"

namespace slicesim::apps {

void RobotGeometry::validate() const {
    if (!(wheel_radius > 0.0) || !(axle_length > 0.0) || ticks_per_rev <= 0) {
        throw ConfigError("robot geometry needs wheel_radius > 0, axle_length > 0, ticks_per_rev > 0");
    }
}

double normalize_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a <= -std::numbers::pi) a += two_pi;
    if (a > std::numbers::pi) a -= two_pi;
    return a;
}

namespace {

void advance_encoder(std::int64_t& ticks, double& residual, double wheel_omega, double dt,
                     int ticks_per_rev) {
    const double exact = residual + wheel_omega * dt * ticks_per_rev / (2.0 * std::numbers::pi);
    const double whole = std::floor(exact);
    ticks += static_cast<std::int64_t>(whole);
    residual = exact - whole;
}

}  // namespace

RobotState robot_step(RobotState s, double dt) {
    const double r = s.geometry.wheel_radius;
    const double v = r * (s.omega_left + s.omega_right) / 2.0;
    const double w = r * (s.omega_right - s.omega_left) / s.geometry.axle_length;
    s.pose.x += v * std::cos(s.pose.theta) * dt;
    s.pose.y += v * std::sin(s.pose.theta) * dt;
    s.pose.theta = normalize_angle(s.pose.theta + w * dt);
    advance_encoder(s.encoder_left, s.residual_left, s.omega_left, dt, s.geometry.ticks_per_rev);
    advance_encoder(s.encoder_right, s.residual_right, s.omega_right, dt, s.geometry.ticks_per_rev);
    return s;
}

Pose odometry_update(Pose p, std::int64_t dl, std::int64_t dr, const RobotGeometry& g) {
    const double per_tick = 2.0 * std::numbers::pi * g.wheel_radius / g.ticks_per_rev;
    const double sl = static_cast<double>(dl) * per_tick;
    const double sr = static_cast<double>(dr) * per_tick;
    const double ds = (sl + sr) / 2.0;
    const double dtheta = (sr - sl) / g.axle_length;
    const double mid = p.theta + dtheta / 2.0;
    p.x += ds * std::cos(mid);
    p.y += ds * std::sin(mid);
    p.theta = normalize_angle(p.theta + dtheta);
    return p;
}

}  // namespace slicesim::apps
