#pragma once

// Deterministic surrogate of the fishing setup: a 6-dof arm (yaw base plus
// five pitch joints) waves a rod, the hook hangs from the rod tip on an
// inextensible line and is integrated as a damped spherical pendulum.
// The outcome of an action is where the hook first drops below the water
// plane, plus optional Gaussian control noise.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sgim/core.hpp"

namespace sgim {

inline constexpr double kBaseHeight = 0.5;  // arm base above the water plane

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

struct EnvironmentConfig {
    std::array<double, kNumJoints> link_lengths{0.3, 0.3, 0.3, 0.3, 0.3, 0.3};
    double rod_length = 1.0;
    double line_length = 0.5;
    double joint_limit = std::numbers::pi / 2.0;
    std::pair<double, double> duration_range{0.5, 2.0};
    double control_timestep = 0.05;
    double pendulum_damping = 0.8;
    double gravity = 9.81;
    double water_height = 0.0;
    double noise_sigma = 0.073;
    double max_episode_time = 10.0;
    std::uint64_t seed = 0;

    void validate() const {
        for (double l : link_lengths)
            if (!(l > 0.0)) throw std::invalid_argument("link length must be > 0");
        if (!(rod_length > 0.0)) throw std::invalid_argument("rod_length must be > 0");
        if (!(line_length > 0.0)) throw std::invalid_argument("line_length must be > 0");
        if (!(joint_limit > 0.0)) throw std::invalid_argument("joint_limit must be > 0");
        if (!(duration_range.first > 0.0 && duration_range.second >= duration_range.first))
            throw std::invalid_argument("duration_range must be positive and ordered");
        if (!(control_timestep > 0.0)) throw std::invalid_argument("control_timestep must be > 0");
        if (!(pendulum_damping > 0.0)) throw std::invalid_argument("pendulum_damping must be > 0");
        if (!(gravity > 0.0)) throw std::invalid_argument("gravity must be > 0");
        if (!std::isfinite(water_height)) throw std::invalid_argument("water_height must be finite");
        if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");
        if (!(max_episode_time > 0.0)) throw std::invalid_argument("max_episode_time must be > 0");
    }

    double geometric_reach() const {
        double r = rod_length + line_length;
        for (double l : link_lengths) r += l;
        return r;
    }
};

// Quadratic Bezier joint trajectory with its own duration; holds the final
// angle once the duration has elapsed.
struct JointCurve {
    double p0 = 0.0, p1 = 0.0, p2 = 0.0;
    double duration = 1.0;

    double angle_at(double t) const {
        const double s = duration > 0.0 ? std::min(t / duration, 1.0) : 1.0;
        const double u = 1.0 - s;
        return u * u * p0 + 2.0 * s * u * p1 + s * s * p2;
    }
};

inline std::array<JointCurve, kNumJoints> decode_action(const Action& a, const EnvironmentConfig& cfg) {
    std::array<JointCurve, kNumJoints> curves;
    const double dur_mid = 0.5 * (cfg.duration_range.first + cfg.duration_range.second);
    const double dur_half = 0.5 * (cfg.duration_range.second - cfg.duration_range.first);
    for (std::size_t j = 0; j < kNumJoints; ++j) {
        curves[j].p0 = cfg.joint_limit * a.ctrl0(j);
        curves[j].p1 = cfg.joint_limit * a.ctrl1(j);
        curves[j].p2 = cfg.joint_limit * a.ctrl2(j);
        curves[j].duration = dur_mid + dur_half * a.duration_param(j);
    }
    return curves;
}

// Joint 0 yaws the working vertical plane; joints 1..5 pitch a chain of
// links inside it. Zero angles = fully extended horizontal. The rod extends
// along the last link's axis.
inline Vec3 forward_kinematics(const std::array<double, kNumJoints>& joint_angles,
                               const EnvironmentConfig& cfg) {
    double phi = 0.0;
    double r = cfg.link_lengths[0];
    double z = kBaseHeight;
    for (std::size_t j = 1; j < kNumJoints; ++j) {
        phi += joint_angles[j];
        r += cfg.link_lengths[j] * std::cos(phi);
        z += cfg.link_lengths[j] * std::sin(phi);
    }
    r += cfg.rod_length * std::cos(phi);
    z += cfg.rod_length * std::sin(phi);
    const double yaw = joint_angles[0];
    return {r * std::cos(yaw), r * std::sin(yaw), z};
}

struct EnvironmentState {
    std::array<double, kNumJoints> joint_angles{};
    Vec3 hook_position;
    Vec3 hook_velocity;
    double clock = 0.0;
};

struct ExecutionResult {
    TaskPoint outcome;
    bool timeout = false;
};

class FishingEnv {
public:
    explicit FishingEnv(const EnvironmentConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
        cfg_.validate();
    }

    const EnvironmentConfig& config() const { return cfg_; }

    TaskPoint rest_outcome() const {
        std::array<double, kNumJoints> zero{};
        const Vec3 tip = forward_kinematics(zero, cfg_);
        return {tip.x, tip.y};  // hook hangs straight below the tip
    }

    ExecutionResult execute(const Action& a) { return execute(a, nullptr); }

    // Same as execute, additionally recording the per-step state (no noise
    // is added to the trace itself).
    ExecutionResult execute_traced(const Action& a, std::vector<EnvironmentState>& trace) {
        return execute(a, &trace);
    }

private:
    ExecutionResult execute(const Action& a, std::vector<EnvironmentState>* trace) {
        const auto curves = decode_action(a, cfg_);
        const double dt_ctrl = cfg_.control_timestep;
        // The pendulum needs a finer step than the 50 ms control update to
        // keep the constrained integrator dissipative; joints still advance
        // and landings are still detected at control-step granularity.
        const std::size_t substeps =
            std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(dt_ctrl / 0.005)));
        const double dt = dt_ctrl / static_cast<double>(substeps);
        const double line = cfg_.line_length;

        auto angles_at = [&](double t) {
            std::array<double, kNumJoints> angles;
            for (std::size_t j = 0; j < kNumJoints; ++j) angles[j] = curves[j].angle_at(t);
            return angles;
        };

        Vec3 tip_prev = forward_kinematics(angles_at(0.0), cfg_);
        Vec3 tip_vel_prev{};
        Vec3 rel{0.0, 0.0, -line};  // hook hanging at rest below the tip
        Vec3 rel_vel{};
        Vec3 hook = tip_prev + rel;

        bool landed = false;
        double t = 0.0;
        const std::size_t total_steps =
            static_cast<std::size_t>(std::lround(cfg_.max_episode_time / dt_ctrl));
        for (std::size_t step = 1; step <= total_steps && !landed; ++step) {
            Vec3 tip = tip_prev;
            Vec3 tip_vel = tip_vel_prev;
            for (std::size_t s = 0; s < substeps; ++s) {
                t += dt;
                tip = forward_kinematics(angles_at(t), cfg_);
                tip_vel = (tip - tip_prev) / dt;
                const Vec3 tip_acc = (tip_vel - tip_vel_prev) / dt;

                // Support acceleration shifts effective gravity in the tip
                // frame. The line constraint is enforced by projection, which
                // supplies the tension force implicitly and keeps the scheme
                // dissipative where an explicit centripetal term is not.
                const Vec3 f = Vec3{0.0, 0.0, -cfg_.gravity} - tip_acc;
                const Vec3 acc = f - rel_vel * cfg_.pendulum_damping;

                rel_vel = rel_vel + acc * dt;
                rel = rel + rel_vel * dt;
                rel = rel * (line / rel.norm());
                const Vec3 u = rel / line;
                rel_vel = rel_vel - u * rel_vel.dot(u);

                tip_prev = tip;
                tip_vel_prev = tip_vel;
            }
            hook = tip + rel;

            const auto angles = angles_at(t);
            if (trace) trace->push_back({angles, hook, tip_vel + rel_vel, t});

            if (hook.z < cfg_.water_height) landed = true;
        }

        TaskPoint out{hook.x, hook.y};
        if (cfg_.noise_sigma > 0.0) {
            std::normal_distribution<double> noise(0.0, cfg_.noise_sigma);
            out.y1 += noise(rng_);
            out.y2 += noise(rng_);
        }
        return {out, !landed};
    }

    EnvironmentConfig cfg_;
    std::mt19937_64 rng_;
};

}  // namespace sgim
