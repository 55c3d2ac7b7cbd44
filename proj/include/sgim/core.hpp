#pragma once

// Shared domain types for the fishing-rod goal-babbling experiment:
// actions, task-space points, episodes, and the similarity/competence
// formulas everything else is built on.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgim {

inline constexpr std::size_t kActionDim = 24;
inline constexpr std::size_t kNumJoints = 6;
inline constexpr double kDefaultEpsSim = -0.05;

struct TaskPoint {
    double y1 = 0.0;
    double y2 = 0.0;

    friend bool operator==(const TaskPoint& a, const TaskPoint& b) {
        return a.y1 == b.y1 && a.y2 == b.y2;
    }
};

inline double distance(const TaskPoint& p, const TaskPoint& q) {
    return std::hypot(p.y1 - q.y1, p.y2 - q.y2);
}

// 24 bounded scalars, joint-major: (p0, p1, p2, duration) per joint.
class Action {
public:
    Action() = default;

    explicit Action(const std::array<double, kActionDim>& params) : params_(params) {
        for (double v : params_) {
            if (!(v >= -1.0 && v <= 1.0))
                throw std::invalid_argument("Action component out of [-1, 1]: " + std::to_string(v));
        }
    }

    static Action clamped(const std::array<double, kActionDim>& params) {
        std::array<double, kActionDim> p = params;
        for (double& v : p) v = std::clamp(v, -1.0, 1.0);
        return Action(p);
    }

    const std::array<double, kActionDim>& params() const { return params_; }
    double operator[](std::size_t i) const { return params_[i]; }

    double ctrl0(std::size_t joint) const { return params_[4 * joint + 0]; }
    double ctrl1(std::size_t joint) const { return params_[4 * joint + 1]; }
    double ctrl2(std::size_t joint) const { return params_[4 * joint + 2]; }
    double duration_param(std::size_t joint) const { return params_[4 * joint + 3]; }

    friend bool operator==(const Action& a, const Action& b) { return a.params_ == b.params_; }

private:
    std::array<double, kActionDim> params_{};
};

enum class Origin { autonomous, demonstration, imitation };

inline std::string origin_name(Origin o) {
    switch (o) {
        case Origin::autonomous: return "autonomous";
        case Origin::demonstration: return "demonstration";
        case Origin::imitation: return "imitation";
    }
    throw std::logic_error("bad origin");
}

inline Origin origin_from_name(const std::string& s) {
    if (s == "autonomous") return Origin::autonomous;
    if (s == "demonstration") return Origin::demonstration;
    if (s == "imitation") return Origin::imitation;
    throw std::invalid_argument("unknown origin tag: " + s);
}

struct Episode {
    Action action;
    TaskPoint outcome;
    Origin origin = Origin::autonomous;
    std::size_t index = 0;
};

// The fixed rest outcome of the experiment's context; set once per run.
struct SimilarityContext {
    TaskPoint y_org;
};

// Similarity in [-1, 0]: negative normalized miss distance, clamped at -1.
// Degenerate goal-at-origin case: 0 on an exact hit, -1 otherwise.
inline double sim(const TaskPoint& y_g, const TaskPoint& y_f, const SimilarityContext& ctx) {
    const double d_ref = distance(y_g, ctx.y_org);
    const double d_miss = distance(y_g, y_f);
    if (d_ref == 0.0) return d_miss == 0.0 ? 0.0 : -1.0;
    const double ratio = d_miss / d_ref;
    return ratio > 1.0 ? -1.0 : -ratio;
}

// Thresholded similarity: misses below eps_sim keep their value, near hits count as 0.
inline double competence(double sim_value, double eps_sim = kDefaultEpsSim) {
    if (!(eps_sim < 0.0)) throw std::invalid_argument("eps_sim must be < 0");
    return sim_value <= eps_sim ? sim_value : 0.0;
}

}  // namespace sgim
