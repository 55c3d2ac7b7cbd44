#pragma once

// Goal-directed low-level exploration: memory-based interpolation
// (exploitation), random motor babbling (exploration), the regime switch,
// and the imitation behaviour around a demonstrated action.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

#include "sgim/core.hpp"
#include "sgim/env.hpp"
#include "sgim/memory.hpp"

namespace sgim {

struct LowLevelConfig {
    std::size_t l_max = 10;
    std::size_t k_max = 5;
    double alpha = 0.5;
    std::size_t attempts_per_goal = 5;
    double d_norm = 2.0;
    std::size_t imitation_trials = 5;
    double imitation_eps = 0.05;

    void validate() const {
        if (l_max == 0 || k_max == 0 || attempts_per_goal == 0 || imitation_trials == 0)
            throw std::invalid_argument("lowlevel counts must be positive");
        if (!(d_norm > 0.0)) throw std::invalid_argument("d_norm must be > 0");
        if (!(imitation_eps > 0.0)) throw std::invalid_argument("imitation_eps must be > 0");
        if (!std::isfinite(alpha)) throw std::invalid_argument("alpha must be finite");
    }
};

enum class Regime { explore, exploit };

struct Attempt {
    Action action;
    TaskPoint outcome;
    Regime regime = Regime::explore;
    bool timeout = false;
};

struct ReachReport {
    TaskPoint goal;
    std::vector<Attempt> attempts;
    double best_sim = -1.0;
    TaskPoint final_outcome;
};

inline Action explore_action(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::array<double, kActionDim> p;
    for (double& v : p) v = uni(rng);
    return Action(p);
}

// Local interpolation of an inverse model: pick the most reliable
// task-space neighborhood, then Gaussian-blend its action-space neighbors.
inline Action exploit_action(const TaskPoint& y_g, const EpisodicMemory& mem,
                             const LowLevelConfig& cfg) {
    if (mem.empty()) throw std::runtime_error("exploit_action on empty memory");

    const auto candidates = mem.knn_task(y_g, cfg.l_max);

    double best_rel = 0.0;
    std::size_t best_id = 0;
    std::vector<std::size_t> best_neighbors;
    bool have_best = false;
    for (std::size_t id : candidates) {
        const auto neighbors = mem.knn_action(mem.episode(id).action, cfg.k_max);
        const double var = mem.outcome_variance_of(neighbors);
        const double rel = distance(mem.episode(id).outcome, y_g) + cfg.alpha * var;
        if (!have_best || rel < best_rel || (rel == best_rel && id < best_id)) {
            have_best = true;
            best_rel = rel;
            best_id = id;
            best_neighbors = neighbors;
        }
    }

    // Self-scaling Gaussian kernel: width = mean neighbor distance to the goal.
    double mean_dist = 0.0;
    for (std::size_t id : best_neighbors) mean_dist += distance(mem.episode(id).outcome, y_g);
    mean_dist /= static_cast<double>(best_neighbors.size());
    const double sigma = std::max(mean_dist, 1e-6);

    std::vector<double> coef(best_neighbors.size());
    double total = 0.0;
    for (std::size_t i = 0; i < best_neighbors.size(); ++i) {
        const double d = distance(mem.episode(best_neighbors[i]).outcome, y_g);
        coef[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        total += coef[i];
    }

    std::array<double, kActionDim> blend{};
    for (std::size_t i = 0; i < best_neighbors.size(); ++i) {
        const double w = coef[i] / total;
        const auto& p = mem.episode(best_neighbors[i]).action.params();
        for (std::size_t d = 0; d < kActionDim; ++d) blend[d] += w * p[d];
    }
    return Action::clamped(blend);
}

inline Regime choose_regime(const TaskPoint& y_g, const EpisodicMemory& mem,
                            const LowLevelConfig& cfg, std::mt19937_64& rng) {
    if (mem.empty()) return Regime::explore;
    const auto nearest = mem.knn_task(y_g, 1);
    const TaskPoint y_c = mem.episode(nearest.front()).outcome;
    const double p_explore = std::min(1.0, distance(y_c, y_g) / cfg.d_norm);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    return uni(rng) < p_explore ? Regime::explore : Regime::exploit;
}

inline ReachReport reach_goal(const TaskPoint& y_g, FishingEnv& env, EpisodicMemory& mem,
                              const LowLevelConfig& cfg, const SimilarityContext& ctx,
                              std::mt19937_64& rng) {
    ReachReport report;
    report.goal = y_g;
    for (std::size_t i = 0; i < cfg.attempts_per_goal; ++i) {
        const Regime regime = choose_regime(y_g, mem, cfg, rng);
        const Action a = regime == Regime::explore ? explore_action(rng) : exploit_action(y_g, mem, cfg);
        const ExecutionResult res = env.execute(a);
        mem.insert(a, res.outcome, Origin::autonomous);
        report.attempts.push_back({a, res.outcome, regime, res.timeout});
    }
    report.best_sim = sim(y_g, report.attempts.front().outcome, ctx);
    for (const Attempt& at : report.attempts)
        report.best_sim = std::max(report.best_sim, sim(y_g, at.outcome, ctx));
    report.final_outcome = report.attempts.back().outcome;
    return report;
}

inline Action perturb_demo(const Action& a_demo, double eps, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-eps, eps);
    std::array<double, kActionDim> p = a_demo.params();
    for (double& v : p) v += uni(rng);
    return Action::clamped(p);
}

inline std::vector<std::size_t> imitate(const Action& a_demo, FishingEnv& env, EpisodicMemory& mem,
                                        const LowLevelConfig& cfg, std::mt19937_64& rng) {
    std::vector<std::size_t> ids;
    ids.reserve(cfg.imitation_trials);
    for (std::size_t i = 0; i < cfg.imitation_trials; ++i) {
        const Action a = perturb_demo(a_demo, cfg.imitation_eps, rng);
        const ExecutionResult res = env.execute(a);
        ids.push_back(mem.insert(a, res.outcome, Origin::imitation));
    }
    return ids;
}

}  // namespace sgim
