#pragma once

// Higher level of active learning: an axis-aligned region tree over the
// task space, interest = absolute competence progress over a sliding
// window, and goal self-generation biased toward interesting regions.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "sgim/core.hpp"
#include "sgim/format.hpp"

namespace sgim {

struct Rect {
    double lo1 = -1.3, lo2 = -1.3;
    double hi1 = 1.3, hi2 = 1.3;

    bool contains(const TaskPoint& p) const {
        return p.y1 >= lo1 && p.y1 <= hi1 && p.y2 >= lo2 && p.y2 <= hi2;
    }
    double lo(int axis) const { return axis == 0 ? lo1 : lo2; }
    double hi(int axis) const { return axis == 0 ? hi1 : hi2; }
    TaskPoint center() const { return {0.5 * (lo1 + hi1), 0.5 * (lo2 + hi2)}; }

    // Scale the area by `factor` about the center (linear factor sqrt(factor)).
    Rect scaled_area(double factor) const {
        const double s = std::sqrt(factor);
        const TaskPoint c = center();
        const double h1 = 0.5 * (hi1 - lo1) * s;
        const double h2 = 0.5 * (hi2 - lo2) * s;
        return {c.y1 - h1, c.y2 - h2, c.y1 + h1, c.y2 + h2};
    }
};

struct HighLevelConfig {
    std::size_t zeta = 20;
    std::size_t g_max = 40;
    std::array<double, 3> mode_probs{0.7, 0.2, 0.1};  // interest / random leaf / random point
    std::size_t split_candidates = 5;
    Rect task_bounds;
    double eps_sim = kDefaultEpsSim;

    void validate() const {
        if (zeta < 2 || zeta % 2 != 0) throw std::invalid_argument("zeta must be even and positive");
        if (g_max == 0 || split_candidates == 0)
            throw std::invalid_argument("g_max and split_candidates must be positive");
        double sum = 0.0;
        for (double p : mode_probs) {
            if (p < 0.0) throw std::invalid_argument("mode probability < 0");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("mode_probs must sum to 1");
        if (!(task_bounds.hi1 > task_bounds.lo1 && task_bounds.hi2 > task_bounds.lo2))
            throw std::invalid_argument("task_bounds must be a proper rectangle");
        if (!(eps_sim < 0.0)) throw std::invalid_argument("eps_sim must be < 0");
    }
};

// Interest of a competence history: split the last min(zeta, n) entries into
// an older and a newer half, |older sum - newer sum| / window size.
inline double region_interest(std::span<const double> competences, std::size_t zeta) {
    const std::size_t n = std::min(competences.size(), zeta);
    if (n < 2) return 0.0;
    const auto window = competences.subspan(competences.size() - n, n);
    const std::size_t first_len = (n + 1) / 2;
    double older = 0.0, newer = 0.0;
    for (std::size_t i = 0; i < first_len; ++i) older += window[i];
    for (std::size_t i = first_len; i < n; ++i) newer += window[i];
    return std::abs(older - newer) / static_cast<double>(n);
}

class RegionTree {
public:
    struct AttemptRecord {
        TaskPoint goal;
        double competence;
    };
    struct Node {
        Rect bounds;
        std::vector<AttemptRecord> history;
        int left = -1, right = -1;
        int split_axis = -1;
        double split_threshold = 0.0;

        bool is_leaf() const { return left < 0; }
    };

    explicit RegionTree(const Rect& bounds) { nodes_.push_back({bounds, {}, -1, -1, -1, 0.0}); }

    const Node& node(std::size_t i) const { return nodes_.at(i); }
    std::size_t node_count() const { return nodes_.size(); }

    std::vector<std::size_t> leaves() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i].is_leaf()) out.push_back(i);
        return out;
    }

    std::size_t leaf_for(const TaskPoint& p) const {
        std::size_t cur = 0;
        while (!nodes_[cur].is_leaf()) {
            const Node& n = nodes_[cur];
            const double c = n.split_axis == 0 ? p.y1 : p.y2;
            cur = static_cast<std::size_t>(c <= n.split_threshold ? n.left : n.right);
        }
        return cur;
    }

    double interest_of(std::size_t node_id, const HighLevelConfig& cfg) const {
        return region_interest(competences_of(nodes_.at(node_id).history), cfg.zeta);
    }

    void record_attempt(const TaskPoint& goal, double comp, const HighLevelConfig& cfg) {
        if (!nodes_[0].bounds.contains(goal))
            throw std::invalid_argument("goal outside root bounds");
        const std::size_t leaf = leaf_for(goal);
        nodes_[leaf].history.push_back({goal, comp});
        if (nodes_[leaf].history.size() > cfg.g_max) split_region(leaf, cfg);
    }

    // Split the leaf at the candidate (axis, threshold) that maximizes
    // |interest(left) - interest(right)| * min(|left|, |right|).
    void split_region(std::size_t leaf, const HighLevelConfig& cfg) {
        Node& n = nodes_[leaf];
        if (!n.is_leaf() || n.history.size() <= cfg.g_max)
            throw std::logic_error("split_region precondition violated");

        int best_axis = 0;
        double best_threshold = candidate_threshold(n.bounds, 0, 0, cfg);
        double best_score = -1.0;
        for (int axis = 0; axis < 2; ++axis) {
            for (std::size_t c = 0; c < cfg.split_candidates; ++c) {
                const double t = candidate_threshold(n.bounds, axis, c, cfg);
                std::vector<double> left_comp, right_comp;
                std::size_t left_n = 0, right_n = 0;
                for (const AttemptRecord& a : n.history) {
                    const double coord = axis == 0 ? a.goal.y1 : a.goal.y2;
                    if (coord <= t) {
                        left_comp.push_back(a.competence);
                        ++left_n;
                    } else {
                        right_comp.push_back(a.competence);
                        ++right_n;
                    }
                }
                const double gap = std::abs(region_interest(left_comp, cfg.zeta) -
                                            region_interest(right_comp, cfg.zeta));
                const double score = gap * static_cast<double>(std::min(left_n, right_n));
                if (score > best_score) {
                    best_score = score;
                    best_axis = axis;
                    best_threshold = t;
                }
            }
        }

        Node left, right;
        left.bounds = n.bounds;
        right.bounds = n.bounds;
        if (best_axis == 0) {
            left.bounds.hi1 = best_threshold;
            right.bounds.lo1 = best_threshold;
        } else {
            left.bounds.hi2 = best_threshold;
            right.bounds.lo2 = best_threshold;
        }
        for (const AttemptRecord& a : n.history) {
            const double coord = best_axis == 0 ? a.goal.y1 : a.goal.y2;
            (coord <= best_threshold ? left : right).history.push_back(a);
        }

        n.split_axis = best_axis;
        n.split_threshold = best_threshold;
        n.history.clear();
        n.history.shrink_to_fit();
        n.left = static_cast<int>(nodes_.size());
        n.right = static_cast<int>(nodes_.size() + 1);
        nodes_.push_back(std::move(left));   // invalidates n
        nodes_.push_back(std::move(right));
    }

    TaskPoint sample_goal(const HighLevelConfig& cfg, std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        const double u = uni(rng);
        if (u < cfg.mode_probs[0]) return sample_interest_leaf(cfg, rng);
        if (u < cfg.mode_probs[0] + cfg.mode_probs[1]) {
            const auto ls = leaves();
            std::uniform_int_distribution<std::size_t> pick(0, ls.size() - 1);
            return uniform_in(nodes_[ls[pick(rng)]].bounds, rng);
        }
        return uniform_in(cfg.task_bounds, rng);
    }

    // One leaf per line: bounds, history length, interest.
    void snapshot(std::ostream& out, const HighLevelConfig& cfg) const {
        for (std::size_t i : leaves()) {
            const Rect& b = nodes_[i].bounds;
            out << fmt9(b.lo1) << ',' << fmt9(b.lo2) << ',' << fmt9(b.hi1) << ',' << fmt9(b.hi2)
                << ',' << nodes_[i].history.size() << ',' << fmt9(interest_of(i, cfg)) << '\n';
        }
    }

private:
    static constexpr double kInterestSmoothing = 1e-4;

    static std::vector<double> competences_of(const std::vector<AttemptRecord>& history) {
        std::vector<double> out;
        out.reserve(history.size());
        for (const AttemptRecord& a : history) out.push_back(a.competence);
        return out;
    }

    static double candidate_threshold(const Rect& b, int axis, std::size_t i,
                                      const HighLevelConfig& cfg) {
        const double lo = b.lo(axis), hi = b.hi(axis);
        return lo + (hi - lo) * static_cast<double>(i + 1) /
                        static_cast<double>(cfg.split_candidates + 1);
    }

    static TaskPoint uniform_in(const Rect& b, std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u1(b.lo1, b.hi1), u2(b.lo2, b.hi2);
        return {u1(rng), u2(rng)};
    }

    TaskPoint sample_interest_leaf(const HighLevelConfig& cfg, std::mt19937_64& rng) const {
        const auto ls = leaves();
        std::vector<double> weights;
        weights.reserve(ls.size());
        for (std::size_t i : ls) weights.push_back(interest_of(i, cfg) + kInterestSmoothing);
        std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
        return uniform_in(nodes_[ls[pick(rng)]].bounds, rng);
    }

    std::vector<Node> nodes_;
};

}  // namespace sgim
