#pragma once

// Teacher side: offline construction of the teaching set (one low-variance
// demonstration per grid cell of the reachable region), the fixed-period
// interaction schedule, and demonstration injection (emulation + imitation).

#include <algorithm>
#include <cstddef>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgim/core.hpp"
#include "sgim/env.hpp"
#include "sgim/highlevel.hpp"
#include "sgim/lowlevel.hpp"
#include "sgim/memory.hpp"

namespace sgim {

struct TeachingItem {
    Action a_demo;
    TaskPoint y_demo;
    int cell = 0;  // row-major cell id in the teacher grid
};

struct TeacherConfig {
    std::size_t demo_period = 150;
    std::size_t teaching_set_size = 27;
    std::size_t repeats_per_candidate = 10;
    std::size_t candidate_pool_size = 50;
    double reached_tolerance = 0.1;
    // Teacher grid over the task bounds; coarser than the benchmark grid so
    // the kept cells spread over the reachable region.
    std::size_t grid_cols = 9;
    std::size_t grid_rows = 6;
    std::size_t reach_sample = 20000;

    void validate() const {
        if (demo_period == 0 || teaching_set_size == 0 || repeats_per_candidate == 0 ||
            candidate_pool_size == 0 || grid_cols == 0 || grid_rows == 0 || reach_sample == 0)
            throw std::invalid_argument("teacher counts must be positive");
        if (!(reached_tolerance > 0.0)) throw std::invalid_argument("reached_tolerance must be > 0");
        if (grid_cols * grid_rows < teaching_set_size)
            throw std::invalid_argument("teacher grid smaller than teaching_set_size");
    }
};

inline int teacher_cell_of(const TaskPoint& p, const Rect& bounds, const TeacherConfig& cfg) {
    if (!bounds.contains(p)) return -1;
    const double fx = (p.y1 - bounds.lo1) / (bounds.hi1 - bounds.lo1);
    const double fy = (p.y2 - bounds.lo2) / (bounds.hi2 - bounds.lo2);
    const std::size_t col = std::min(cfg.grid_cols - 1, static_cast<std::size_t>(fx * cfg.grid_cols));
    const std::size_t row = std::min(cfg.grid_rows - 1, static_cast<std::size_t>(fy * cfg.grid_rows));
    return static_cast<int>(row * cfg.grid_cols + col);
}

// Samples the reachable region with random actions, keeps the most
// populated grid cells, and per cell picks the candidate action whose
// repeated noisy executions land with minimal outcome variance.
inline std::vector<TeachingItem> build_teaching_set(const EnvironmentConfig& env_cfg,
                                                    const TeacherConfig& cfg, const Rect& bounds,
                                                    std::mt19937_64& rng) {
    cfg.validate();

    EnvironmentConfig clean_cfg = env_cfg;
    clean_cfg.noise_sigma = 0.0;
    clean_cfg.seed = rng();
    FishingEnv clean(clean_cfg);

    EnvironmentConfig noisy_cfg = env_cfg;
    noisy_cfg.seed = rng();
    FishingEnv noisy(noisy_cfg);

    struct Sample {
        Action action;
        TaskPoint outcome;
    };
    std::vector<Sample> samples;
    samples.reserve(cfg.reach_sample);
    for (std::size_t i = 0; i < cfg.reach_sample; ++i) {
        const Action a = explore_action(rng);
        samples.push_back({a, clean.execute(a).outcome});
    }

    const std::size_t ncells = cfg.grid_cols * cfg.grid_rows;
    std::vector<std::size_t> counts(ncells, 0);
    for (const Sample& s : samples) {
        const int c = teacher_cell_of(s.outcome, bounds, cfg);
        if (c >= 0) ++counts[static_cast<std::size_t>(c)];
    }

    std::vector<std::size_t> order(ncells);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });

    std::vector<TeachingItem> items;
    for (std::size_t cell : order) {
        if (items.size() == cfg.teaching_set_size) break;
        if (counts[cell] == 0) break;

        std::vector<const Sample*> pool;
        for (const Sample& s : samples) {
            if (teacher_cell_of(s.outcome, bounds, cfg) == static_cast<int>(cell)) {
                pool.push_back(&s);
                if (pool.size() == cfg.candidate_pool_size) break;
            }
        }

        const Sample* best = nullptr;
        double best_var = 0.0;
        for (const Sample* cand : pool) {
            std::vector<TaskPoint> reps;
            reps.reserve(cfg.repeats_per_candidate);
            for (std::size_t r = 0; r < cfg.repeats_per_candidate; ++r)
                reps.push_back(noisy.execute(cand->action).outcome);
            const double var = outcome_variance(reps);
            if (!best || var < best_var) {
                best = cand;
                best_var = var;
            }
        }
        items.push_back({best->action, best->outcome, static_cast<int>(cell)});
    }

    if (items.size() < cfg.teaching_set_size)
        throw std::runtime_error("not enough reachable teacher cells: got " +
                                 std::to_string(items.size()));
    return items;
}

// A random demonstration among the items whose outcome the learner has not
// yet come close to; falls back to all items once everything is reached.
inline const TeachingItem& next_demo(const std::vector<TeachingItem>& items,
                                     const EpisodicMemory& mem, const TeacherConfig& cfg,
                                     std::mt19937_64& rng) {
    if (items.empty()) throw std::invalid_argument("empty teaching set");
    std::vector<std::size_t> unreached;
    for (std::size_t i = 0; i < items.size(); ++i) {
        bool reached = false;
        if (!mem.empty()) {
            const auto nn = mem.knn_task(items[i].y_demo, 1);
            reached = distance(mem.episode(nn.front()).outcome, items[i].y_demo) <=
                      cfg.reached_tolerance;
        }
        if (!reached) unreached.push_back(i);
    }
    if (unreached.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, items.size() - 1);
        return items[pick(rng)];
    }
    std::uniform_int_distribution<std::size_t> pick(0, unreached.size() - 1);
    return items[unreached[pick(rng)]];
}

inline bool interaction_due(std::size_t movement_count, const TeacherConfig& cfg) {
    return movement_count > 0 && movement_count % cfg.demo_period == 0;
}

// Emulation (register the demo pair, credit its goal) followed by imitation
// (perturbed replays, each fed back into the region tree).
inline void apply_demonstration(const TeachingItem& item, EpisodicMemory& mem, RegionTree& tree,
                                FishingEnv& env, const LowLevelConfig& ll_cfg,
                                const HighLevelConfig& hl_cfg, const SimilarityContext& ctx,
                                std::mt19937_64& rng) {
    mem.insert(item.a_demo, item.y_demo, Origin::demonstration);
    tree.record_attempt(item.y_demo, 0.0, hl_cfg);
    const auto ids = imitate(item.a_demo, env, mem, ll_cfg, rng);
    for (std::size_t id : ids) {
        const double s = sim(item.y_demo, mem.episode(id).outcome, ctx);
        tree.record_attempt(item.y_demo, competence(s, hl_cfg.eps_sim), hl_cfg);
    }
}

inline void save_teaching_set(std::ostream& out, const std::vector<TeachingItem>& items) {
    for (std::size_t i = 0; i < items.size(); ++i) {
        out << i << ',' << items[i].cell;
        for (double v : items[i].a_demo.params()) out << ',' << fmt9(v);
        out << ',' << fmt9(items[i].y_demo.y1) << ',' << fmt9(items[i].y_demo.y2) << '\n';
    }
}

inline std::vector<TeachingItem> load_teaching_set(std::istream& in) {
    std::vector<TeachingItem> items;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 2 + kActionDim + 2)
            throw std::runtime_error("bad teaching set line: " + line);
        std::array<double, kActionDim> params;
        for (std::size_t i = 0; i < kActionDim; ++i) params[i] = std::stod(cells[2 + i]);
        items.push_back({Action(params),
                         {std::stod(cells[2 + kActionDim]), std::stod(cells[3 + kActionDim])},
                         std::stoi(cells[1])});
    }
    return items;
}

}  // namespace sgim
