#pragma once

// Experiment orchestration: benchmark generation, the four strategy loops
// (random / sagg_riac / sgim_d / demo_only), periodic evaluation against
// the benchmark, histogram export, and run artifact persistence.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgim/core.hpp"
#include "sgim/env.hpp"
#include "sgim/format.hpp"
#include "sgim/highlevel.hpp"
#include "sgim/lowlevel.hpp"
#include "sgim/memory.hpp"
#include "sgim/social.hpp"

namespace sgim {

inline constexpr const char* kVersion = "sgim 1.0.0";

enum class Strategy { random, sagg_riac, sgim_d, demo_only };

inline std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::random: return "random";
        case Strategy::sagg_riac: return "sagg_riac";
        case Strategy::sgim_d: return "sgim_d";
        case Strategy::demo_only: return "demo_only";
    }
    throw std::logic_error("bad strategy");
}

inline Strategy strategy_from_name(const std::string& s) {
    if (s == "random") return Strategy::random;
    if (s == "sagg_riac") return Strategy::sagg_riac;
    if (s == "sgim_d") return Strategy::sgim_d;
    if (s == "demo_only") return Strategy::demo_only;
    throw std::invalid_argument("unknown strategy: " + s);
}

struct ExperimentConfig {
    Strategy strategy = Strategy::sagg_riac;
    std::size_t total_movements = 5000;
    std::size_t eval_period = 250;
    Rect task_bounds;  // small-space default [-1.3, 1.3]^2
    bool large_space = false;
    std::size_t grid_cols = 26;
    std::size_t grid_rows = 16;
    std::uint64_t seed = 0;
    EnvironmentConfig environment;
    LowLevelConfig lowlevel;
    HighLevelConfig highlevel;
    TeacherConfig teacher;

    void validate() const {
        if (total_movements == 0 || eval_period == 0 || total_movements % eval_period != 0)
            throw std::invalid_argument("eval_period must divide total_movements");
        if (grid_cols == 0 || grid_rows == 0) throw std::invalid_argument("grid must be nonempty");
        environment.validate();
        lowlevel.validate();
        HighLevelConfig hl = highlevel;
        hl.task_bounds = effective_bounds();
        hl.validate();
        teacher.validate();
    }

    // Goal-space bounds actually used by the run; the large-space option
    // scales the area by 20 about the center.
    Rect effective_bounds() const {
        return large_space ? task_bounds.scaled_area(20.0) : task_bounds;
    }
};

// ----- JSON config ---------------------------------------------------------

inline void to_json(nlohmann::json& j, const Rect& r) {
    j = {{"lo1", r.lo1}, {"lo2", r.lo2}, {"hi1", r.hi1}, {"hi2", r.hi2}};
}
inline void from_json(const nlohmann::json& j, Rect& r) {
    r.lo1 = j.value("lo1", r.lo1);
    r.lo2 = j.value("lo2", r.lo2);
    r.hi1 = j.value("hi1", r.hi1);
    r.hi2 = j.value("hi2", r.hi2);
}

inline void to_json(nlohmann::json& j, const EnvironmentConfig& c) {
    j = {{"link_lengths", c.link_lengths},
         {"rod_length", c.rod_length},
         {"line_length", c.line_length},
         {"joint_limit", c.joint_limit},
         {"duration_range", c.duration_range},
         {"control_timestep", c.control_timestep},
         {"pendulum_damping", c.pendulum_damping},
         {"gravity", c.gravity},
         {"water_height", c.water_height},
         {"noise_sigma", c.noise_sigma},
         {"max_episode_time", c.max_episode_time},
         {"seed", c.seed}};
}
inline void from_json(const nlohmann::json& j, EnvironmentConfig& c) {
    c.link_lengths = j.value("link_lengths", c.link_lengths);
    c.rod_length = j.value("rod_length", c.rod_length);
    c.line_length = j.value("line_length", c.line_length);
    c.joint_limit = j.value("joint_limit", c.joint_limit);
    c.duration_range = j.value("duration_range", c.duration_range);
    c.control_timestep = j.value("control_timestep", c.control_timestep);
    c.pendulum_damping = j.value("pendulum_damping", c.pendulum_damping);
    c.gravity = j.value("gravity", c.gravity);
    c.water_height = j.value("water_height", c.water_height);
    c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
    c.max_episode_time = j.value("max_episode_time", c.max_episode_time);
    c.seed = j.value("seed", c.seed);
}

inline void to_json(nlohmann::json& j, const LowLevelConfig& c) {
    j = {{"l_max", c.l_max},
         {"k_max", c.k_max},
         {"alpha", c.alpha},
         {"attempts_per_goal", c.attempts_per_goal},
         {"d_norm", c.d_norm},
         {"imitation_trials", c.imitation_trials},
         {"imitation_eps", c.imitation_eps}};
}
inline void from_json(const nlohmann::json& j, LowLevelConfig& c) {
    c.l_max = j.value("l_max", c.l_max);
    c.k_max = j.value("k_max", c.k_max);
    c.alpha = j.value("alpha", c.alpha);
    c.attempts_per_goal = j.value("attempts_per_goal", c.attempts_per_goal);
    c.d_norm = j.value("d_norm", c.d_norm);
    c.imitation_trials = j.value("imitation_trials", c.imitation_trials);
    c.imitation_eps = j.value("imitation_eps", c.imitation_eps);
}

inline void to_json(nlohmann::json& j, const HighLevelConfig& c) {
    j = {{"zeta", c.zeta},
         {"g_max", c.g_max},
         {"mode_probs", c.mode_probs},
         {"split_candidates", c.split_candidates},
         {"eps_sim", c.eps_sim}};
}
inline void from_json(const nlohmann::json& j, HighLevelConfig& c) {
    c.zeta = j.value("zeta", c.zeta);
    c.g_max = j.value("g_max", c.g_max);
    c.mode_probs = j.value("mode_probs", c.mode_probs);
    c.split_candidates = j.value("split_candidates", c.split_candidates);
    c.eps_sim = j.value("eps_sim", c.eps_sim);
}

inline void to_json(nlohmann::json& j, const TeacherConfig& c) {
    j = {{"demo_period", c.demo_period},
         {"teaching_set_size", c.teaching_set_size},
         {"repeats_per_candidate", c.repeats_per_candidate},
         {"candidate_pool_size", c.candidate_pool_size},
         {"reached_tolerance", c.reached_tolerance},
         {"grid_cols", c.grid_cols},
         {"grid_rows", c.grid_rows},
         {"reach_sample", c.reach_sample}};
}
inline void from_json(const nlohmann::json& j, TeacherConfig& c) {
    c.demo_period = j.value("demo_period", c.demo_period);
    c.teaching_set_size = j.value("teaching_set_size", c.teaching_set_size);
    c.repeats_per_candidate = j.value("repeats_per_candidate", c.repeats_per_candidate);
    c.candidate_pool_size = j.value("candidate_pool_size", c.candidate_pool_size);
    c.reached_tolerance = j.value("reached_tolerance", c.reached_tolerance);
    c.grid_cols = j.value("grid_cols", c.grid_cols);
    c.grid_rows = j.value("grid_rows", c.grid_rows);
    c.reach_sample = j.value("reach_sample", c.reach_sample);
}

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    j = {{"strategy", strategy_name(c.strategy)},
         {"total_movements", c.total_movements},
         {"eval_period", c.eval_period},
         {"task_bounds", c.task_bounds},
         {"large_space", c.large_space},
         {"grid_cols", c.grid_cols},
         {"grid_rows", c.grid_rows},
         {"seed", c.seed},
         {"environment", c.environment},
         {"lowlevel", c.lowlevel},
         {"highlevel", c.highlevel},
         {"teacher", c.teacher}};
}
inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    if (j.contains("strategy")) c.strategy = strategy_from_name(j.at("strategy").get<std::string>());
    c.total_movements = j.value("total_movements", c.total_movements);
    c.eval_period = j.value("eval_period", c.eval_period);
    c.task_bounds = j.value("task_bounds", c.task_bounds);
    c.large_space = j.value("large_space", c.large_space);
    c.grid_cols = j.value("grid_cols", c.grid_cols);
    c.grid_rows = j.value("grid_rows", c.grid_rows);
    c.seed = j.value("seed", c.seed);
    c.environment = j.value("environment", c.environment);
    c.lowlevel = j.value("lowlevel", c.lowlevel);
    c.highlevel = j.value("highlevel", c.highlevel);
    c.teacher = j.value("teacher", c.teacher);
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    auto in = open_in(path);
    nlohmann::json j;
    in >> j;
    ExperimentConfig cfg;
    from_json(j, cfg);
    return cfg;
}

// ----- grids, benchmark, reach map -----------------------------------------

inline int grid_cell(const TaskPoint& p, const Rect& bounds, std::size_t cols, std::size_t rows) {
    if (!bounds.contains(p)) return -1;
    const double fx = (p.y1 - bounds.lo1) / (bounds.hi1 - bounds.lo1);
    const double fy = (p.y2 - bounds.lo2) / (bounds.hi2 - bounds.lo2);
    const std::size_t col = std::min(cols - 1, static_cast<std::size_t>(fx * cols));
    const std::size_t row = std::min(rows - 1, static_cast<std::size_t>(fy * rows));
    return static_cast<int>(row * cols + col);
}

inline int grid_cell_clamped(const TaskPoint& p, const Rect& bounds, std::size_t cols,
                             std::size_t rows) {
    const TaskPoint q{std::clamp(p.y1, bounds.lo1, bounds.hi1),
                      std::clamp(p.y2, bounds.lo2, bounds.hi2)};
    return grid_cell(q, bounds, cols, rows);
}

// Grid-occupancy estimate of the reachable region.
struct ReachMap {
    Rect bounds;
    std::size_t cols = 26, rows = 16;
    std::size_t min_hits = 3;
    std::vector<std::size_t> hits;

    bool occupied(std::size_t cell) const { return hits.at(cell) >= min_hits; }
    bool contains(const TaskPoint& p) const {
        const int c = grid_cell(p, bounds, cols, rows);
        return c >= 0 && occupied(static_cast<std::size_t>(c));
    }
    std::size_t occupied_count() const {
        std::size_t n = 0;
        for (std::size_t c = 0; c < hits.size(); ++c)
            if (occupied(c)) ++n;
        return n;
    }

    void save(std::ostream& out) const {
        out << cols << ',' << rows << ',' << min_hits << ',' << fmt9(bounds.lo1) << ','
            << fmt9(bounds.lo2) << ',' << fmt9(bounds.hi1) << ',' << fmt9(bounds.hi2) << '\n';
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                if (c) out << ',';
                out << hits[r * cols + c];
            }
            out << '\n';
        }
    }

    static ReachMap load(std::istream& in) {
        ReachMap m;
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("empty reach map");
        const auto head = split_csv(line);
        if (head.size() != 7) throw std::runtime_error("bad reach map header");
        m.cols = std::stoul(head[0]);
        m.rows = std::stoul(head[1]);
        m.min_hits = std::stoul(head[2]);
        m.bounds = {std::stod(head[3]), std::stod(head[4]), std::stod(head[5]), std::stod(head[6])};
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            for (const auto& cell : split_csv(line)) m.hits.push_back(std::stoul(cell));
        }
        if (m.hits.size() != m.cols * m.rows) throw std::runtime_error("bad reach map body");
        return m;
    }
};

struct BenchmarkResult {
    std::vector<TaskPoint> points;
    ReachMap map;
};

inline void save_benchmark(std::ostream& out, const std::vector<TaskPoint>& points) {
    for (const TaskPoint& p : points) out << fmt9(p.y1) << ',' << fmt9(p.y2) << '\n';
}

inline std::vector<TaskPoint> load_benchmark(std::istream& in) {
    std::vector<TaskPoint> points;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 2) throw std::runtime_error("bad benchmark line: " + line);
        points.push_back({std::stod(cells[0]), std::stod(cells[1])});
    }
    return points;
}

// ----- evaluation ----------------------------------------------------------

struct EvaluationRecord {
    std::size_t movement_count = 0;
    double mean_error = 0.0;
    std::vector<double> errors;
};

// For each benchmark goal: interpolate an action from memory and replay it
// noiselessly in a scratch environment. Memory is left untouched.
inline EvaluationRecord evaluate(const EpisodicMemory& mem, const EnvironmentConfig& env_cfg,
                                 const std::vector<TaskPoint>& benchmark,
                                 const LowLevelConfig& ll_cfg) {
    if (mem.empty()) throw std::runtime_error("evaluate on empty memory");
    EnvironmentConfig clean_cfg = env_cfg;
    clean_cfg.noise_sigma = 0.0;
    FishingEnv clean(clean_cfg);

    EvaluationRecord rec;
    double sum = 0.0;
    for (const TaskPoint& goal : benchmark) {
        const Action a = exploit_action(goal, mem, ll_cfg);
        const TaskPoint out = clean.execute(a).outcome;
        const double err = distance(goal, out);
        rec.errors.push_back(err);
        sum += err;
    }
    rec.mean_error = benchmark.empty() ? 0.0 : sum / static_cast<double>(benchmark.size());
    return rec;
}

// ----- benchmark generation ------------------------------------------------

inline constexpr std::size_t kBenchmarkRandomSample = 20000;
inline constexpr std::size_t kBenchmarkShakedownMovements = 5000;
inline constexpr std::size_t kBenchmarkMinHits = 3;

// Reachability estimate = large noiseless random-action sample plus one
// noiseless goal-babbling shakedown run, then one random point per grid
// cell that collected enough reached points.
inline BenchmarkResult generate_benchmark(const ExperimentConfig& cfg, std::mt19937_64& rng) {
    EnvironmentConfig clean_cfg = cfg.environment;
    clean_cfg.noise_sigma = 0.0;
    clean_cfg.seed = rng();
    FishingEnv clean(clean_cfg);

    std::vector<TaskPoint> reached;
    reached.reserve(kBenchmarkRandomSample + kBenchmarkShakedownMovements);
    for (std::size_t i = 0; i < kBenchmarkRandomSample; ++i)
        reached.push_back(clean.execute(explore_action(rng)).outcome);

    // Shakedown: plain goal babbling, no evaluation, no teacher.
    {
        EpisodicMemory mem;
        HighLevelConfig hl = cfg.highlevel;
        hl.task_bounds = cfg.task_bounds;
        RegionTree tree(hl.task_bounds);
        const SimilarityContext ctx{clean.rest_outcome()};
        std::size_t count = 0;
        while (count < kBenchmarkShakedownMovements) {
            const TaskPoint goal = tree.sample_goal(hl, rng);
            const ReachReport report = reach_goal(goal, clean, mem, cfg.lowlevel, ctx, rng);
            for (const Attempt& at : report.attempts) {
                tree.record_attempt(goal, competence(sim(goal, at.outcome, ctx), hl.eps_sim), hl);
                reached.push_back(at.outcome);
            }
            count += report.attempts.size();
        }
    }

    BenchmarkResult result;
    result.map.bounds = cfg.task_bounds;
    result.map.cols = cfg.grid_cols;
    result.map.rows = cfg.grid_rows;
    result.map.min_hits = kBenchmarkMinHits;
    result.map.hits.assign(cfg.grid_cols * cfg.grid_rows, 0);
    for (const TaskPoint& p : reached) {
        const int c = grid_cell(p, cfg.task_bounds, cfg.grid_cols, cfg.grid_rows);
        if (c >= 0) ++result.map.hits[static_cast<std::size_t>(c)];
    }
    if (reached.empty()) throw std::runtime_error("empty reachability estimate");

    const double cw = (cfg.task_bounds.hi1 - cfg.task_bounds.lo1) / static_cast<double>(cfg.grid_cols);
    const double ch = (cfg.task_bounds.hi2 - cfg.task_bounds.lo2) / static_cast<double>(cfg.grid_rows);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (std::size_t r = 0; r < cfg.grid_rows; ++r) {
        for (std::size_t c = 0; c < cfg.grid_cols; ++c) {
            if (!result.map.occupied(r * cfg.grid_cols + c)) continue;
            result.points.push_back({cfg.task_bounds.lo1 + (static_cast<double>(c) + uni(rng)) * cw,
                                     cfg.task_bounds.lo2 + (static_cast<double>(r) + uni(rng)) * ch});
        }
    }
    if (result.points.empty()) throw std::runtime_error("no occupied benchmark cells");
    return result;
}

// ----- experiment run ------------------------------------------------------

struct RunResult {
    std::vector<EvaluationRecord> timeline;
    std::vector<TaskPoint> goals;  // self-generated goals only
    EpisodicMemory memory;
    std::size_t demonstrations_applied = 0;
    std::size_t autonomous_movements = 0;
    std::size_t imitation_movements = 0;
    SimilarityContext ctx;
    std::optional<RegionTree> tree;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 step
    std::uint64_t z = seed + stream * 0x9E3779B97F4A7C15ULL + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline RunResult run_experiment(const ExperimentConfig& cfg,
                                const std::vector<TaskPoint>& benchmark,
                                const std::vector<TeachingItem>& teaching_set) {
    cfg.validate();
    const bool social = cfg.strategy == Strategy::sgim_d || cfg.strategy == Strategy::demo_only;
    if (social && teaching_set.empty())
        throw std::invalid_argument("strategy needs a teaching set");
    if (benchmark.empty()) throw std::invalid_argument("empty benchmark");

    EnvironmentConfig env_cfg = cfg.environment;
    env_cfg.seed = mix_seed(cfg.seed, 1);
    FishingEnv env(env_cfg);
    std::mt19937_64 rng(mix_seed(cfg.seed, 2));

    HighLevelConfig hl = cfg.highlevel;
    hl.task_bounds = cfg.effective_bounds();

    RunResult res;
    res.ctx = SimilarityContext{env.rest_outcome()};
    res.tree.emplace(hl.task_bounds);
    RegionTree& tree = *res.tree;
    EpisodicMemory& mem = res.memory;

    std::size_t count = 0;
    std::size_t next_eval = cfg.eval_period;
    auto run_evals = [&] {
        while (count >= next_eval && next_eval <= cfg.total_movements) {
            EvaluationRecord rec = evaluate(mem, cfg.environment, benchmark, cfg.lowlevel);
            rec.movement_count = next_eval;
            res.timeline.push_back(std::move(rec));
            next_eval += cfg.eval_period;
        }
    };
    auto demo_tick = [&] {
        const TeachingItem& item = next_demo(teaching_set, mem, cfg.teacher, rng);
        apply_demonstration(item, mem, tree, env, cfg.lowlevel, hl, res.ctx, rng);
        count += cfg.lowlevel.imitation_trials;
        res.imitation_movements += cfg.lowlevel.imitation_trials;
        ++res.demonstrations_applied;
    };

    switch (cfg.strategy) {
        case Strategy::random:
            while (count < cfg.total_movements) {
                const Action a = explore_action(rng);
                mem.insert(a, env.execute(a).outcome, Origin::autonomous);
                ++count;
                ++res.autonomous_movements;
                run_evals();
            }
            break;

        case Strategy::sagg_riac:
        case Strategy::sgim_d:
            while (count < cfg.total_movements) {
                if (cfg.strategy == Strategy::sgim_d && interaction_due(count, cfg.teacher)) {
                    demo_tick();
                } else {
                    const TaskPoint goal = tree.sample_goal(hl, rng);
                    res.goals.push_back(goal);
                    const ReachReport report =
                        reach_goal(goal, env, mem, cfg.lowlevel, res.ctx, rng);
                    for (const Attempt& at : report.attempts)
                        tree.record_attempt(goal, competence(sim(goal, at.outcome, res.ctx), hl.eps_sim), hl);
                    count += report.attempts.size();
                    res.autonomous_movements += report.attempts.size();
                }
                run_evals();
            }
            break;

        case Strategy::demo_only: {
            // Before the first scheduled demonstration there is nothing to
            // register yet; the learner imitates a provisional item drawn the
            // same way the teacher would pick it.
            const TeachingItem* current = &next_demo(teaching_set, mem, cfg.teacher, rng);
            while (count < cfg.total_movements) {
                if (interaction_due(count, cfg.teacher)) {
                    const TeachingItem& item = next_demo(teaching_set, mem, cfg.teacher, rng);
                    apply_demonstration(item, mem, tree, env, cfg.lowlevel, hl, res.ctx, rng);
                    count += cfg.lowlevel.imitation_trials;
                    res.imitation_movements += cfg.lowlevel.imitation_trials;
                    ++res.demonstrations_applied;
                    current = &item;
                } else {
                    const Action a = perturb_demo(current->a_demo, cfg.lowlevel.imitation_eps, rng);
                    mem.insert(a, env.execute(a).outcome, Origin::imitation);
                    ++count;
                    ++res.imitation_movements;
                }
                run_evals();
            }
            break;
        }
    }
    return res;
}

// ----- histograms, artifacts, reports --------------------------------------

// Cell-count table over the grid; points outside the bounds are clamped to
// the border cells so counts always sum to the number of inputs.
inline std::vector<std::size_t> export_histogram(const std::vector<TaskPoint>& points,
                                                 const Rect& bounds, std::size_t cols,
                                                 std::size_t rows) {
    std::vector<std::size_t> counts(cols * rows, 0);
    for (const TaskPoint& p : points)
        ++counts[static_cast<std::size_t>(grid_cell_clamped(p, bounds, cols, rows))];
    return counts;
}

inline void write_histogram(std::ostream& out, const std::vector<std::size_t>& counts,
                            std::size_t cols, std::size_t rows) {
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c) out << ',';
            out << counts[r * cols + c];
        }
        out << '\n';
    }
}

inline void write_run_artifacts(const std::string& dir, const ExperimentConfig& cfg,
                                const RunResult& res) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    {
        auto out = open_out(dir + "/timeline.csv");
        out << "movement_count,mean_error\n";
        for (const EvaluationRecord& rec : res.timeline)
            out << rec.movement_count << ',' << fmt9(rec.mean_error) << '\n';
    }
    {
        auto out = open_out(dir + "/memory.csv");
        res.memory.dump(out);
    }
    {
        auto out = open_out(dir + "/goals.csv");
        for (const TaskPoint& g : res.goals) out << fmt9(g.y1) << ',' << fmt9(g.y2) << '\n';
    }
    if (res.tree) {
        auto out = open_out(dir + "/regions.csv");
        HighLevelConfig hl = cfg.highlevel;
        hl.task_bounds = cfg.effective_bounds();
        res.tree->snapshot(out, hl);
    }
    {
        nlohmann::json meta;
        meta["version"] = kVersion;
        meta["config"] = cfg;
        meta["effective_bounds"] = cfg.effective_bounds();
        meta["demonstrations_applied"] = res.demonstrations_applied;
        meta["autonomous_movements"] = res.autonomous_movements;
        meta["imitation_movements"] = res.imitation_movements;
        meta["episodes"] = res.memory.size();
        meta["timeline_rows"] = res.timeline.size();
        meta["y_org"] = {res.ctx.y_org.y1, res.ctx.y_org.y2};
        auto out = open_out(dir + "/meta.json");
        out << meta.dump(2) << '\n';
    }
}

}  // namespace sgim
