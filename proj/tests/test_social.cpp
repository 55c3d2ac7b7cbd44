#include <catch_amalgamated.hpp>

#include <random>
#include <set>
#include <sstream>

#include "sgim/social.hpp"

using namespace sgim;

namespace {

// Small budgets so the offline construction stays fast in unit tests.
TeacherConfig small_teacher() {
    TeacherConfig cfg;
    cfg.teaching_set_size = 6;
    cfg.repeats_per_candidate = 3;
    cfg.candidate_pool_size = 5;
    cfg.grid_cols = 5;
    cfg.grid_rows = 4;
    cfg.reach_sample = 1500;
    return cfg;
}

const Rect kBounds{-1.3, -1.3, 1.3, 1.3};

}  // namespace

TEST_CASE("build_teaching_set produces one demo per kept cell") {
    EnvironmentConfig env_cfg;
    const TeacherConfig cfg = small_teacher();
    std::mt19937_64 rng(1);
    const auto items = build_teaching_set(env_cfg, cfg, kBounds, rng);
    REQUIRE(items.size() == cfg.teaching_set_size);
    std::set<int> cells;
    for (const TeachingItem& item : items) {
        CHECK(teacher_cell_of(item.y_demo, kBounds, cfg) == item.cell);
        cells.insert(item.cell);
    }
    CHECK(cells.size() == items.size());
}

TEST_CASE("build_teaching_set is deterministic given the seed") {
    EnvironmentConfig env_cfg;
    const TeacherConfig cfg = small_teacher();
    auto build = [&] {
        std::mt19937_64 rng(42);
        std::stringstream out;
        save_teaching_set(out, build_teaching_set(env_cfg, cfg, kBounds, rng));
        return out.str();
    };
    CHECK(build() == build());
}

TEST_CASE("zero environment noise makes every candidate variance zero") {
    EnvironmentConfig env_cfg;
    env_cfg.noise_sigma = 0.0;
    const TeacherConfig cfg = small_teacher();
    std::mt19937_64 rng(7);
    // with all variances tied the first candidate per cell wins; just assert
    // the construction still yields a full, valid set
    const auto items = build_teaching_set(env_cfg, cfg, kBounds, rng);
    CHECK(items.size() == cfg.teaching_set_size);
}

TEST_CASE("teaching set save/load round-trip") {
    EnvironmentConfig env_cfg;
    const TeacherConfig cfg = small_teacher();
    std::mt19937_64 rng(3);
    const auto items = build_teaching_set(env_cfg, cfg, kBounds, rng);
    std::stringstream buf;
    save_teaching_set(buf, items);
    const auto back = load_teaching_set(buf);
    REQUIRE(back.size() == items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        CHECK(back[i].cell == items[i].cell);
        CHECK(distance(back[i].y_demo, items[i].y_demo) < 1e-7);
    }
}

TEST_CASE("next_demo prefers unreached items") {
    TeacherConfig cfg;
    std::vector<TeachingItem> items;
    for (int i = 0; i < 3; ++i) items.push_back({Action(), {static_cast<double>(i), 0.0}, i});
    std::mt19937_64 rng(4);

    SECTION("empty memory: uniform over all items") {
        EpisodicMemory mem;
        std::set<int> seen;
        for (int i = 0; i < 200; ++i) seen.insert(next_demo(items, mem, cfg, rng).cell);
        CHECK(seen.size() == 3);
    }
    SECTION("everything reached: fallback to all items") {
        EpisodicMemory mem;
        for (const TeachingItem& it : items) mem.insert(Action(), it.y_demo, Origin::autonomous);
        std::set<int> seen;
        for (int i = 0; i < 200; ++i) seen.insert(next_demo(items, mem, cfg, rng).cell);
        CHECK(seen.size() == 3);
    }
    SECTION("a single unreached item is always picked") {
        EpisodicMemory mem;
        mem.insert(Action(), items[0].y_demo, Origin::autonomous);
        mem.insert(Action(), items[2].y_demo, Origin::autonomous);
        for (int i = 0; i < 50; ++i) CHECK(next_demo(items, mem, cfg, rng).cell == 1);
    }
}

TEST_CASE("interaction schedule") {
    TeacherConfig cfg;
    CHECK(!interaction_due(0, cfg));
    CHECK(!interaction_due(149, cfg));
    CHECK(interaction_due(150, cfg));
    CHECK(interaction_due(300, cfg));
    CHECK(!interaction_due(151, cfg));
}

TEST_CASE("apply_demonstration feeds memory and region tree") {
    EnvironmentConfig env_cfg;
    env_cfg.noise_sigma = 0.0;
    FishingEnv env(env_cfg);
    EpisodicMemory mem;
    LowLevelConfig ll;
    HighLevelConfig hl;
    hl.task_bounds = {-4, -4, 4, 4};
    RegionTree tree(hl.task_bounds);
    const SimilarityContext ctx{env.rest_outcome()};
    std::mt19937_64 rng(5);

    std::array<double, kActionDim> p{};
    p[0] = 0.3;
    p[4] = -0.4;
    const Action demo(p);
    const TaskPoint y_demo = env.execute(demo).outcome;
    const TeachingItem item{demo, y_demo, 0};

    apply_demonstration(item, mem, tree, env, ll, hl, ctx, rng);
    CHECK(mem.size() == 1 + ll.imitation_trials);
    CHECK(mem.episode(0).origin == Origin::demonstration);
    CHECK(tree.node(0).history.size() == 1 + ll.imitation_trials);
    CHECK(tree.node(0).history.front().competence == 0.0);
}

TEST_CASE("exact imitation of a demo scores perfect competence") {
    EnvironmentConfig env_cfg;
    env_cfg.noise_sigma = 0.0;
    FishingEnv env(env_cfg);
    EpisodicMemory mem;
    LowLevelConfig ll;
    ll.imitation_eps = 1e-12;
    HighLevelConfig hl;
    hl.task_bounds = {-4, -4, 4, 4};
    RegionTree tree(hl.task_bounds);
    const SimilarityContext ctx{env.rest_outcome()};
    std::mt19937_64 rng(6);

    std::array<double, kActionDim> p{};
    p[1] = 0.5;
    p[9] = 0.2;
    const Action demo(p);
    const TaskPoint y_demo = env.execute(demo).outcome;
    apply_demonstration({demo, y_demo, 0}, mem, tree, env, ll, hl, ctx, rng);
    for (const auto& rec : tree.node(0).history) CHECK(rec.competence == 0.0);
}
