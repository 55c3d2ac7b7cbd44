#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "sgim/memory.hpp"

using namespace sgim;

namespace {

Action random_action(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::array<double, kActionDim> p;
    for (double& v : p) v = uni(rng);
    return Action(p);
}

// Brute-force oracle with the same (dist^2, index) ordering as the indices.
template <std::size_t D>
std::vector<std::size_t> brute_knn(const std::vector<std::array<double, D>>& points,
                                   const std::array<double, D>& q, std::size_t k) {
    std::vector<std::size_t> ids(points.size());
    std::iota(ids.begin(), ids.end(), 0);
    auto d2 = [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t a = 0; a < D; ++a) {
            const double d = points[i][a] - q[a];
            s += d * d;
        }
        return s;
    };
    std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
        const double da = d2(a), db = d2(b);
        if (da != db) return da < db;
        return a < b;
    });
    ids.resize(std::min(k, ids.size()));
    return ids;
}

}  // namespace

TEST_CASE("insert assigns ordinal indices") {
    EpisodicMemory mem;
    std::mt19937_64 rng(1);
    CHECK(mem.insert(random_action(rng), {0, 0}, Origin::autonomous) == 0);
    CHECK(mem.insert(random_action(rng), {1, 1}, Origin::imitation) == 1);
    CHECK(mem.size() == 2);
    CHECK(mem.episode(1).origin == Origin::imitation);
}

TEST_CASE("knn_task basics") {
    EpisodicMemory mem;
    std::mt19937_64 rng(2);
    mem.insert(random_action(rng), {0, 0}, Origin::autonomous);
    mem.insert(random_action(rng), {1, 1}, Origin::autonomous);
    CHECK(mem.knn_task({0.1, 0}, 1) == std::vector<std::size_t>{0});
    CHECK(mem.knn_task({0.1, 0}, 5) == std::vector<std::size_t>{0, 1});
    EpisodicMemory empty;
    CHECK_THROWS(empty.knn_task({0, 0}, 1));
}

TEST_CASE("knn_action exact hit and oversize k") {
    EpisodicMemory mem;
    std::mt19937_64 rng(3);
    const Action a = random_action(rng);
    mem.insert(a, {0, 0}, Origin::autonomous);
    mem.insert(random_action(rng), {1, 1}, Origin::autonomous);
    CHECK(mem.knn_action(a, 1) == std::vector<std::size_t>{0});
    CHECK(mem.knn_action(a, 10).size() == 2);
}

TEST_CASE("knn matches brute force on randomized memories") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int rep = 0; rep < 10; ++rep) {
        EpisodicMemory mem;
        std::vector<std::array<double, 2>> task_pts;
        std::vector<std::array<double, kActionDim>> action_pts;
        const int n = 200 + rep * 80;
        for (int i = 0; i < n; ++i) {
            const Action a = random_action(rng);
            // duplicate some outcomes to exercise tie-breaking
            const TaskPoint y = i % 7 == 0 && i > 0 ? mem.episode(0).outcome
                                                    : TaskPoint{uni(rng), uni(rng)};
            mem.insert(a, y, Origin::autonomous);
            task_pts.push_back({y.y1, y.y2});
            action_pts.push_back(a.params());
        }
        for (int q = 0; q < 20; ++q) {
            const TaskPoint query{uni(rng), uni(rng)};
            const std::size_t k = 1 + static_cast<std::size_t>(q);
            CHECK(mem.knn_task(query, k) == brute_knn(task_pts, {query.y1, query.y2}, k));
            const Action qa = random_action(rng);
            CHECK(mem.knn_action(qa, k) == brute_knn(action_pts, qa.params(), k));
        }
    }
}

TEST_CASE("just-inserted episode is its own nearest neighbor") {
    EpisodicMemory mem;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const TaskPoint y{uni(rng), uni(rng)};
        const std::size_t id = mem.insert(random_action(rng), y, Origin::autonomous);
        const auto nn = mem.knn_task(y, 1);
        CHECK(distance(mem.episode(nn.front()).outcome, y) == 0.0);
        // an exact duplicate of an earlier outcome may win the tie on index
        CHECK(nn.front() <= id);
    }
}

TEST_CASE("outcome variance") {
    const std::vector<TaskPoint> single{{0.4, -0.2}};
    CHECK(outcome_variance(single) == 0.0);
    const std::vector<TaskPoint> pair{{0, 0}, {2, 0}};
    CHECK(outcome_variance(pair) == Catch::Approx(1.0));
    const std::vector<TaskPoint> same{{0.3, 0.3}, {0.3, 0.3}, {0.3, 0.3}};
    CHECK(outcome_variance(same) == 0.0);
    CHECK_THROWS(outcome_variance(std::vector<TaskPoint>{}));
}

TEST_CASE("dump and restore round-trip") {
    EpisodicMemory mem;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    mem.insert(random_action(rng), {uni(rng), uni(rng)}, Origin::autonomous);
    mem.insert(random_action(rng), {uni(rng), uni(rng)}, Origin::demonstration);
    mem.insert(random_action(rng), {uni(rng), uni(rng)}, Origin::imitation);

    std::stringstream buf;
    mem.dump(buf);
    const EpisodicMemory back = EpisodicMemory::restore(buf);
    REQUIRE(back.size() == mem.size());
    for (std::size_t i = 0; i < mem.size(); ++i) {
        CHECK(back.episode(i).origin == mem.episode(i).origin);
        CHECK(back.episode(i).index == i);
        CHECK(distance(back.episode(i).outcome, mem.episode(i).outcome) < 1e-7);
    }

    std::stringstream again;
    back.dump(again);
    buf.clear();
    buf.seekg(0);
    CHECK(again.str() == [&] {
        std::stringstream s;
        mem.dump(s);
        return s.str();
    }());
}
