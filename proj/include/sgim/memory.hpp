#pragma once

// Append-only episodic memory with exact nearest-neighbor queries in task
// space (2-D) and action space (24-D). Both indices are incremental k-d
// trees; queries are exact, with distance ties broken by episode index.

#include <algorithm>
#include <array>
#include <cstddef>
#include <istream>
#include <ostream>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgim/core.hpp"
#include "sgim/format.hpp"

namespace sgim {

template <std::size_t D>
class KdTree {
public:
    using Point = std::array<double, D>;

    void insert(const Point& p, std::size_t id) {
        const int fresh = static_cast<int>(nodes_.size());
        nodes_.push_back({p, id, -1, -1});
        if (fresh == 0) return;
        int cur = 0;
        std::size_t depth = 0;
        for (;;) {
            const std::size_t axis = depth % D;
            int& next = p[axis] < nodes_[cur].point[axis] ? nodes_[cur].left : nodes_[cur].right;
            if (next < 0) {
                next = fresh;
                return;
            }
            cur = next;
            ++depth;
        }
    }

    std::size_t size() const { return nodes_.size(); }

    // ids of the (up to) k nearest points, ordered by (distance, id) ascending.
    std::vector<std::size_t> knn(const Point& q, std::size_t k) const {
        if (nodes_.empty() || k == 0) return {};
        Heap heap;
        search(0, 0, q, k, heap);
        std::vector<Cand> cands;
        cands.reserve(heap.size());
        while (!heap.empty()) {
            cands.push_back(heap.top());
            heap.pop();
        }
        std::reverse(cands.begin(), cands.end());
        std::vector<std::size_t> ids;
        ids.reserve(cands.size());
        for (const Cand& c : cands) ids.push_back(c.id);
        return ids;
    }

private:
    struct Node {
        Point point;
        std::size_t id;
        int left, right;
    };
    struct Cand {
        double dist2;
        std::size_t id;
        // Heap keeps the worst candidate on top.
        bool operator<(const Cand& o) const {
            if (dist2 != o.dist2) return dist2 < o.dist2;
            return id < o.id;
        }
    };
    using Heap = std::priority_queue<Cand>;

    static double dist2(const Point& a, const Point& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < D; ++i) {
            const double d = a[i] - b[i];
            s += d * d;
        }
        return s;
    }

    void search(int node, std::size_t depth, const Point& q, std::size_t k, Heap& heap) const {
        if (node < 0) return;
        const Node& n = nodes_[static_cast<std::size_t>(node)];
        const Cand cand{dist2(q, n.point), n.id};
        if (heap.size() < k) {
            heap.push(cand);
        } else if (cand < heap.top()) {
            heap.pop();
            heap.push(cand);
        }
        const std::size_t axis = depth % D;
        const double delta = q[axis] - n.point[axis];
        const int near = delta < 0.0 ? n.left : n.right;
        const int far = delta < 0.0 ? n.right : n.left;
        search(near, depth + 1, q, k, heap);
        // The far side can still hold a tie that wins on index, so prune
        // only on strict inequality.
        if (heap.size() < k || delta * delta <= heap.top().dist2) search(far, depth + 1, q, k, heap);
    }

    std::vector<Node> nodes_;
};

// Trace of the empirical (population) covariance of the outcomes.
inline double outcome_variance(std::span<const TaskPoint> outcomes) {
    if (outcomes.empty()) throw std::invalid_argument("outcome_variance of empty set");
    double m1 = 0.0, m2 = 0.0;
    for (const TaskPoint& p : outcomes) {
        m1 += p.y1;
        m2 += p.y2;
    }
    const double n = static_cast<double>(outcomes.size());
    m1 /= n;
    m2 /= n;
    double v = 0.0;
    for (const TaskPoint& p : outcomes) v += (p.y1 - m1) * (p.y1 - m1) + (p.y2 - m2) * (p.y2 - m2);
    return v / n;
}

class EpisodicMemory {
public:
    std::size_t insert(const Action& a, const TaskPoint& y, Origin origin) {
        const std::size_t id = episodes_.size();
        episodes_.push_back({a, y, origin, id});
        task_index_.insert({y.y1, y.y2}, id);
        action_index_.insert(a.params(), id);
        return id;
    }

    std::size_t size() const { return episodes_.size(); }
    bool empty() const { return episodes_.empty(); }
    const Episode& episode(std::size_t i) const { return episodes_.at(i); }
    const std::vector<Episode>& episodes() const { return episodes_; }

    std::vector<std::size_t> knn_task(const TaskPoint& y, std::size_t k) const {
        if (episodes_.empty()) throw std::runtime_error("knn_task on empty memory");
        return task_index_.knn({y.y1, y.y2}, k);
    }

    std::vector<std::size_t> knn_action(const Action& a, std::size_t k) const {
        if (episodes_.empty()) throw std::runtime_error("knn_action on empty memory");
        return action_index_.knn(a.params(), k);
    }

    double outcome_variance_of(const std::vector<std::size_t>& ids) const {
        std::vector<TaskPoint> pts;
        pts.reserve(ids.size());
        for (std::size_t i : ids) pts.push_back(episodes_.at(i).outcome);
        return outcome_variance(pts);
    }

    // One episode per line: index, origin, 24 action scalars, 2 outcome scalars.
    void dump(std::ostream& out) const {
        for (const Episode& e : episodes_) {
            out << e.index << ',' << origin_name(e.origin);
            for (double v : e.action.params()) out << ',' << fmt9(v);
            out << ',' << fmt9(e.outcome.y1) << ',' << fmt9(e.outcome.y2) << '\n';
        }
    }

    static EpisodicMemory restore(std::istream& in) {
        EpisodicMemory mem;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto cells = split_csv(line);
            if (cells.size() != 2 + kActionDim + 2)
                throw std::runtime_error("bad memory line: " + line);
            std::array<double, kActionDim> params;
            for (std::size_t i = 0; i < kActionDim; ++i) params[i] = std::stod(cells[2 + i]);
            const TaskPoint y{std::stod(cells[2 + kActionDim]), std::stod(cells[3 + kActionDim])};
            mem.insert(Action(params), y, origin_from_name(cells[1]));
        }
        return mem;
    }

private:
    std::vector<Episode> episodes_;
    KdTree<2> task_index_;
    KdTree<kActionDim> action_index_;
};

}  // namespace sgim
