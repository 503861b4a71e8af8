#include "erspec/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "erspec/errors.hpp"

namespace erspec {

std::vector<int> select_v_tau(const DegreeProfile& profile, double tau) {
    if (!(tau >= 1)) throw ParameterError("select_v_tau needs tau >= 1");
    std::vector<int> out;
    for (size_t x = 0; x < profile.alpha.size(); ++x)
        if (profile.alpha[x] >= tau) out.push_back(static_cast<int>(x));
    return out;
}

namespace {

class WorkingGraph {
public:
    explicit WorkingGraph(const Graph& g) : adj_(g.n()) {
        for (int x = 0; x < g.n(); ++x) adj_[x].assign(g.neighbors(x).begin(), g.neighbors(x).end());
    }
    const std::vector<int>& neighbors(int x) const { return adj_[x]; }
    void remove(int u, int v) {
        erase(u, v);
        erase(v, u);
    }
    int n() const { return static_cast<int>(adj_.size()); }

private:
    void erase(int u, int v) {
        auto& row = adj_[u];
        auto it = std::lower_bound(row.begin(), row.end(), v);
        if (it != row.end() && *it == v) row.erase(it);
    }
    std::vector<std::vector<int>> adj_;
};

// Truncated BFS recording depth, parent and the first hop out of the root.
class Bfs {
public:
    explicit Bfs(int n) : stamp_(n, 0), dist_(n), parent_(n), branch_(n) {}

    template <class G>
    const std::vector<int>& run(const G& g, int root, int radius) {
        ++now_;
        order_.clear();
        visit(root, 0, -1, -1);
        for (size_t h = 0; h < order_.size(); ++h) {
            int u = order_[h];
            if (dist_[u] == radius) continue;
            for (int w : g.neighbors(u))
                if (stamp_[w] != now_) visit(w, dist_[u] + 1, u, u == root ? w : branch_[u]);
        }
        return order_;
    }
    bool seen(int v) const { return stamp_[v] == now_; }
    int dist(int v) const { return seen(v) ? dist_[v] : -1; }
    int parent(int v) const { return parent_[v]; }
    int branch(int v) const { return branch_[v]; }

private:
    void visit(int v, int d, int p, int b) {
        stamp_[v] = now_;
        dist_[v] = d;
        parent_[v] = p;
        branch_[v] = b;
        order_.push_back(v);
    }
    unsigned now_ = 0;
    std::vector<unsigned> stamp_;
    std::vector<int> dist_, parent_, branch_, order_;
};

struct Pruner {
    const GraphSample& g;
    int r;
    WorkingGraph work;
    std::vector<char> in_v;
    Bfs ball, base, other;
    std::vector<Edge> removed;

    Pruner(const GraphSample& gs, int radius, const std::vector<int>& v_tau)
        : g(gs), r(radius), work(gs.graph), in_v(gs.n(), 0), ball(gs.n()), base(gs.n()), other(gs.n()) {
        for (int x : v_tau) in_v[x] = 1;
    }

    void cut(int u, int v) {
        work.remove(u, v);
        removed.emplace_back(std::min(u, v), std::max(u, v));
    }

    // Phase 1: one cut making B_{2r}(x) closer to a distance-preserving tree. False when clean.
    bool tree_cut(int x) {
        const auto& order = ball.run(work, x, 2 * r);
        base.run(g.graph, x, 2 * r);
        for (int u : order) {
            if (base.dist(u) < ball.dist(u)) {
                cut(x, ball.branch(u));
                return true;
            }
            for (int w : work.neighbors(u)) {
                if (w < u || !ball.seen(w)) continue;
                if (ball.parent(w) == u || ball.parent(u) == w) continue;
                int bu = ball.branch(u), bw = ball.branch(w);
                cut(x, std::min(bu, bw));
                return true;
            }
        }
        return false;
    }

    // Phase 2: cut geodesics to the nearest other V_tau vertex within 4r. False when none.
    bool separation_cut(int x) {
        const auto& order = ball.run(work, x, 4 * r);
        int y = -1;
        for (int v : order)
            if (v != x && in_v[v]) {
                y = v;
                break;
            }
        if (y < 0) return false;
        int len = ball.dist(y);
        other.run(work, y, 4 * r);
        std::vector<Edge> doomed;
        for (int a : work.neighbors(x))
            if (other.dist(a) == len - 1) doomed.emplace_back(x, a);
        for (int b : work.neighbors(y))
            if (ball.dist(b) == len - 1) doomed.emplace_back(y, b);
        for (auto [u, v] : doomed) cut(u, v);
        return true;
    }
};

}  // namespace

PrunedGraph prune(const GraphSample& g, double tau, int r_star) {
    if (!(tau > 1)) throw ParameterError("prune needs tau > 1");
    if (r_star < 1) throw ParameterError("prune needs r_star >= 1");
    auto v_tau = select_v_tau(normalized_degrees(g), tau);
    Pruner pr(g, r_star, v_tau);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int x : v_tau) {
            while (pr.tree_cut(x) || pr.separation_cut(x)) changed = true;
        }
    }
    return make_pruned(g, tau, r_star, std::move(pr.removed));
}

PrunedGraph make_pruned(const GraphSample& g, double tau, int r_star, std::vector<Edge> removed) {
    PrunedGraph p;
    p.base = g;
    p.tau = tau;
    p.r_star = r_star;
    p.v_tau = select_v_tau(normalized_degrees(g), tau);
    for (auto& e : removed)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(removed.begin(), removed.end());
    removed.erase(std::unique(removed.begin(), removed.end()), removed.end());
    p.removed_edges = std::move(removed);
    p.kept = g.graph.without_edges(p.removed_edges);
    return p;
}

PropertyReport verify_pruning(const PrunedGraph& p) {
    PropertyReport rep;
    rep.v_tau_size = static_cast<int>(p.v_tau.size());
    rep.removed = static_cast<long>(p.removed_edges.size());
    const Graph& g = p.base.graph;
    const Graph& k = p.kept;
    int n = g.n();
    std::vector<char> in_v(n, 0);
    for (int x : p.v_tau) in_v[x] = 1;

    rep.cuts_touch_v_tau = k.edge_count() + rep.removed == g.edge_count();
    std::vector<int> removed_degree(n, 0);
    for (auto [u, v] : p.removed_edges) {
        if (!g.has_edge(u, v) || k.has_edge(u, v) || !(in_v[u] || in_v[v])) rep.cuts_touch_v_tau = false;
        rep.max_removed_degree = std::max({rep.max_removed_degree, ++removed_degree[u], ++removed_degree[v]});
    }
    for (int u = 0; u < n && rep.cuts_touch_v_tau; ++u)
        for (int v : k.neighbors(u))
            if (!g.has_edge(u, v)) rep.cuts_touch_v_tau = false;

    rep.separated = rep.balls_are_trees = rep.spheres_nested = true;
    int r = p.r_star;
    std::vector<int> where(n, -1);
    for (int x : p.v_tau) {
        auto far = ball_and_spheres(k, x, 4 * r);
        for (int i = 1; i <= 4 * r; ++i)
            for (int v : far[i])
                if (in_v[v]) rep.separated = false;

        auto kept_spheres = ball_and_spheres(k, x, 2 * r);
        auto base_spheres = ball_and_spheres(g, x, 2 * r);
        long size = 0, inner_edges = 0;
        for (int i = 0; i <= 2 * r; ++i)
            for (int v : kept_spheres[i]) {
                where[v] = x;
                ++size;
            }
        for (int i = 0; i <= 2 * r; ++i)
            for (int v : kept_spheres[i])
                for (int w : k.neighbors(v))
                    if (where[w] == x && v < w) ++inner_edges;
        if (inner_edges != size - 1) rep.balls_are_trees = false;

        for (int i = 1; i <= 2 * r; ++i) {
            const auto& kt = kept_spheres[i];
            const auto& bs = base_spheres[i];
            if (!std::includes(bs.begin(), bs.end(), kt.begin(), kt.end())) rep.spheres_nested = false;
            if (i >= 2) {
                std::vector<int> lost;
                std::set_difference(bs.begin(), bs.end(), kt.begin(), kt.end(), std::back_inserter(lost));
                rep.sphere_loss = std::max(rep.sphere_loss, lost.size() * std::pow(p.base.d, 2.0 - i));
            }
        }
    }
    return rep;
}

void write_removed_edges(std::ostream& os, const PrunedGraph& p) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "# pruned tau=%.17g r_star=%d", p.tau, p.r_star);
    write_edge_list(os, p.removed_edges, buf);
}

}  // namespace erspec
