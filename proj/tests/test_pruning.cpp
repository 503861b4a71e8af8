#include <doctest.h>

#include <cmath>
#include <sstream>

#include "erspec/errors.hpp"
#include "erspec/pruning.hpp"
#include "generators.hpp"

using namespace erspec;

namespace {

// Kept-graph distance between all pairs by Floyd-Warshall, for small graphs.
std::vector<std::vector<int>> all_distances(const Graph& g) {
    int n = g.n();
    const int inf = 1 << 20;
    std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
    for (int i = 0; i < n; ++i) d[i][i] = 0;
    for (auto [u, v] : g.edges()) d[u][v] = d[v][u] = 1;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

}  // namespace

TEST_CASE("select_v_tau") {
    DegreeProfile flat{1.0, {1, 1, 1}, {1, 1, 1}};
    CHECK(select_v_tau(flat, 2).empty());
    DegreeProfile p{1.0, {3, 1, 2}, {3, 1, 2.5}};
    CHECK(select_v_tau(p, 2.5) == std::vector<int>{0, 2});
    CHECK_THROWS_AS(select_v_tau(p, 0.5), ParameterError);
}

TEST_CASE("prune parameter errors") {
    GraphSample g = generate_er(50, 3, 1);
    CHECK_THROWS_AS(prune(g, 1.0, 1), ParameterError);
    CHECK_THROWS_AS(prune(g, 1.5, 0), ParameterError);
}

TEST_CASE("prune with empty V_tau is the identity") {
    GraphSample g = sample_from_edges(5, 10.0, {{0, 1}, {1, 2}, {3, 4}});
    PrunedGraph p = prune(g, 1.5, 1);
    CHECK(p.v_tau.empty());
    CHECK(p.removed_edges.empty());
    CHECK(p.kept.edges() == g.graph.edges());
    PropertyReport rep = verify_pruning(p);
    CHECK(rep.all());
    CHECK(rep.max_removed_degree == 0);
    CHECK(rep.sphere_loss == 0);
}

TEST_CASE("two hubs joined through a path of length two") {
    std::vector<Edge> e{{0, 2}, {2, 1}};
    int next = 3;
    for (int hub : {0, 1})
        for (int k = 0; k < 4; ++k) e.emplace_back(hub, next++);
    GraphSample g = sample_from_edges(next, 2.0, e);
    PrunedGraph p = prune(g, 1.5, 1);
    CHECK(p.v_tau == std::vector<int>{0, 1});
    CHECK(p.removed_edges == std::vector<Edge>{{0, 2}, {1, 2}});
    CHECK(verify_pruning(p).all());
}

TEST_CASE("a cycle inside a ball is detected") {
    GraphSample g = sample_from_edges(7, 1.0, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {3, 4}, {4, 5}, {5, 6}});
    PropertyReport rep = verify_pruning(make_pruned(g, 2.5, 1, {}));
    CHECK_FALSE(rep.balls_are_trees);
    CHECK(rep.cuts_touch_v_tau);
    CHECK(rep.spheres_nested);
}

TEST_CASE("verify_pruning flags a cut away from V_tau") {
    GraphSample g = sample_from_edges(6, 1.0, {{0, 1}, {0, 2}, {0, 3}, {3, 4}, {4, 5}});
    PropertyReport rep = verify_pruning(make_pruned(g, 3.0, 1, {{4, 5}}));
    CHECK_FALSE(rep.cuts_touch_v_tau);
}

TEST_CASE("prune output satisfies every property on random small graphs") {
    gen::cases(60, 51, [](gen::Eng& e) {
        int n = gen::integer(e, 5, 45);
        double p = gen::uniform(e, 0.03, 0.3);
        GraphSample g = sample_from_edges(n, std::max(1.0, p * n), gen::random_edges(e, n, p));
        double tau = gen::uniform(e, 1.05, 2.0);
        int r = gen::integer(e, 1, 2);
        PrunedGraph pg = prune(g, tau, r);
        PropertyReport rep = verify_pruning(pg);
        CHECK(rep.all());
        // Independent path-form check of separation.
        auto dist = all_distances(pg.kept);
        for (int x : pg.v_tau)
            for (int y : pg.v_tau)
                if (x < y) CHECK(dist[x][y] >= 4 * r + 1);
        // Every removed edge of the base touches V_tau.
        for (auto [u, v] : pg.removed_edges)
            CHECK((std::binary_search(pg.v_tau.begin(), pg.v_tau.end(), u) ||
                   std::binary_search(pg.v_tau.begin(), pg.v_tau.end(), v)));
    });
}

TEST_CASE("pruning is idempotent") {
    gen::cases(20, 52, [](gen::Eng& e) {
        GraphSample g = generate_er(gen::integer(e, 100, 600), gen::uniform(e, 2, 6), e());
        PrunedGraph p = prune(g, 1.5, 1);
        GraphSample kept = sample_from_edges(g.n(), g.d, p.kept.edges(), g.seed);
        PrunedGraph again = prune(kept, 1.5, 1);
        CHECK(again.removed_edges.empty());
    });
}

TEST_CASE("prune on G(N, d/N) across sparsities") {
    for (double b : {0.3, 0.6, 1.0})
        for (uint64_t seed = 1; seed <= 20; ++seed) {
            GraphSample g = generate_er(2000, b * std::log(2000.0), seed);
            PrunedGraph p = prune(g, 1.5, 1);
            PropertyReport rep = verify_pruning(p);
            REQUIRE(rep.all());
            int max_deg = 0;
            for (int x = 0; x < g.n(); ++x) max_deg = std::max(max_deg, g.graph.degree(x));
            CHECK(rep.max_removed_degree <= max_deg);
        }
}

TEST_CASE("removed edges export") {
    GraphSample g = sample_from_edges(8, 2.0, {{0, 2}, {2, 1}, {0, 3}, {0, 4}, {0, 5}, {1, 6}, {1, 7}});
    std::ostringstream os;
    write_removed_edges(os, prune(g, 1.5, 1));
    CHECK(os.str() == "# pruned tau=1.5 r_star=1\n0 2\n1 2\n");
}
