#pragma once

#include <iosfwd>
#include <vector>

#include "erspec/graph.hpp"

namespace erspec {

struct PrunedGraph {
    GraphSample base;
    double tau = 0;
    int r_star = 0;
    std::vector<int> v_tau;
    std::vector<Edge> removed_edges;  // (u < v), ascending
    Graph kept;
};

std::vector<int> select_v_tau(const DegreeProfile& profile, double tau);

PrunedGraph prune(const GraphSample& g, double tau, int r_star);
// Wrap an explicit removal set without running the construction.
PrunedGraph make_pruned(const GraphSample& g, double tau, int r_star, std::vector<Edge> removed);

struct PropertyReport {
    bool separated = false;      // (i) distinct V_tau vertices at kept-distance >= 4 r_star + 1
    bool balls_are_trees = false;  // (ii)
    bool cuts_touch_v_tau = false; // (iii)
    bool spheres_nested = false;   // (iv) S^tau_i(x) subset of S_i(x)
    int max_removed_degree = 0;    // (v)
    double sphere_loss = 0;        // (vi) max |S_i \ S^tau_i| d^{2-i}
    int v_tau_size = 0;
    long removed = 0;
    bool all() const { return separated && balls_are_trees && cuts_touch_v_tau && spheres_nested; }
};

PropertyReport verify_pruning(const PrunedGraph& p);

// Edge-list text of the removed set under a "# pruned tau=.. r_star=.." header.
void write_removed_edges(std::ostream& os, const PrunedGraph& p);

}  // namespace erspec
