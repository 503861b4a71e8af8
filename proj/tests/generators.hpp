#pragma once

// Small hand-rolled generators for property tests.

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "erspec/graph.hpp"

namespace gen {

using Eng = std::mt19937_64;

inline double uniform(Eng& e, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(e); }
inline int integer(Eng& e, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(e); }

inline std::vector<erspec::Edge> random_edges(Eng& e, int n, double p) {
    std::vector<erspec::Edge> edges;
    std::bernoulli_distribution coin(p);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (coin(e)) edges.emplace_back(u, v);
    return edges;
}

inline erspec::Graph random_graph(Eng& e, int n, double p) { return erspec::Graph::from_edges(n, random_edges(e, n, p)); }

// Random labelled tree by attaching each vertex to an earlier one.
inline std::vector<erspec::Edge> random_tree(Eng& e, int n) {
    std::vector<erspec::Edge> edges;
    for (int v = 1; v < n; ++v) edges.emplace_back(integer(e, 0, v - 1), v);
    return edges;
}

inline Eigen::MatrixXd random_symmetric(Eng& e, int n) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = uniform(e, -1, 1);
    return m;
}

template <class F>
void cases(int count, uint64_t seed, F&& f) {
    Eng e(seed);
    for (int i = 0; i < count; ++i) f(e);
}

}  // namespace gen
