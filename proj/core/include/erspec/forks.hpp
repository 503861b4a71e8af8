#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "erspec/graph.hpp"

namespace erspec {

struct TuningFork {
    int base = -1;
    std::array<int, 2> hubs{-1, -1};
    std::array<std::vector<int>, 2> spokes;
    int degree = 0;  // D
};

bool operator==(const TuningFork& a, const TuningFork& b);

// Forks whose base lies in the giant component, ordered by (base, hub0, hub1).
std::vector<TuningFork> find_forks(const GraphSample& g, const ComponentCensus& census);
// Pair-enumeration detector used as an independent cross-check.
std::vector<TuningFork> find_forks_bruteforce(const GraphSample& g, const ComponentCensus& census);

bool validate_fork(const TuningFork& f, const Graph& g);

struct ForkEigenpair {
    double eigenvalue = 0;
    Eigen::VectorXd vector;  // full length N, unit norm
};

std::array<ForkEigenpair, 2> fork_eigenpairs(const TuningFork& f, const GraphSample& g);
// ||(A/sqrt d) w - lambda w|| over the whole graph.
double fork_residual(const ForkEigenpair& pair, const GraphSample& g);

double log_expected_fork_count(double n, double d, int D);
double expected_fork_count(double n, double d, int D);
// First-moment count of (base, unordered hub pair) configurations at finite N.
double expected_fork_count_exact(double n, double d, int D);

}  // namespace erspec
