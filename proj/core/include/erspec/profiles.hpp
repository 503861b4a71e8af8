#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "erspec/graph.hpp"
#include "erspec/pruning.hpp"
#include "erspec/spectra.hpp"

namespace erspec {

// u_0..u_{r_star}; sum of squares is one.
std::vector<double> profile_weights(double alpha, int r_star);

struct LocalizationProfile {
    int x = -1;
    int sigma = 1;
    double alpha = 0;
    std::vector<double> weights;
    std::vector<std::vector<int>> support;  // S^tau_0(x)..S^tau_{r_star}(x)

    std::vector<std::pair<int, double>> entries() const;
    Eigen::VectorXd dense(int n) const;
    double dot(const Eigen::VectorXd& w) const;
    // Mass outside B_r(x) of the base graph, for r = 0..r_star.
    std::vector<double> tail_masses(const Graph& base) const;
};

LocalizationProfile build_profile(const PrunedGraph& p, int x, int sigma);

struct PrunedOperators {
    int n = 0;
    double d = 0;
    double tau = 0;
    int r_star = 0;
    uint64_t seed = 0;
    ScaledMatrix h;              // (A - EA)/sqrt(d)
    ScaledMatrix a_tau;          // A^tau / sqrt(d)
    std::vector<char> chi;       // 1 outside the pruned balls around V_tau
    std::vector<int> centers;    // V = {alpha_x >= 2 + xi^{1/4}} with a valid profile
    std::vector<int> degenerate; // members of V whose profile support ran out
    std::vector<LocalizationProfile> profiles;  // (x, +), (x, -) for x in centers

    void apply_h(const double* v, double* out) const;
    void apply_h_tau(const double* v, double* out) const;
    void apply_pi(const double* v, double* out) const;
    void apply_h_hat(const double* v, double* out) const;
    // (EA - chi EA chi), unscaled.
    void apply_ea_cut(const double* v, double* out) const;
    LinearOperator op(void (PrunedOperators::*f)(const double*, double*) const) const;
};

PrunedOperators build_pruned_operators(const GraphSample& g, const PrunedGraph& p, double xi);

double profile_residual(const PrunedOperators& ops, const LocalizationProfile& prof);

struct ApproximationReport {
    double norm_h_htau = 0;
    double norm_htau_hhat = 0;
    double norm_complement_block = 0;
    double norm_ea_cut = 0;
    double tau = 0;
    int r_star = 0;
    uint64_t seed = 0;
};

ApproximationReport approximation_report(const PrunedOperators& ops);

// Smallest eigenvalue of I + (1 + 2/sqrt(d)) Q + c max(log N / d^2, 1/sqrt(d)) - |H|.
double ihara_bass_check(const ScaledMatrix& h, const DegreeProfile& profile, double c);

}  // namespace erspec
