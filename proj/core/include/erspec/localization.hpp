#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "erspec/graph.hpp"
#include "erspec/profiles.hpp"
#include "erspec/spectra.hpp"

namespace erspec {

double gamma_exponent(const Eigen::VectorXd& w, int n);

struct ResonantSet {
    double lambda = 0;
    double delta = 0;
    std::vector<int> vertices;
};

ResonantSet resonant_set(const DegreeProfile& profile, double lambda, double delta);
// max(0.05, (lambda - 2) / 2) capped at lambda - 2.
double default_delta(double lambda);

double predicted_center_mass(double lambda);

struct LocalizationReport {
    double eigenvalue = 0;
    double gamma = 0;
    double l2 = 0, l4 = 0, linf = 0;
    double overlap = 0;
    double center_mass = 0;
    double predicted_center_mass = 0;
};

// Profiles are looked up by center; sign sigma follows the sign of lambda.
LocalizationReport overlap_report(const Eigen::VectorXd& w, double lambda, const ResonantSet& resonant,
                                  const std::vector<LocalizationProfile>& profiles);

struct RigidityPair {
    int rank = 0;  // position in the descending order
    double eigenvalue = 0;
    double predicted = 0;
    double gap = 0;
    int vertex = -1;
};

struct RigidityReport {
    std::vector<int> u_set;  // sorted by alpha descending, then id ascending
    std::vector<RigidityPair> pairs;
    double bulk_max = 0;
    int count_above = 0;  // nontrivial eigenvalues above 2 + xi^{1/2} among those supplied
};

// eigs must contain the top |U|+2 and bottom |U|+1 eigenvalues (by rank).
RigidityReport rigidity_pairing(const EigenDecomposition& eigs, const DegreeProfile& profile, double xi);

struct ScatterRow {
    double eigenvalue = 0;
    double inf_norm = 0;
};

std::vector<ScatterRow> scatter_rows(const EigenDecomposition& eigs);

void write_scatter_csv(std::ostream& os, const std::vector<ScatterRow>& rows);
void write_rigidity_csv(std::ostream& os, const RigidityReport& rep);
void write_localization_csv(std::ostream& os, const std::vector<LocalizationReport>& rows);

}  // namespace erspec
