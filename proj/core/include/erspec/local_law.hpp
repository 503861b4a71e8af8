#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "erspec/graph.hpp"
#include "erspec/measures.hpp"

namespace erspec {

struct GreenFunction {
    cplx z;
    int n = 0;
    std::vector<int> excluded;  // T; rows and columns of T are zero
    Eigen::VectorXcd diag;
    Eigen::MatrixXcd full;      // empty unless requested
    bool has_full() const { return full.size() > 0; }
};

// (M^{(T)} - z)^{-1} by complex LU on the dense shifted matrix.
GreenFunction green_function(const Eigen::MatrixXd& m, cplx z, bool want_full, const std::vector<int>& excluded = {});
GreenFunction green_function(const ScaledMatrix& m, cplx z, bool want_full, const std::vector<int>& excluded = {});

// G^{(x)} from G through G_ab - G_ax G_xb / G_xx.
Eigen::MatrixXcd minor_by_update(const GreenFunction& g, int x);

double ward_residual(const GreenFunction& g);

// beta_x = sum_y |H_xy|^2.
std::vector<double> row_mass(const ScaledMatrix& h);

struct TypicalityReport {
    std::vector<double> phi;
    std::vector<cplx> psi;
    double threshold = 0;
    std::vector<int> typical;
    std::vector<double> beta;
};

TypicalityReport typicality(const ScaledMatrix& h, const GreenFunction& g, double a);

struct LocalLawReport {
    double max_diag_err = 0;  // max_x |G_xx - m_{beta_x}|
    double avg_err = 0;       // |N^{-1} tr G - m|
    double rate_ref = 0;      // (log N / d^2)^{1/3}
    double max_offdiag = 0;   // max_{x != y} |G_xy|, when the full matrix is held
};

LocalLawReport local_law_report(const GreenFunction& g, const std::vector<double>& beta, double d);

struct SceResidual {
    Eigen::VectorXcd y;           // 1/G_xx + z + sum_y |H_xy|^2 G^{(x)}_yy
    Eigen::VectorXcd y_schur;     // same with 1/G_xx replaced by its Schur complement form
    Eigen::VectorXcd epsilon;     // typical vertices only, in the order of `typical`
    double max_y = 0;
    double max_schur_gap = 0;     // max_x |1/G_xx - (M_xx - z - sum M_xa G^{(x)}_ab M_bx)|
    double max_epsilon = 0;
    double max_typical_err = 0;   // max_{x in T} |G_xx - m|
    double stability_constant = 0;
};

SceResidual sce_residual(const ScaledMatrix& m, const ScaledMatrix& h, const GreenFunction& g,
                         const std::vector<int>& typical);

struct InstabilityRecord {
    int d = 0;
    int r = 0;
    cplx phase;
    double c1 = 0;
    double mu = 0;
    std::vector<cplx> radial_u;         // u on the sphere of radius k
    std::vector<cplx> radial_residual;  // ((phase - S) u) on the sphere of radius k
    double u_inf = 0;
    double residual_inf = 0;
    double lower_bound = 0;
};

InstabilityRecord instability_probe(int d, int r, cplx phase);

struct LocalLawRow {
    cplx z;
    LocalLawReport report;
    double d = 0;
    int n = 0;
    uint64_t seed = 0;
};

void write_local_law_csv(std::ostream& os, const std::vector<LocalLawRow>& rows);

}  // namespace erspec
