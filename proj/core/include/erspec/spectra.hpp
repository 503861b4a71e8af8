#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

#include "erspec/graph.hpp"

namespace erspec {

struct LinearOperator {
    int n = 0;
    std::function<void(const double*, double*)> apply;
};

// Views: the argument must outlive the operator.
LinearOperator as_operator(const Eigen::MatrixXd& m);
LinearOperator as_operator(const ScaledMatrix& m);
LinearOperator as_operator(const Graph& g, double scale = 1.0);
LinearOperator as_operator(Eigen::MatrixXd&&) = delete;
LinearOperator as_operator(ScaledMatrix&&) = delete;
LinearOperator as_operator(Graph&&, double = 1.0) = delete;

enum class EigMethod { dense, lanczos_extremal };

struct EigenDecomposition {
    int n = 0;
    EigMethod method = EigMethod::dense;
    std::vector<double> values;  // descending
    Eigen::MatrixXd vectors;     // column i pairs with values[i]; empty when not requested
    std::vector<int> rank;       // 1-based position of values[i] in the full descending order
};

// All eigenpairs through LAPACK dsyevr.
EigenDecomposition eig_sym(const Eigen::MatrixXd& m, bool want_vectors = true);
// Eigenpairs with eigenvalues in (lo, hi].
EigenDecomposition eig_sym_window(const Eigen::MatrixXd& m, double lo, double hi, bool want_vectors = true);
std::vector<double> eigenvalues_sym(const Eigen::MatrixXd& m);

struct LanczosOptions {
    int max_iter = 0;  // 0 means up to n
    int check_every = 25;
    double tol = 1e-10;  // relative residual for convergence
    uint64_t seed = 0x5eed;
    bool want_vectors = true;
};

// k largest and k smallest eigenpairs by Lanczos with full reorthogonalization.
EigenDecomposition eig_extremal(const LinearOperator& op, int k, const LanczosOptions& opts = {});

double spectral_norm(const Eigen::MatrixXd& m);
// Dense below dense_cutoff, otherwise a fixed-length Lanczos run.
double operator_norm(const LinearOperator& op, int dense_cutoff = 4096, int lanczos_iters = 200);

// Max over computed pairs of ||M w - lambda w||.
double max_residual(const LinearOperator& op, const EigenDecomposition& e);

struct TridiagMatrix {
    std::vector<double> diag;     // Z_00..Z_rr
    std::vector<double> offdiag;  // Z_01..Z_{r-1,r}
    bool breakdown = false;
    int center = -1;
    double alpha = std::numeric_limits<double>::quiet_NaN();

    int size() const { return static_cast<int>(diag.size()); }
    Eigen::MatrixXd dense() const;
    std::vector<double> eigenvalues() const;  // descending
    Eigen::VectorXd top_eigenvector() const;
};

TridiagMatrix tridiagonalize(const LinearOperator& op, int x, int r);
TridiagMatrix z_alpha_matrix(double alpha, int r);

// Rooted tree: root has p children, every other internal vertex q children.
Graph pq_tree(int p, int q, int depth);

struct TreeNormRecord {
    int p = 0, q = 0, depth = 0;
    long vertices = 0;
    double norm = 0;         // Lanczos on the explicit tree
    double radial_norm = 0;  // top eigenvalue of the radial tridiagonal reduction
    double bound = 0;        // sqrt(q) * Lambda(max(p/q, 2))
    double forest_bound = 0; // 2 sqrt(q)
    bool within_bound = false;
};

TreeNormRecord tree_norm_check(int p, int q, int depth);

void write_spectrum_csv(std::ostream& os, const EigenDecomposition& e, bool inf_norms);

}  // namespace erspec
