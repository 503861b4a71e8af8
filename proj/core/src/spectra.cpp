#include "erspec/spectra.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "erspec/errors.hpp"
#include "erspec/exponents.hpp"

namespace erspec {

LinearOperator as_operator(const Eigen::MatrixXd& m) {
    return {static_cast<int>(m.rows()), [&m](const double* x, double* y) {
                Eigen::Map<const Eigen::VectorXd> xv(x, m.cols());
                Eigen::Map<Eigen::VectorXd>(y, m.rows()).noalias() = m * xv;
            }};
}

LinearOperator as_operator(const ScaledMatrix& m) {
    return {m.n, [&m](const double* x, double* y) { m.apply(x, y); }};
}

LinearOperator as_operator(const Graph& g, double scale) {
    return {g.n(), [&g, scale](const double* x, double* y) {
                for (int i = 0; i < g.n(); ++i) {
                    double acc = 0;
                    for (int j : g.neighbors(i)) acc += x[j];
                    y[i] = scale * acc;
                }
            }};
}

namespace {

void require_symmetric(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw ContractError("eig_sym: matrix is not square");
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw ContractError("eig_sym: matrix is not symmetric");
}

EigenDecomposition run_dsyevr(const Eigen::MatrixXd& m, char range, double lo, double hi, bool want_vectors) {
    require_symmetric(m);
    int n = static_cast<int>(m.rows());
    EigenDecomposition out;
    out.n = n;
    out.method = EigMethod::dense;
    if (n == 0) return out;
    Eigen::MatrixXd a = m;
    std::vector<double> w(n);
    std::vector<lapack_int> support(2 * static_cast<size_t>(n));
    Eigen::MatrixXd z;
    if (want_vectors) z.resize(n, n);
    lapack_int found = 0;
    lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', range, 'L', n, a.data(), n, lo, hi,
                                     0, 0, 0.0, &found, w.data(), want_vectors ? z.data() : nullptr, n,
                                     support.data());
    if (info != 0) throw NumericError("dsyevr failed with info " + std::to_string(info));
    out.values.resize(found);
    for (int i = 0; i < found; ++i) out.values[i] = w[found - 1 - i];
    if (want_vectors) {
        // Reverse in place; at N = 10^4 a second n x n copy would not fit comfortably.
        a.resize(0, 0);
        z.conservativeResize(n, found);
        for (int i = 0; i < found / 2; ++i) z.col(i).swap(z.col(found - 1 - i));
        out.vectors = std::move(z);
    }
    return out;
}

}  // namespace

EigenDecomposition eig_sym(const Eigen::MatrixXd& m, bool want_vectors) {
    auto out = run_dsyevr(m, 'A', 0, 0, want_vectors);
    out.rank.resize(out.values.size());
    for (size_t i = 0; i < out.rank.size(); ++i) out.rank[i] = static_cast<int>(i) + 1;
    return out;
}

EigenDecomposition eig_sym_window(const Eigen::MatrixXd& m, double lo, double hi, bool want_vectors) {
    if (!(lo < hi)) throw ParameterError("eig_sym_window: empty interval");
    auto out = run_dsyevr(m, 'V', lo, hi, want_vectors);
    // Ranks need the count above the window; a second values-only pass supplies it.
    auto above = run_dsyevr(m, 'V', hi, std::numeric_limits<double>::max(), false);
    int offset = static_cast<int>(above.values.size());
    out.rank.resize(out.values.size());
    for (size_t i = 0; i < out.rank.size(); ++i) out.rank[i] = offset + static_cast<int>(i) + 1;
    return out;
}

std::vector<double> eigenvalues_sym(const Eigen::MatrixXd& m) { return eig_sym(m, false).values; }

double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0;
    auto v = eigenvalues_sym(m);
    return std::max(std::abs(v.front()), std::abs(v.back()));
}

namespace {

Eigen::MatrixXd materialize(const LinearOperator& op) {
    Eigen::MatrixXd a(op.n, op.n);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(op.n);
    for (int j = 0; j < op.n; ++j) {
        e[j] = 1.0;
        op.apply(e.data(), a.col(j).data());
        e[j] = 0.0;
    }
    return 0.5 * (a + a.transpose());
}

Eigen::VectorXd random_unit(int n, std::mt19937_64& eng) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = static_cast<double>(eng() >> 11) * 0x1.0p-53 - 0.5;
    return v.normalized();
}

struct LanczosState {
    Eigen::MatrixXd basis;
    std::vector<double> alpha;
    std::vector<double> beta;  // beta[j] couples basis j and j+1
    int steps = 0;
};

// Orthogonalize w against the first `count` basis vectors (two passes).
void reorthogonalize(const Eigen::MatrixXd& basis, int count, Eigen::VectorXd& w) {
    for (int pass = 0; pass < 2; ++pass) {
        auto q = basis.leftCols(count);
        Eigen::VectorXd c = q.transpose() * w;
        w.noalias() -= q * c;
    }
}

// Extend the Krylov basis to `target` vectors; returns false on exhaustion.
void lanczos_extend(const LinearOperator& op, LanczosState& st, int target, std::mt19937_64& eng) {
    int n = op.n;
    // One spare column holds the next Lanczos vector.
    int cols = std::min(n, target + 1);
    if (st.basis.cols() < cols) st.basis.conservativeResize(n, cols);
    Eigen::VectorXd w(n);
    while (st.steps < target) {
        int j = st.steps;
        op.apply(st.basis.col(j).data(), w.data());
        double a = st.basis.col(j).dot(w);
        w -= a * st.basis.col(j);
        if (j > 0) w -= st.beta[j - 1] * st.basis.col(j - 1);
        reorthogonalize(st.basis, j + 1, w);
        st.alpha.push_back(a);
        double b = w.norm();
        st.steps = j + 1;
        if (st.steps == n) {
            st.beta.push_back(0.0);
            break;
        }
        if (b <= 1e-10) {
            // Invariant subspace: continue from a fresh direction, decoupled block.
            Eigen::VectorXd r = random_unit(n, eng);
            reorthogonalize(st.basis, st.steps, r);
            st.beta.push_back(0.0);
            st.basis.col(st.steps) = r.normalized();
        } else {
            st.beta.push_back(b);
            st.basis.col(st.steps) = w / b;
        }
    }
}

}  // namespace

EigenDecomposition eig_extremal(const LinearOperator& op, int k, const LanczosOptions& opts) {
    int n = op.n;
    if (k < 1 || k > n) throw ParameterError("eig_extremal: need 1 <= k <= n");
    EigenDecomposition out;
    out.n = n;
    if (n <= std::max(64, 4 * k)) {
        auto full = eig_sym(materialize(op), opts.want_vectors);
        std::vector<int> pick;
        for (int i = 0; i < n; ++i)
            if (i < k || i >= n - k) pick.push_back(i);
        out.method = EigMethod::dense;
        for (int i : pick) {
            out.values.push_back(full.values[i]);
            out.rank.push_back(i + 1);
        }
        if (opts.want_vectors) {
            out.vectors.resize(n, static_cast<Eigen::Index>(pick.size()));
            for (size_t c = 0; c < pick.size(); ++c) out.vectors.col(c) = full.vectors.col(pick[c]);
        }
        return out;
    }
    out.method = EigMethod::lanczos_extremal;
    int max_iter = opts.max_iter > 0 ? std::min(opts.max_iter, n) : n;
    std::mt19937_64 eng(opts.seed);
    LanczosState st;
    st.basis.resize(n, 0);
    st.basis.conservativeResize(n, 1);
    st.basis.col(0) = random_unit(n, eng);
    int target = std::min(max_iter, std::max(2 * k + 20, opts.check_every));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    std::vector<int> want;
    while (true) {
        lanczos_extend(op, st, target, eng);
        int m = st.steps;
        Eigen::VectorXd dg = Eigen::Map<Eigen::VectorXd>(st.alpha.data(), m);
        Eigen::VectorXd sub = Eigen::Map<Eigen::VectorXd>(st.beta.data(), m - 1);
        tri.computeFromTridiagonal(dg, sub, Eigen::ComputeEigenvectors);
        const auto& theta = tri.eigenvalues();  // ascending
        double scale = std::max(std::abs(theta[0]), std::abs(theta[m - 1]));
        want.clear();
        int kk = std::min(k, m);
        for (int i = 0; i < kk; ++i) want.push_back(m - 1 - i);
        for (int i = kk - 1; i >= 0; --i)
            if (std::find(want.begin(), want.end(), i) == want.end()) want.push_back(i);
        bool converged = true;
        double last_beta = st.beta[m - 1];
        for (int i : want)
            if (std::abs(last_beta * tri.eigenvectors()(m - 1, i)) > opts.tol * std::max(scale, 1e-300)) converged = false;
        if ((converged && m >= std::min(n, 2 * k)) || m >= max_iter) {
            if (!converged) throw NumericError("Lanczos did not converge within " + std::to_string(max_iter) + " steps");
            out.values.clear();
            out.rank.clear();
            for (size_t c = 0; c < want.size(); ++c) {
                out.values.push_back(theta[want[c]]);
                int pos = m - 1 - want[c];
                out.rank.push_back(c < static_cast<size_t>(kk) ? pos + 1 : n - want[c]);
            }
            if (opts.want_vectors) {
                out.vectors.resize(n, static_cast<Eigen::Index>(want.size()));
                for (size_t c = 0; c < want.size(); ++c)
                    out.vectors.col(c) = (st.basis.leftCols(m) * tri.eigenvectors().col(want[c])).normalized();
            }
            return out;
        }
        target = std::min(max_iter, m + opts.check_every);
    }
}

double operator_norm(const LinearOperator& op, int dense_cutoff, int lanczos_iters) {
    if (op.n == 0) return 0;
    if (op.n <= dense_cutoff) return spectral_norm(materialize(op));
    LanczosOptions opts;
    opts.max_iter = std::min(op.n, lanczos_iters);
    opts.want_vectors = false;
    opts.tol = 1e-8;
    std::mt19937_64 eng(opts.seed);
    LanczosState st;
    st.basis.resize(op.n, 1);
    st.basis.col(0) = random_unit(op.n, eng);
    lanczos_extend(op, st, opts.max_iter, eng);
    int m = st.steps;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(Eigen::Map<Eigen::VectorXd>(st.alpha.data(), m),
                               Eigen::Map<Eigen::VectorXd>(st.beta.data(), m - 1), Eigen::EigenvaluesOnly);
    return std::max(std::abs(tri.eigenvalues()[0]), std::abs(tri.eigenvalues()[m - 1]));
}

double max_residual(const LinearOperator& op, const EigenDecomposition& e) {
    double worst = 0;
    Eigen::VectorXd y(op.n);
    for (Eigen::Index i = 0; i < e.vectors.cols(); ++i) {
        op.apply(e.vectors.col(i).data(), y.data());
        worst = std::max(worst, (y - e.values[i] * e.vectors.col(i)).norm());
    }
    return worst;
}

Eigen::MatrixXd TridiagMatrix::dense() const {
    int m = size();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) t(i, i) = diag[i];
    for (int i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = offdiag[i];
    return t;
}

std::vector<double> TridiagMatrix::eigenvalues() const {
    int m = size();
    if (m == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    Eigen::VectorXd dg = Eigen::Map<const Eigen::VectorXd>(diag.data(), m);
    Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(offdiag.data(), m - 1))
                                : Eigen::VectorXd();
    tri.computeFromTridiagonal(dg, sub, Eigen::EigenvaluesOnly);
    std::vector<double> v(tri.eigenvalues().data(), tri.eigenvalues().data() + m);
    std::reverse(v.begin(), v.end());
    return v;
}

Eigen::VectorXd TridiagMatrix::top_eigenvector() const {
    int m = size();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    Eigen::VectorXd dg = Eigen::Map<const Eigen::VectorXd>(diag.data(), m);
    Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(offdiag.data(), m - 1))
                                : Eigen::VectorXd();
    tri.computeFromTridiagonal(dg, sub, Eigen::ComputeEigenvectors);
    Eigen::VectorXd v = tri.eigenvectors().col(m - 1);
    if (v[0] < 0) v = -v;
    return v;
}

TridiagMatrix tridiagonalize(const LinearOperator& op, int x, int r) {
    if (x < 0 || x >= op.n || r < 0) throw ParameterError("tridiagonalize: bad vertex or radius");
    TridiagMatrix t;
    t.center = x;
    int n = op.n;
    Eigen::MatrixXd basis(n, std::min(n, r + 1));
    basis.col(0).setZero();
    basis(x, 0) = 1.0;
    Eigen::VectorXd w(n);
    for (int j = 0; j <= r; ++j) {
        op.apply(basis.col(j).data(), w.data());
        double a = basis.col(j).dot(w);
        t.diag.push_back(a);
        if (j == r) break;
        w -= a * basis.col(j);
        if (j > 0) w -= t.offdiag[j - 1] * basis.col(j - 1);
        reorthogonalize(basis, j + 1, w);
        double b = w.norm();
        if (b < 1e-10 || j + 1 >= n) {
            t.breakdown = true;
            break;
        }
        t.offdiag.push_back(b);
        basis.col(j + 1) = w / b;
    }
    return t;
}

TridiagMatrix z_alpha_matrix(double alpha, int r) {
    if (!(alpha >= 0)) throw DomainError("Z(alpha) needs alpha >= 0");
    if (r < 1) throw ParameterError("Z(alpha) needs r >= 1");
    TridiagMatrix t;
    t.alpha = alpha;
    t.diag.assign(static_cast<size_t>(r) + 1, 0.0);
    t.offdiag.assign(static_cast<size_t>(r), 1.0);
    t.offdiag[0] = std::sqrt(alpha);
    return t;
}

Graph pq_tree(int p, int q, int depth) {
    if (p < 1 || q < 1 || depth < 0) throw ParameterError("pq_tree: need p, q >= 1 and depth >= 0");
    std::vector<Edge> edges;
    std::vector<int> level{0};
    int next = 1;
    for (int k = 1; k <= depth; ++k) {
        std::vector<int> fresh;
        int kids = (k == 1) ? p : q;
        for (int u : level)
            for (int c = 0; c < kids; ++c) {
                edges.emplace_back(u, next);
                fresh.push_back(next++);
            }
        level = std::move(fresh);
    }
    return Graph::from_edges(next, edges);
}

TreeNormRecord tree_norm_check(int p, int q, int depth) {
    TreeNormRecord rec;
    rec.p = p;
    rec.q = q;
    rec.depth = depth;
    Graph tree = pq_tree(p, q, depth);
    rec.vertices = tree.n();
    LanczosOptions opts;
    opts.want_vectors = false;
    opts.tol = 1e-14;
    auto e = eig_extremal(as_operator(tree), 1, opts);
    rec.norm = std::max(std::abs(e.values.front()), std::abs(e.values.back()));
    // Radial reduction: level k couples to level k+1 with weight sqrt(children count).
    TridiagMatrix radial;
    radial.diag.assign(static_cast<size_t>(depth) + 1, 0.0);
    for (int k = 0; k < depth; ++k) radial.offdiag.push_back(std::sqrt(k == 0 ? p : q));
    rec.radial_norm = depth == 0 ? 0.0 : radial.eigenvalues().front();
    double ratio = std::max(static_cast<double>(p) / q, 2.0);
    rec.bound = std::sqrt(static_cast<double>(q)) * lambda_of_alpha(ratio);
    rec.forest_bound = 2.0 * std::sqrt(static_cast<double>(q));
    rec.within_bound = rec.norm <= rec.bound + 1e-9;
    return rec;
}

void write_spectrum_csv(std::ostream& os, const EigenDecomposition& e, bool inf_norms) {
    os << "index,eigenvalue,inf_norm_of_vector\n";
    char buf[96];
    for (size_t i = 0; i < e.values.size(); ++i) {
        double inf = (inf_norms && e.vectors.cols() > 0) ? e.vectors.col(i).cwiseAbs().maxCoeff() : std::nan("");
        std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g\n", e.rank.empty() ? static_cast<int>(i) + 1 : e.rank[i],
                      e.values[i], inf);
        os << buf;
    }
}

}  // namespace erspec
