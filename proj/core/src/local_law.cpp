#include "erspec/local_law.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "erspec/errors.hpp"

namespace erspec {

GreenFunction green_function(const Eigen::MatrixXd& m, cplx z, bool want_full, const std::vector<int>& excluded) {
    if (!(z.imag() > 0)) throw DomainError("Green function needs Im z > 0");
    int n = static_cast<int>(m.rows());
    std::vector<char> out(n, 0);
    for (int t : excluded) {
        if (t < 0 || t >= n) throw ParameterError("excluded vertex out of range");
        out[t] = 1;
    }
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
        if (!out[i]) keep.push_back(i);
    int k = static_cast<int>(keep.size());
    Eigen::MatrixXcd a(k, k);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) a(i, j) = m(keep[i], keep[j]);
    a.diagonal().array() -= z;
    std::vector<lapack_int> piv(std::max(k, 1));
    lapack_int info = k > 0 ? LAPACKE_zgetrf(LAPACK_COL_MAJOR, k, k, a.data(), k, piv.data()) : 0;
    if (info != 0) throw NumericError("Green function: singular shifted matrix");
    if (k > 0) info = LAPACKE_zgetri(LAPACK_COL_MAJOR, k, a.data(), k, piv.data());
    if (info != 0) throw NumericError("Green function: inversion failed");
    GreenFunction g;
    g.z = z;
    g.n = n;
    g.excluded = excluded;
    std::sort(g.excluded.begin(), g.excluded.end());
    g.diag = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < k; ++i) g.diag[keep[i]] = a(i, i);
    if (want_full) {
        if (k == n) {
            g.full = std::move(a);
        } else {
            g.full = Eigen::MatrixXcd::Zero(n, n);
            for (int j = 0; j < k; ++j)
                for (int i = 0; i < k; ++i) g.full(keep[i], keep[j]) = a(i, j);
        }
    }
    return g;
}

GreenFunction green_function(const ScaledMatrix& m, cplx z, bool want_full, const std::vector<int>& excluded) {
    return green_function(m.dense(), z, want_full, excluded);
}

Eigen::MatrixXcd minor_by_update(const GreenFunction& g, int x) {
    if (!g.has_full()) throw ParameterError("minor update needs the full Green function");
    const auto& G = g.full;
    Eigen::MatrixXcd out = G - G.col(x) * G.row(x) / G(x, x);
    out.row(x).setZero();
    out.col(x).setZero();
    return out;
}

double ward_residual(const GreenFunction& g) {
    if (!g.has_full()) throw ParameterError("Ward residual needs the full Green function");
    double worst = 0;
    double eta = g.z.imag();
    for (int x = 0; x < g.n; ++x) {
        if (std::binary_search(g.excluded.begin(), g.excluded.end(), x)) continue;
        double lhs = g.full.row(x).squaredNorm();
        double rhs = g.diag[x].imag() / eta;
        worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    return worst;
}

std::vector<double> row_mass(const ScaledMatrix& h) {
    std::vector<double> beta(h.n, 0.0);
    double c = h.ea_coeff;
    for (int x = 0; x < h.n; ++x) {
        double s = 0;
        long stored = h.row_ptr[x + 1] - h.row_ptr[x];
        for (int64_t k = h.row_ptr[x]; k < h.row_ptr[x + 1]; ++k) s += (h.val[k] - c) * (h.val[k] - c);
        s += (h.n - 1 - stored) * c * c;
        beta[x] = s;
    }
    return beta;
}

namespace {

// |H_xy|^2 for all y (zero at y = x).
Eigen::VectorXd row_squares(const ScaledMatrix& h, int x) {
    Eigen::VectorXd r = Eigen::VectorXd::Constant(h.n, h.ea_coeff * h.ea_coeff);
    r[x] = 0;
    for (int64_t k = h.row_ptr[x]; k < h.row_ptr[x + 1]; ++k) {
        double v = h.val[k] - h.ea_coeff;
        r[h.col[k]] = v * v;
    }
    return r;
}

// G^{(x)}_yy for all y != x.
Eigen::VectorXcd minor_diag(const GreenFunction& g, int x) {
    const auto& G = g.full;
    Eigen::VectorXcd out = G.diagonal() - (G.col(x).array() * G.row(x).transpose().array()).matrix() / G(x, x);
    out[x] = 0;
    return out;
}

}  // namespace

TypicalityReport typicality(const ScaledMatrix& h, const GreenFunction& g, double a) {
    if (!g.has_full()) throw ParameterError("typicality needs the full Green function");
    int n = h.n;
    TypicalityReport rep;
    rep.threshold = a * std::cbrt(std::log(static_cast<double>(n)) / (h.d * h.d));
    rep.phi.resize(n);
    rep.psi.resize(n);
    rep.beta = row_mass(h);
    for (int x = 0; x < n; ++x) {
        Eigen::VectorXd w = row_squares(h, x).array() - 1.0 / n;
        w[x] = 0;
        rep.phi[x] = w.sum();
        rep.psi[x] = (w.cast<cplx>().array() * minor_diag(g, x).array()).sum();
        if (std::max(std::abs(rep.phi[x]), std::abs(rep.psi[x])) <= rep.threshold) rep.typical.push_back(x);
    }
    return rep;
}

LocalLawReport local_law_report(const GreenFunction& g, const std::vector<double>& beta, double d) {
    LocalLawReport rep;
    cplx avg = 0;
    for (int x = 0; x < g.n; ++x) {
        rep.max_diag_err = std::max(rep.max_diag_err, std::abs(g.diag[x] - m_alpha(beta[x], g.z)));
        avg += g.diag[x];
    }
    avg /= static_cast<double>(g.n);
    rep.avg_err = std::abs(avg - m_semicircle(g.z));
    rep.rate_ref = std::cbrt(std::log(static_cast<double>(g.n)) / (d * d));
    if (g.has_full()) {
        Eigen::MatrixXd mag = g.full.cwiseAbs();
        mag.diagonal().setZero();
        rep.max_offdiag = mag.maxCoeff();
    }
    return rep;
}

SceResidual sce_residual(const ScaledMatrix& m, const ScaledMatrix& h, const GreenFunction& g,
                         const std::vector<int>& typical) {
    if (!g.has_full()) throw ParameterError("self-consistent residual needs the full Green function");
    int n = g.n;
    const auto& G = g.full;
    cplx z = g.z;
    SceResidual res;
    res.y.resize(n);
    res.y_schur.resize(n);
    for (int x = 0; x < n; ++x) {
        Eigen::VectorXcd md = minor_diag(g, x);
        cplx field = (row_squares(h, x).cast<cplx>().array() * md.array()).sum();
        res.y[x] = 1.0 / G(x, x) + z + field;
        // Row of M without the diagonal entry.
        Eigen::VectorXd row = Eigen::VectorXd::Constant(n, -m.ea_coeff);
        for (int64_t k = m.row_ptr[x]; k < m.row_ptr[x + 1]; ++k) row[m.col[k]] += m.val[k];
        row[x] = 0;
        Eigen::VectorXcd rc = row.cast<cplx>();
        Eigen::VectorXcd grow;
        if (m.ea_coeff == 0) {
            grow = Eigen::VectorXcd::Zero(n);
            for (int64_t k = m.row_ptr[x]; k < m.row_ptr[x + 1]; ++k)
                if (m.col[k] != x) grow += G.col(m.col[k]) * m.val[k];
        } else {
            grow = G * rc;
        }
        // G symmetric, so G_{x.} rc = (G rc)_x.
        cplx quad = (rc.array() * grow.array()).sum() - grow[x] * grow[x] / G(x, x);
        cplx schur = m.entry(x, x) - z - quad;
        res.max_schur_gap = std::max(res.max_schur_gap, std::abs(1.0 / G(x, x) - schur));
        res.y_schur[x] = schur + z + field;
        res.max_y = std::max(res.max_y, std::abs(res.y[x]));
    }
    cplx mean = 0;
    for (int y : typical) mean += G(y, y);
    if (!typical.empty()) mean /= static_cast<double>(typical.size());
    cplx msc = m_semicircle(z);
    res.epsilon.resize(static_cast<Eigen::Index>(typical.size()));
    for (size_t i = 0; i < typical.size(); ++i) {
        int x = typical[i];
        res.epsilon[i] = 1.0 / G(x, x) + z + mean;
        res.max_epsilon = std::max(res.max_epsilon, std::abs(res.epsilon[i]));
        res.max_typical_err = std::max(res.max_typical_err, std::abs(G(x, x) - msc));
    }
    res.stability_constant = res.max_epsilon > 0 ? res.max_typical_err / res.max_epsilon : 0.0;
    return res;
}

InstabilityRecord instability_probe(int d, int r, cplx phase) {
    if (r < 2) throw ParameterError("instability probe needs r >= 2");
    if (d < 2) throw ParameterError("instability probe needs d >= 2");
    if (std::abs(std::abs(phase) - 1.0) > 1e-12) throw ParameterError("phase must lie on the unit circle");
    InstabilityRecord rec;
    rec.d = d;
    rec.r = r;
    rec.phase = phase;
    double dd = d;
    std::vector<cplx> a(static_cast<size_t>(r) + 1);
    a[0] = 1.0;
    a[1] = phase;
    for (int k = 1; k < r; ++k) a[k + 1] = dd / (dd - 1.0) * phase * a[k] - a[k - 1] / (dd - 1.0);
    for (int k = 1; k <= r; ++k) rec.c1 = std::max(rec.c1, dd * std::log(std::abs(a[k])) / k);
    double c2 = std::max(2.0, 2.0 * rec.c1);
    rec.mu = c2 * std::log(static_cast<double>(r)) / r;
    rec.radial_u.resize(a.size());
    for (int k = 0; k <= r; ++k) rec.radial_u[k] = std::exp(-rec.mu * k) * a[k];
    const auto& u = rec.radial_u;
    // Root: d children; interior: parent plus d-1 children; leaves: parent plus d-1 leaf neighbours.
    rec.radial_residual.resize(a.size());
    rec.radial_residual[0] = phase * u[0] - u[1];
    for (int k = 1; k < r; ++k) rec.radial_residual[k] = phase * u[k] - (u[k - 1] + (dd - 1.0) * u[k + 1]) / dd;
    rec.radial_residual[r] = phase * u[r] - (u[r - 1] + (dd - 1.0) * u[r]) / dd;
    for (int k = 0; k <= r; ++k) {
        rec.u_inf = std::max(rec.u_inf, std::abs(u[k]));
        rec.residual_inf = std::max(rec.residual_inf, std::abs(rec.radial_residual[k]));
    }
    rec.lower_bound = rec.u_inf / rec.residual_inf;
    return rec;
}

void write_local_law_csv(std::ostream& os, const std::vector<LocalLawRow>& rows) {
    os << "re_z,im_z,max_diag_err,avg_err,rate_ref,d,N,seed\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d,%llu\n", r.z.real(), r.z.imag(),
                      r.report.max_diag_err, r.report.avg_err, r.report.rate_ref, r.d, r.n,
                      static_cast<unsigned long long>(r.seed));
        os << buf;
    }
}

}  // namespace erspec
