#include "erspec/profiles.hpp"

#include <algorithm>
#include <cmath>

#include "erspec/errors.hpp"
#include "erspec/exponents.hpp"

namespace erspec {

std::vector<double> profile_weights(double alpha, int r_star) {
    if (!(alpha > 1)) throw DomainError("profile weights need alpha > 1");
    if (r_star < 1) throw ParameterError("profile weights need r_star >= 1");
    std::vector<double> u(static_cast<size_t>(r_star) + 1);
    u[0] = 1.0;
    for (int i = 1; i < r_star; ++i) u[i] = std::sqrt(alpha) * std::pow(alpha - 1.0, -0.5 * i);
    u[r_star] = std::pow(alpha - 1.0, -0.5 * (r_star - 1));
    double norm2 = 0;
    for (double w : u) norm2 += w * w;
    double u0 = 1.0 / std::sqrt(norm2);
    for (double& w : u) w *= u0;
    return u;
}

std::vector<std::pair<int, double>> LocalizationProfile::entries() const {
    std::vector<std::pair<int, double>> out;
    for (size_t i = 0; i < support.size(); ++i) {
        double sign = (sigma < 0 && i % 2 == 1) ? -1.0 : 1.0;
        double value = sign * weights[i] / std::sqrt(static_cast<double>(support[i].size()));
        for (int v : support[i]) out.emplace_back(v, value);
    }
    return out;
}

Eigen::VectorXd LocalizationProfile::dense(int n) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (auto [i, x] : entries()) v[i] = x;
    return v;
}

double LocalizationProfile::dot(const Eigen::VectorXd& w) const {
    double s = 0;
    for (auto [i, x] : entries()) s += x * w[i];
    return s;
}

std::vector<double> LocalizationProfile::tail_masses(const Graph& base) const {
    int r_max = static_cast<int>(support.size()) - 1;
    auto spheres = ball_and_spheres(base, x, r_max);
    std::vector<int> dist(base.n(), -1);
    for (int i = 0; i <= r_max; ++i)
        for (int v : spheres[i]) dist[v] = i;
    std::vector<double> tail(static_cast<size_t>(r_max) + 1, 0.0);
    for (auto [v, val] : entries())
        for (int r = 0; r <= r_max; ++r)
            if (dist[v] < 0 || dist[v] > r) tail[r] += val * val;
    return tail;
}

LocalizationProfile build_profile(const PrunedGraph& p, int x, int sigma) {
    if (sigma != 1 && sigma != -1) throw ParameterError("sigma must be +1 or -1");
    LocalizationProfile prof;
    prof.x = x;
    prof.sigma = sigma;
    prof.alpha = p.base.graph.degree(x) / p.base.d;
    prof.weights = profile_weights(prof.alpha, p.r_star);
    prof.support = ball_and_spheres(p.kept, x, p.r_star);
    for (int i = 1; i <= p.r_star; ++i)
        if (prof.support[i].empty()) throw DegenerateSupport(x, i);
    return prof;
}

PrunedOperators build_pruned_operators(const GraphSample& g, const PrunedGraph& p, double xi) {
    PrunedOperators ops;
    ops.n = g.n();
    ops.d = g.d;
    ops.tau = p.tau;
    ops.r_star = p.r_star;
    ops.seed = g.seed;
    ops.h = build_scaled_matrix(g, MatrixKind::centered_H);
    ops.a_tau = adjacency_over_sqrt_d(p.kept, g.d);
    ops.chi.assign(ops.n, 1);
    for (int x : p.v_tau) {
        auto spheres = ball_and_spheres(p.kept, x, 2 * p.r_star);
        for (const auto& s : spheres)
            for (int v : s) ops.chi[v] = 0;
    }
    double threshold = 2.0 + std::pow(xi, 0.25);
    std::vector<char> in_tau(ops.n, 0);
    for (int x : p.v_tau) in_tau[x] = 1;
    for (int x = 0; x < ops.n; ++x) {
        if (g.graph.degree(x) / g.d < threshold || !in_tau[x]) continue;
        try {
            auto plus = build_profile(p, x, 1);
            auto minus = build_profile(p, x, -1);
            ops.centers.push_back(x);
            ops.profiles.push_back(std::move(plus));
            ops.profiles.push_back(std::move(minus));
        } catch (const DegenerateSupport&) {
            ops.degenerate.push_back(x);
        }
    }
    return ops;
}

void PrunedOperators::apply_h(const double* v, double* out) const { h.apply(v, out); }

void PrunedOperators::apply_h_tau(const double* v, double* out) const {
    a_tau.apply(v, out);
    double c = std::sqrt(d) / n;
    double total = 0;
    for (int i = 0; i < n; ++i)
        if (chi[i]) total += v[i];
    for (int i = 0; i < n; ++i)
        if (chi[i]) out[i] -= c * (total - v[i]);
}

void PrunedOperators::apply_pi(const double* v, double* out) const {
    std::fill(out, out + n, 0.0);
    for (const auto& prof : profiles) {
        auto e = prof.entries();
        double s = 0;
        for (auto [i, x] : e) s += x * v[i];
        for (auto [i, x] : e) out[i] += s * x;
    }
}

void PrunedOperators::apply_h_hat(const double* v, double* out) const {
    Eigen::Map<const Eigen::VectorXd> vin(v, n);
    Eigen::VectorXd pv(n), q(n), hq(n), phq(n);
    apply_pi(v, pv.data());
    q = vin - pv;
    apply_h_tau(q.data(), hq.data());
    apply_pi(hq.data(), phq.data());
    Eigen::Map<Eigen::VectorXd> res(out, n);
    res = hq - phq;
    for (const auto& prof : profiles) {
        auto e = prof.entries();
        double s = 0;
        for (auto [i, x] : e) s += x * v[i];
        double lam = prof.sigma * lambda_of_alpha(prof.alpha);
        for (auto [i, x] : e) out[i] += lam * s * x;
    }
}

void PrunedOperators::apply_ea_cut(const double* v, double* out) const {
    double c = d / n;
    double all = 0, kept = 0;
    for (int i = 0; i < n; ++i) {
        all += v[i];
        if (chi[i]) kept += v[i];
    }
    for (int i = 0; i < n; ++i) {
        double full = c * (all - v[i]);
        double inner = chi[i] ? c * (kept - v[i]) : 0.0;
        out[i] = full - inner;
    }
}

LinearOperator PrunedOperators::op(void (PrunedOperators::*f)(const double*, double*) const) const {
    return {n, [this, f](const double* v, double* out) { (this->*f)(v, out); }};
}

double profile_residual(const PrunedOperators& ops, const LocalizationProfile& prof) {
    Eigen::VectorXd v = prof.dense(ops.n);
    Eigen::VectorXd hv(ops.n);
    ops.apply_h_tau(v.data(), hv.data());
    return (hv - prof.sigma * lambda_of_alpha(prof.alpha) * v).norm();
}

namespace {
LinearOperator difference(const LinearOperator& a, const LinearOperator& b) {
    return {a.n, [a, b](const double* v, double* out) {
                std::vector<double> tmp(a.n);
                a.apply(v, out);
                b.apply(v, tmp.data());
                for (int i = 0; i < a.n; ++i) out[i] -= tmp[i];
            }};
}
}  // namespace

ApproximationReport approximation_report(const PrunedOperators& ops) {
    ApproximationReport rep;
    rep.tau = ops.tau;
    rep.r_star = ops.r_star;
    rep.seed = ops.seed;
    auto h = ops.op(&PrunedOperators::apply_h);
    auto ht = ops.op(&PrunedOperators::apply_h_tau);
    auto hh = ops.op(&PrunedOperators::apply_h_hat);
    rep.norm_h_htau = operator_norm(difference(h, ht));
    rep.norm_htau_hhat = operator_norm(difference(ht, hh));
    LinearOperator block{ops.n, [&ops](const double* v, double* out) {
                             int n = ops.n;
                             std::vector<double> pv(n), q(n), hq(n), phq(n);
                             ops.apply_pi(v, pv.data());
                             for (int i = 0; i < n; ++i) q[i] = v[i] - pv[i];
                             ops.apply_h_tau(q.data(), hq.data());
                             ops.apply_pi(hq.data(), phq.data());
                             for (int i = 0; i < n; ++i) out[i] = hq[i] - phq[i];
                         }};
    rep.norm_complement_block = operator_norm(block);
    rep.norm_ea_cut = operator_norm(ops.op(&PrunedOperators::apply_ea_cut));
    return rep;
}

double ihara_bass_check(const ScaledMatrix& h, const DegreeProfile& profile, double c) {
    int n = h.n;
    auto e = eig_sym(h.dense(), true);
    Eigen::VectorXd absvals(n);
    for (int i = 0; i < n; ++i) absvals[i] = std::abs(e.values[i]);
    Eigen::MatrixXd b = -(e.vectors * absvals.asDiagonal() * e.vectors.transpose());
    double dd = profile.d;
    double shift = 1.0 + c * std::max(std::log(static_cast<double>(n)) / (dd * dd), 1.0 / std::sqrt(dd));
    for (int i = 0; i < n; ++i) b(i, i) += shift + (1.0 + 2.0 / std::sqrt(dd)) * profile.alpha[i];
    b = 0.5 * (b + b.transpose());
    return eigenvalues_sym(b).back();
}

}  // namespace erspec
