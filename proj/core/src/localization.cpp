#include "erspec/localization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "erspec/errors.hpp"
#include "erspec/exponents.hpp"

namespace erspec {

double gamma_exponent(const Eigen::VectorXd& w, int n) {
    double norm = w.norm();
    if (norm == 0) throw DomainError("gamma of the zero vector");
    if (std::abs(norm - 1.0) > 1e-8) throw DomainError("gamma needs a unit vector");
    double inf = w.cwiseAbs().maxCoeff();
    return -std::log(inf * inf) / std::log(static_cast<double>(n));
}

ResonantSet resonant_set(const DegreeProfile& profile, double lambda, double delta) {
    if (!(lambda > 2)) throw ParameterError("resonant set needs lambda > 2");
    if (!(delta > 0) || delta > lambda - 2) throw ParameterError("resonant set needs 0 < delta <= lambda - 2");
    ResonantSet set;
    set.lambda = lambda;
    set.delta = delta;
    for (size_t x = 0; x < profile.alpha.size(); ++x) {
        double a = profile.alpha[x];
        if (a >= 2 && std::abs(lambda_of_alpha(a) - lambda) <= delta) set.vertices.push_back(static_cast<int>(x));
    }
    return set;
}

double default_delta(double lambda) {
    double gap = lambda - 2;
    return std::min(gap, std::max(0.05, gap / 2));
}

double predicted_center_mass(double lambda) {
    double l = std::abs(lambda);
    if (l < 2) return 0;
    double s = std::sqrt(l * l - 4.0);
    return s / (l + s);
}

LocalizationReport overlap_report(const Eigen::VectorXd& w, double lambda, const ResonantSet& resonant,
                                  const std::vector<LocalizationProfile>& profiles) {
    LocalizationReport rep;
    rep.eigenvalue = lambda;
    rep.l2 = w.norm();
    rep.l4 = std::pow(w.array().pow(4).sum(), 0.25);
    rep.linf = w.cwiseAbs().maxCoeff();
    rep.gamma = gamma_exponent(w, static_cast<int>(w.size()));
    int sigma = lambda >= 0 ? 1 : -1;
    std::map<int, const LocalizationProfile*> by_center;
    for (const auto& p : profiles)
        if (p.sigma == sigma) by_center[p.x] = &p;
    for (int x : resonant.vertices) {
        rep.center_mass += w[x] * w[x];
        auto it = by_center.find(x);
        if (it != by_center.end()) {
            double s = it->second->dot(w);
            rep.overlap += s * s;
        }
    }
    rep.predicted_center_mass = predicted_center_mass(lambda);
    return rep;
}

RigidityReport rigidity_pairing(const EigenDecomposition& eigs, const DegreeProfile& profile, double xi) {
    RigidityReport rep;
    double threshold = 2.0 + std::sqrt(xi);
    int n = eigs.n;
    for (size_t x = 0; x < profile.alpha.size(); ++x) {
        double a = profile.alpha[x];
        if (a >= 2 && lambda_of_alpha(a) >= threshold) rep.u_set.push_back(static_cast<int>(x));
    }
    std::stable_sort(rep.u_set.begin(), rep.u_set.end(),
                     [&](int a, int b) { return profile.alpha[a] > profile.alpha[b]; });
    std::map<int, double> by_rank;
    for (size_t i = 0; i < eigs.values.size(); ++i) by_rank[eigs.rank[i]] = eigs.values[i];
    auto value_at = [&](int rank) {
        auto it = by_rank.find(rank);
        if (it == by_rank.end()) throw ParameterError("rigidity: eigenvalue of rank " + std::to_string(rank) + " missing");
        return it->second;
    };
    int u = static_cast<int>(rep.u_set.size());
    for (int i = 1; i <= u; ++i) {
        int x = rep.u_set[i - 1];
        double pred = lambda_of_alpha(profile.alpha[x]);
        double top = value_at(i + 1);
        double bottom = value_at(n - i + 1);
        rep.pairs.push_back({i + 1, top, pred, std::abs(top - pred), x});
        rep.pairs.push_back({n - i + 1, bottom, -pred, std::abs(bottom + pred), x});
    }
    if (u + 2 <= n - u) rep.bulk_max = std::max(std::abs(value_at(u + 2)), std::abs(value_at(n - u)));
    for (size_t i = 0; i < eigs.values.size(); ++i)
        if (eigs.rank[i] >= 2 && eigs.values[i] > threshold) ++rep.count_above;
    return rep;
}

std::vector<ScatterRow> scatter_rows(const EigenDecomposition& eigs) {
    if (eigs.vectors.cols() != static_cast<Eigen::Index>(eigs.values.size()))
        throw ParameterError("scatter rows need eigenvectors");
    std::vector<ScatterRow> rows;
    for (size_t i = 0; i < eigs.values.size(); ++i)
        rows.push_back({eigs.values[i], eigs.vectors.col(i).cwiseAbs().maxCoeff()});
    return rows;
}

void write_scatter_csv(std::ostream& os, const std::vector<ScatterRow>& rows) {
    os << "eigenvalue,inf_norm\n";
    char buf[80];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", r.eigenvalue, r.inf_norm);
        os << buf;
    }
}

void write_rigidity_csv(std::ostream& os, const RigidityReport& rep) {
    os << "rank,eigenvalue,predicted,abs_gap\n";
    char buf[128];
    for (const auto& p : rep.pairs) {
        std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g\n", p.rank, p.eigenvalue, p.predicted, p.gap);
        os << buf;
    }
}

void write_localization_csv(std::ostream& os, const std::vector<LocalizationReport>& rows) {
    os << "eigenvalue,gamma,overlap,center_mass,predicted_center_mass\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n", r.eigenvalue, r.gamma, r.overlap,
                      r.center_mass, r.predicted_center_mass);
        os << buf;
    }
}

}  // namespace erspec
