#include "erspec/forks.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "erspec/errors.hpp"

namespace erspec {

bool operator==(const TuningFork& a, const TuningFork& b) {
    return a.base == b.base && a.hubs == b.hubs && a.spokes == b.spokes && a.degree == b.degree;
}

namespace {

// Hub candidate: exactly one non-leaf neighbor (the base), the rest leaves.
bool hub_shape(const Graph& g, int h, int& base, std::vector<int>& spokes) {
    base = -1;
    spokes.clear();
    for (int w : g.neighbors(h)) {
        if (g.degree(w) == 1) {
            spokes.push_back(w);
        } else {
            if (base >= 0) return false;
            base = w;
        }
    }
    return base >= 0;
}

bool in_giant(const ComponentCensus& c, int v) { return c.component_of[v] == c.giant_index; }

}  // namespace

std::vector<TuningFork> find_forks(const GraphSample& g, const ComponentCensus& census) {
    const Graph& gr = g.graph;
    // base -> D -> hubs
    std::map<int, std::map<int, std::vector<int>>> groups;
    std::vector<int> spokes;
    for (int h = 0; h < gr.n(); ++h) {
        int base;
        if (gr.degree(h) < 1 || !hub_shape(gr, h, base, spokes)) continue;
        if (!in_giant(census, base)) continue;
        groups[base][static_cast<int>(spokes.size())].push_back(h);
    }
    std::vector<TuningFork> out;
    for (const auto& [base, by_d] : groups)
        for (const auto& [D, hubs] : by_d)
            for (size_t i = 0; i < hubs.size(); ++i)
                for (size_t j = i + 1; j < hubs.size(); ++j) {
                    TuningFork f;
                    f.base = base;
                    f.degree = D;
                    f.hubs = {hubs[i], hubs[j]};
                    int b;
                    for (int k = 0; k < 2; ++k) hub_shape(gr, f.hubs[k], b, f.spokes[k]);
                    out.push_back(std::move(f));
                }
    std::sort(out.begin(), out.end(),
              [](const TuningFork& a, const TuningFork& b) { return std::tie(a.base, a.hubs) < std::tie(b.base, b.hubs); });
    return out;
}

bool validate_fork(const TuningFork& f, const Graph& g) {
    int D = f.degree;
    std::vector<int> all{f.base, f.hubs[0], f.hubs[1]};
    for (int k = 0; k < 2; ++k) {
        int h = f.hubs[k];
        if (static_cast<int>(f.spokes[k].size()) != D) return false;
        if (!g.has_edge(h, f.base) || g.degree(h) != D + 1) return false;
        for (int s : f.spokes[k]) {
            if (!g.has_edge(h, s) || g.degree(s) != 1) return false;
            all.push_back(s);
        }
    }
    std::sort(all.begin(), all.end());
    return std::adjacent_find(all.begin(), all.end()) == all.end() && static_cast<int>(all.size()) == 2 * D + 3;
}

std::vector<TuningFork> find_forks_bruteforce(const GraphSample& g, const ComponentCensus& census) {
    const Graph& gr = g.graph;
    std::vector<TuningFork> out;
    for (int base = 0; base < gr.n(); ++base) {
        if (!in_giant(census, base) || gr.degree(base) < 2) continue;
        auto nb = gr.neighbors(base);
        for (size_t i = 0; i < nb.size(); ++i)
            for (size_t j = i + 1; j < nb.size(); ++j) {
                int h1 = nb[i], h2 = nb[j];
                if (gr.degree(h1) != gr.degree(h2)) continue;
                TuningFork f;
                f.base = base;
                f.hubs = {h1, h2};
                f.degree = gr.degree(h1) - 1;
                for (int k = 0; k < 2; ++k)
                    for (int w : gr.neighbors(f.hubs[k]))
                        if (w != base) f.spokes[k].push_back(w);
                if (validate_fork(f, gr)) out.push_back(std::move(f));
            }
    }
    return out;
}

std::array<ForkEigenpair, 2> fork_eigenpairs(const TuningFork& f, const GraphSample& g) {
    if (!validate_fork(f, g.graph)) throw ContractError("fork does not match the graph");
    int D = f.degree;
    std::array<ForkEigenpair, 2> out;
    double root = std::sqrt(static_cast<double>(D));
    for (int s = 0; s < 2; ++s) {
        double sign = s == 0 ? 1.0 : -1.0;
        Eigen::VectorXd w = Eigen::VectorXd::Zero(g.n());
        if (D == 0) {
            w[f.hubs[0]] = 1.0;
            w[f.hubs[1]] = -1.0;
        } else {
            w[f.hubs[0]] = sign * root;
            w[f.hubs[1]] = -sign * root;
            for (int v : f.spokes[0]) w[v] = 1.0;
            for (int v : f.spokes[1]) w[v] = -1.0;
        }
        out[s].eigenvalue = sign * root / std::sqrt(g.d);
        out[s].vector = w.normalized();
    }
    return out;
}

double fork_residual(const ForkEigenpair& pair, const GraphSample& g) {
    auto m = adjacency_over_sqrt_d(g.graph, g.d);
    return (m.apply(pair.vector) - pair.eigenvalue * pair.vector).norm();
}

double log_expected_fork_count(double n, double d, int D) {
    if (D < 0) throw ParameterError("fork degree must be nonnegative");
    return std::log(n) + 2.0 * std::log(d) - 2.0 * d - std::log(2.0) - 2.0 * std::lgamma(D + 1.0) +
           2.0 * D * (std::log(d) - d + 1.0);
}

double expected_fork_count(double n, double d, int D) { return std::exp(log_expected_fork_count(n, d, D)); }

double expected_fork_count_exact(double n, double d, int D) {
    if (D < 0) throw ParameterError("fork degree must be nonnegative");
    double p = d / n;
    // Ordered choice of base, hub pair and spoke sets, halved for the unordered hubs.
    double lg = 0;
    for (int k = 0; k < 2 * D + 3; ++k) lg += std::log(n - k);
    lg -= std::log(2.0) + 2.0 * std::lgamma(D + 1.0);
    lg += (2.0 * D + 2.0) * std::log(p);
    // Every other pair touching a hub or spoke must be absent. Inside the fork plus base
    // there are k(k-1)/2 + k pairs of which k are edges.
    double k = 2.0 * D + 2.0;
    double absent = k * (k - 1.0) / 2.0 + k * (n - k - 1.0);
    lg += absent * std::log1p(-p);
    return std::exp(lg);
}

}  // namespace erspec
