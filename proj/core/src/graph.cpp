#include "erspec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "erspec/errors.hpp"
#include "erspec/spectra.hpp"

namespace erspec {

Graph::Graph(int n) : n_(n), row_ptr_(static_cast<size_t>(n) + 1, 0) {}

Graph Graph::from_edges(int n, const std::vector<Edge>& edges) {
    Graph g(n);
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n || u == v) throw ParameterError("edge out of range or self loop");
        ++g.row_ptr_[u + 1];
        ++g.row_ptr_[v + 1];
    }
    std::partial_sum(g.row_ptr_.begin(), g.row_ptr_.end(), g.row_ptr_.begin());
    g.col_.resize(g.row_ptr_.back());
    std::vector<int64_t> fill(g.row_ptr_.begin(), g.row_ptr_.end() - 1);
    for (auto [u, v] : edges) {
        g.col_[fill[u]++] = v;
        g.col_[fill[v]++] = u;
    }
    for (int x = 0; x < n; ++x) {
        auto b = g.col_.begin() + g.row_ptr_[x];
        auto e = g.col_.begin() + g.row_ptr_[x + 1];
        std::sort(b, e);
        if (std::adjacent_find(b, e) != e) throw ParameterError("duplicate edge");
    }
    return g;
}

bool Graph::has_edge(int u, int v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(col_.size() / 2);
    for (int u = 0; u < n_; ++u)
        for (int v : neighbors(u))
            if (u < v) out.emplace_back(u, v);
    return out;
}

Graph Graph::without_edges(const std::vector<Edge>& removed) const {
    std::vector<Edge> sorted;
    sorted.reserve(removed.size());
    for (auto [u, v] : removed) sorted.emplace_back(std::min(u, v), std::max(u, v));
    std::sort(sorted.begin(), sorted.end());
    std::vector<Edge> kept;
    for (const Edge& e : edges())
        if (!std::binary_search(sorted.begin(), sorted.end(), e)) kept.push_back(e);
    return from_edges(n_, kept);
}

Graph Graph::induced(const std::vector<int>& vertices) const {
    std::vector<int> local(n_, -1);
    for (size_t i = 0; i < vertices.size(); ++i) local[vertices[i]] = static_cast<int>(i);
    std::vector<Edge> sub;
    for (size_t i = 0; i < vertices.size(); ++i)
        for (int w : neighbors(vertices[i]))
            if (local[w] > static_cast<int>(i)) sub.emplace_back(static_cast<int>(i), local[w]);
    return from_edges(static_cast<int>(vertices.size()), sub);
}

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream per (seed, row): draws for row u never depend on other rows.
std::mt19937_64 row_stream(uint64_t seed, uint64_t row, uint64_t salt) {
    return std::mt19937_64(splitmix64(splitmix64(seed ^ salt) + row));
}

double unit(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

constexpr uint64_t kEdgeSalt = 0x45524544474553ULL;
constexpr uint64_t kSignSalt = 0x5349474e53ULL;

void sample_rows(int n, double p, uint64_t seed, int lo, int hi, std::vector<Edge>& out) {
    if (p <= 0) return;
    double log_q = std::log1p(-p);
    for (int u = lo; u < hi; ++u) {
        if (p >= 1) {
            for (int v = u + 1; v < n; ++v) out.emplace_back(u, v);
            continue;
        }
        auto eng = row_stream(seed, static_cast<uint64_t>(u), kEdgeSalt);
        // Geometric gaps between successes of Bernoulli(p) trials over v = u+1..n-1.
        int64_t v = u;
        while (true) {
            double r = unit(eng);
            double skip = std::floor(std::log1p(-r) / log_q);
            if (skip >= static_cast<double>(n)) break;
            v += static_cast<int64_t>(skip) + 1;
            if (v >= n) break;
            out.emplace_back(u, static_cast<int>(v));
        }
    }
}

}  // namespace

GraphSample generate_er(int n, double d, uint64_t seed, int threads) {
    if (n < 0) throw ParameterError("n must be nonnegative");
    if (!(d >= 0) || d > n) throw ParameterError("need 0 <= d <= n");
    double p = n > 0 ? d / n : 0.0;
    threads = std::max(1, std::min(threads, std::max(1, n / 1024)));
    std::vector<std::vector<Edge>> parts(threads);
    if (threads == 1) {
        sample_rows(n, p, seed, 0, n, parts[0]);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            int lo = static_cast<int>(static_cast<int64_t>(n) * t / threads);
            int hi = static_cast<int>(static_cast<int64_t>(n) * (t + 1) / threads);
            pool.emplace_back(sample_rows, n, p, seed, lo, hi, std::ref(parts[t]));
        }
        for (auto& th : pool) th.join();
    }
    std::vector<Edge> edges;
    for (auto& part : parts) edges.insert(edges.end(), part.begin(), part.end());
    GraphSample g;
    g.graph = Graph::from_edges(n, edges);
    g.d = d;
    g.seed = seed;
    g.edge_count = g.graph.edge_count();
    return g;
}

GraphSample sample_from_edges(int n, double d, const std::vector<Edge>& edges, uint64_t seed) {
    if (!(d > 0)) throw ParameterError("d must be positive");
    GraphSample g;
    g.graph = Graph::from_edges(n, edges);
    g.d = d;
    g.seed = seed;
    g.edge_count = g.graph.edge_count();
    return g;
}

DegreeProfile normalized_degrees(const GraphSample& g) {
    DegreeProfile p;
    p.d = g.d;
    p.degree.resize(g.n());
    p.alpha.resize(g.n());
    for (int x = 0; x < g.n(); ++x) {
        p.degree[x] = g.graph.degree(x);
        p.alpha[x] = g.d > 0 ? p.degree[x] / g.d : 0.0;
    }
    return p;
}

MatrixKind parse_matrix_kind(const std::string& name) {
    if (name == "adjacency_over_sqrt_d") return MatrixKind::adjacency_over_sqrt_d;
    if (name == "centered_H") return MatrixKind::centered_H;
    if (name == "sparse_wigner") return MatrixKind::sparse_wigner;
    throw ParameterError("unknown matrix kind '" + name + "'");
}

std::string to_string(MatrixKind kind) {
    switch (kind) {
        case MatrixKind::adjacency_over_sqrt_d: return "adjacency_over_sqrt_d";
        case MatrixKind::centered_H: return "centered_H";
        case MatrixKind::sparse_wigner: return "sparse_wigner";
    }
    return "?";
}

ScaledMatrix adjacency_over_sqrt_d(const Graph& g, double d) {
    if (!(d > 0)) throw ParameterError("d must be positive");
    ScaledMatrix m;
    m.n = g.n();
    m.d = d;
    m.row_ptr = g.row_ptr();
    m.col = g.col();
    m.val.assign(m.col.size(), 1.0 / std::sqrt(d));
    return m;
}

ScaledMatrix build_scaled_matrix(const GraphSample& g, MatrixKind kind, uint64_t wigner_seed) {
    ScaledMatrix m = adjacency_over_sqrt_d(g.graph, g.d);
    m.kind = kind;
    if (kind == MatrixKind::centered_H) {
        m.f = std::sqrt(g.d);
        m.ea_coeff = g.n() > 0 ? std::sqrt(g.d) / g.n() : 0.0;
    } else if (kind == MatrixKind::sparse_wigner) {
        int n = g.n();
        for (int u = 0; u < n; ++u) {
            auto eng = row_stream(wigner_seed, static_cast<uint64_t>(u), kSignSalt);
            for (int64_t k = m.row_ptr[u]; k < m.row_ptr[u + 1]; ++k) {
                int v = m.col[k];
                if (v < u) continue;
                double s = (eng() >> 63) ? -1.0 : 1.0;
                m.val[k] *= s;
                auto nb = g.graph.neighbors(v);
                int64_t kv = m.row_ptr[v] + (std::lower_bound(nb.begin(), nb.end(), u) - nb.begin());
                m.val[kv] *= s;
            }
        }
    }
    return m;
}

void ScaledMatrix::apply(const double* x, double* y) const {
    double total = 0;
    if (ea_coeff != 0)
        for (int i = 0; i < n; ++i) total += x[i];
    for (int i = 0; i < n; ++i) {
        double acc = 0;
        for (int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += val[k] * x[col[k]];
        if (ea_coeff != 0) acc -= ea_coeff * (total - x[i]);
        y[i] = acc;
    }
}

Eigen::VectorXd ScaledMatrix::apply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(n);
    apply(x.data(), y.data());
    return y;
}

Eigen::MatrixXd ScaledMatrix::dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, -ea_coeff);
    m.diagonal().setZero();
    for (int i = 0; i < n; ++i)
        for (int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) m(i, col[k]) += val[k];
    return m;
}

double ScaledMatrix::entry(int x, int y) const {
    double v = (x == y) ? 0.0 : -ea_coeff;
    auto b = col.begin() + row_ptr[x];
    auto e = col.begin() + row_ptr[x + 1];
    auto it = std::lower_bound(b, e, y);
    if (it != e && *it == y) v += val[it - col.begin()];
    return v;
}

std::vector<std::vector<int>> ball_and_spheres(const Graph& g, int x, int r) {
    if (x < 0 || x >= g.n() || r < 0) throw ParameterError("ball_and_spheres: bad vertex or radius");
    std::vector<std::vector<int>> spheres(static_cast<size_t>(r) + 1);
    std::vector<char> seen(g.n(), 0);
    spheres[0] = {x};
    seen[x] = 1;
    for (int i = 1; i <= r; ++i) {
        for (int u : spheres[i - 1])
            for (int w : g.neighbors(u))
                if (!seen[w]) {
                    seen[w] = 1;
                    spheres[i].push_back(w);
                }
        std::sort(spheres[i].begin(), spheres[i].end());
    }
    return spheres;
}

ComponentCensus components_census(const Graph& g) {
    int n = g.n();
    std::vector<int> label(n, -1);
    std::vector<std::vector<int>> comps;
    for (int s = 0; s < n; ++s) {
        if (label[s] >= 0) continue;
        std::vector<int> comp{s};
        label[s] = static_cast<int>(comps.size());
        for (size_t h = 0; h < comp.size(); ++h)
            for (int w : g.neighbors(comp[h]))
                if (label[w] < 0) {
                    label[w] = label[s];
                    comp.push_back(w);
                }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    std::stable_sort(comps.begin(), comps.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    ComponentCensus c;
    c.component_of.assign(n, -1);
    for (size_t i = 0; i < comps.size(); ++i) {
        long deg_sum = 0;
        for (int v : comps[i]) {
            c.component_of[v] = static_cast<int>(i);
            deg_sum += g.degree(v);
        }
        c.is_tree.push_back(deg_sum / 2 == static_cast<long>(comps[i].size()) - 1);
    }
    c.components = std::move(comps);
    return c;
}

double small_component_norm(const GraphSample& g, const ComponentCensus& census) {
    double best = 0;
    for (size_t i = 0; i < census.components.size(); ++i) {
        if (static_cast<int>(i) == census.giant_index) continue;
        const auto& comp = census.components[i];
        if (comp.size() < 2) continue;
        Graph sub = g.graph.induced(comp);
        double norm;
        if (sub.n() <= 4096) {
            Eigen::MatrixXd a = Eigen::MatrixXd::Zero(sub.n(), sub.n());
            for (auto [u, v] : sub.edges()) a(u, v) = a(v, u) = 1.0;
            norm = spectral_norm(a);
        } else {
            norm = operator_norm(as_operator(sub));
        }
        best = std::max(best, norm / std::sqrt(g.d));
    }
    return best;
}

namespace {
std::string fmt_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}
}  // namespace

void write_edge_list(std::ostream& os, const std::vector<Edge>& edges, const std::string& header) {
    os << header << '\n';
    for (auto [u, v] : edges) os << u << ' ' << v << '\n';
}

void write_edge_list(std::ostream& os, const GraphSample& g) {
    write_edge_list(os, g.graph.edges(),
                    "# n=" + std::to_string(g.n()) + " d=" + fmt_real(g.d) + " seed=" + std::to_string(g.seed));
}

GraphSample read_edge_list(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParameterError("edge list: missing header");
    int n = -1;
    double d = 0;
    unsigned long long seed = 0;
    if (std::sscanf(line.c_str(), "# n=%d d=%lf seed=%llu", &n, &d, &seed) != 3 || n < 0)
        throw ParameterError("edge list: malformed header '" + line + "'");
    std::vector<Edge> edges;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int u, v;
        if (!(ls >> u >> v)) throw ParameterError("edge list: malformed line '" + line + "'");
        edges.emplace_back(u, v);
    }
    GraphSample g;
    g.graph = Graph::from_edges(n, edges);
    g.d = d;
    g.seed = seed;
    g.edge_count = g.graph.edge_count();
    return g;
}

}  // namespace erspec
