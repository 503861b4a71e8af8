#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace erspec {

using Edge = std::pair<int, int>;

// Undirected simple graph in compressed row form, neighbor lists ascending.
class Graph {
public:
    Graph() = default;
    explicit Graph(int n);
    static Graph from_edges(int n, const std::vector<Edge>& edges);

    int n() const { return n_; }
    int degree(int x) const { return static_cast<int>(row_ptr_[x + 1] - row_ptr_[x]); }
    std::span<const int> neighbors(int x) const {
        return {col_.data() + row_ptr_[x], static_cast<size_t>(degree(x))};
    }
    bool has_edge(int u, int v) const;
    long edge_count() const { return static_cast<long>(col_.size() / 2); }
    // Edges with u < v in ascending order.
    std::vector<Edge> edges() const;
    Graph without_edges(const std::vector<Edge>& removed) const;
    Graph induced(const std::vector<int>& vertices) const;

    const std::vector<int64_t>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col() const { return col_; }

private:
    int n_ = 0;
    std::vector<int64_t> row_ptr_{0};
    std::vector<int> col_;
};

struct GraphSample {
    Graph graph;
    double d = 0;
    uint64_t seed = 0;
    long edge_count = 0;
    int n() const { return graph.n(); }
};

GraphSample generate_er(int n, double d, uint64_t seed, int threads = 1);
GraphSample sample_from_edges(int n, double d, const std::vector<Edge>& edges, uint64_t seed = 0);

struct DegreeProfile {
    double d = 0;
    std::vector<int> degree;
    std::vector<double> alpha;
};

DegreeProfile normalized_degrees(const GraphSample& g);

enum class MatrixKind { adjacency_over_sqrt_d, centered_H, sparse_wigner };
MatrixKind parse_matrix_kind(const std::string& name);
std::string to_string(MatrixKind kind);

// Sparse symmetric part S plus an implicit -ea_coeff * (J - I) term.
struct ScaledMatrix {
    MatrixKind kind = MatrixKind::adjacency_over_sqrt_d;
    int n = 0;
    double d = 0;
    std::vector<int64_t> row_ptr;
    std::vector<int> col;
    std::vector<double> val;
    double ea_coeff = 0;
    // Coefficient of e e^* in A/sqrt(d) = H + f e e^* - (f/N) I, for centered kind.
    double f = 0;

    void apply(const double* x, double* y) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd dense() const;
    // Entry (x, y) including the implicit term.
    double entry(int x, int y) const;
};

ScaledMatrix build_scaled_matrix(const GraphSample& g, MatrixKind kind, uint64_t wigner_seed = 0);
// Same construction for an arbitrary graph (pruned or induced) at degree scale d.
ScaledMatrix adjacency_over_sqrt_d(const Graph& g, double d);

// S_0..S_r around x; vertices inside each sphere ascending.
std::vector<std::vector<int>> ball_and_spheres(const Graph& g, int x, int r);

struct ComponentCensus {
    std::vector<std::vector<int>> components;
    int giant_index = 0;
    std::vector<bool> is_tree;
    std::vector<int> component_of;
};

ComponentCensus components_census(const Graph& g);
double small_component_norm(const GraphSample& g, const ComponentCensus& census);

void write_edge_list(std::ostream& os, const GraphSample& g);
void write_edge_list(std::ostream& os, const std::vector<Edge>& edges, const std::string& header);
GraphSample read_edge_list(std::istream& is);

}  // namespace erspec
