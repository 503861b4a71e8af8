#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "erspec/errors.hpp"
#include "erspec/exponents.hpp"
#include "erspec/spectra.hpp"
#include "generators.hpp"

using namespace erspec;

namespace {

Eigen::MatrixXd adjacency(const Graph& g) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n(), g.n());
    for (auto [u, v] : g.edges()) a(u, v) = a(v, u) = 1;
    return a;
}

// Eigen's own solver, independent of the LAPACK route.
Eigen::VectorXd oracle_eigenvalues(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().reverse();
}

}  // namespace

TEST_CASE("eig_sym small cases") {
    Eigen::MatrixXd d = Eigen::Vector3d(3, 1, 2).asDiagonal();
    auto e = eig_sym(d);
    CHECK(e.values == std::vector<double>{3, 2, 1});
    Eigen::MatrixXd k2(2, 2);
    k2 << 0, 1, 1, 0;
    auto k = eig_sym(k2);
    CHECK(k.values[0] == doctest::Approx(1));
    CHECK(k.values[1] == doctest::Approx(-1));
    CHECK(std::abs(k.vectors(0, 0)) == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(k.vectors(0, 1) * k.vectors(1, 1) < 0);
    Graph star = Graph::from_edges(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
    auto s = eig_sym(adjacency(star));
    CHECK(s.values.front() == doctest::Approx(std::sqrt(5.0)));
    CHECK(s.values.back() == doctest::Approx(-std::sqrt(5.0)));
    for (int i = 1; i < 5; ++i) CHECK(std::abs(s.values[i]) <= 1e-12);
}

TEST_CASE("eig_sym rejects nonsymmetric input") {
    Eigen::MatrixXd m(2, 2);
    m << 0, 1, 0, 0;
    CHECK_THROWS_AS(eig_sym(m), ContractError);
}

TEST_CASE("eig_sym residual and orthogonality contracts") {
    gen::cases(10, 31, [](gen::Eng& e) {
        Eigen::MatrixXd m = gen::random_symmetric(e, gen::integer(e, 1, 80));
        auto dec = eig_sym(m);
        double norm = spectral_norm(m);
        for (int i = 0; i < m.rows(); ++i)
            CHECK((m * dec.vectors.col(i) - dec.values[i] * dec.vectors.col(i)).norm() <= 1e-8 * std::max(norm, 1.0));
        CHECK((dec.vectors.transpose() * dec.vectors - Eigen::MatrixXd::Identity(m.rows(), m.rows())).norm() <= 1e-8);
        Eigen::VectorXd ref = oracle_eigenvalues(m);
        for (int i = 0; i < m.rows(); ++i) CHECK(dec.values[i] == doctest::Approx(ref[i]).epsilon(1e-10));
    });
}

TEST_CASE("eig_sym_window returns the window with global ranks") {
    gen::Eng e(32);
    Eigen::MatrixXd m = gen::random_symmetric(e, 60);
    auto full = eig_sym(m, false);
    auto win = eig_sym_window(m, -0.5, 0.5);
    for (size_t i = 0; i < win.values.size(); ++i) {
        CHECK(win.values[i] > -0.5);
        CHECK(win.values[i] <= 0.5);
        CHECK(full.values[win.rank[i] - 1] == doctest::Approx(win.values[i]));
    }
    int expected = 0;
    for (double v : full.values) expected += (v > -0.5 && v <= 0.5);
    CHECK(static_cast<int>(win.values.size()) == expected);
}

TEST_CASE("Lanczos extremal pairs agree with the dense oracle") {
    gen::cases(5, 33, [](gen::Eng& e) {
        GraphSample g = generate_er(gen::integer(e, 400, 900), 6.0, e());
        ScaledMatrix m = build_scaled_matrix(g, MatrixKind::adjacency_over_sqrt_d);
        auto ex = eig_extremal(as_operator(m), 5);
        CHECK(ex.method == EigMethod::lanczos_extremal);
        Eigen::VectorXd ref = oracle_eigenvalues(m.dense());
        for (size_t i = 0; i < ex.values.size(); ++i) CHECK(ex.values[i] == doctest::Approx(ref[ex.rank[i] - 1]).epsilon(1e-8));
        CHECK(max_residual(as_operator(m), ex) <= 1e-8 * std::abs(ref[0]));
    });
}

TEST_CASE("operator norm routes agree") {
    GraphSample g = generate_er(1500, 5.0, 9);
    ScaledMatrix h = build_scaled_matrix(g, MatrixKind::centered_H);
    auto op = as_operator(h);
    double dense = operator_norm(op);
    double lanczos = operator_norm(op, 10);
    CHECK(lanczos == doctest::Approx(dense).epsilon(1e-8));
}

TEST_CASE("tridiagonalize a (p,q) tree at the root") {
    Graph t = pq_tree(5, 3, 6);
    auto z = tridiagonalize(as_operator(t), 0, 5);
    REQUIRE_FALSE(z.breakdown);
    REQUIRE(z.size() == 6);
    CHECK(z.offdiag[0] == doctest::Approx(std::sqrt(5.0)));
    for (int i = 1; i < 5; ++i) CHECK(z.offdiag[i] == doctest::Approx(std::sqrt(3.0)));
    for (double a : z.diag) CHECK(std::abs(a) <= 1e-12);
}

TEST_CASE("tridiagonalize breaks down on a diagonal matrix") {
    Eigen::MatrixXd d = Eigen::Vector4d(1, 2, 3, 4).asDiagonal();
    auto z = tridiagonalize(as_operator(d), 2, 3);
    CHECK(z.breakdown);
    CHECK(z.size() == 1);
    CHECK(z.diag[0] == 3);
}

TEST_CASE("tridiagonal moments and interlacing") {
    gen::cases(8, 35, [](gen::Eng& e) {
        GraphSample g = generate_er(gen::integer(e, 40, 120), 4.0, e());
        Eigen::MatrixXd a = adjacency(g.graph);
        int x = gen::integer(e, 0, g.n() - 1);
        auto z = tridiagonalize(as_operator(a), x, 4);
        Eigen::MatrixXd zm = z.dense();
        Eigen::VectorXd v = Eigen::VectorXd::Zero(g.n());
        v[x] = 1;
        Eigen::VectorXd p = v;
        Eigen::MatrixXd zk = Eigen::MatrixXd::Identity(z.size(), z.size());
        int kmax = z.breakdown ? z.size() : 2 * (z.size() - 1);
        for (int k = 1; k <= kmax; ++k) {
            p = a * p;
            zk = zk * zm;
            double walk = v.dot(p);
            CHECK(std::abs(zk(0, 0) - walk) <= 1e-8 * std::max(1.0, std::abs(walk)));
            if (k == 2) CHECK(zk(0, 0) == doctest::Approx(g.graph.degree(x)));
        }
        // Cauchy interlacing for a compression.
        Eigen::VectorXd full = oracle_eigenvalues(a);
        auto tv = z.eigenvalues();
        int n = g.n(), m = z.size();
        for (int i = 0; i < m; ++i) {
            CHECK(tv[i] <= full[i] + 1e-9);
            CHECK(tv[i] >= full[n - m + i] - 1e-9);
        }
    });
}

TEST_CASE("Z(alpha) spectra") {
    // alpha = 1 is the path on 41 vertices.
    CHECK(z_alpha_matrix(1.0, 40).eigenvalues().front() == doctest::Approx(2 * std::cos(std::numbers::pi / 42)).epsilon(1e-14));
    // Dense oracle on the explicit 41 x 41 matrix: 2.3094010767585...
    Eigen::MatrixXd z4 = Eigen::MatrixXd::Zero(41, 41);
    z4(0, 1) = z4(1, 0) = 2.0;
    for (int i = 1; i < 40; ++i) z4(i, i + 1) = z4(i + 1, i) = 1.0;
    double oracle = oracle_eigenvalues(z4)[0];
    CHECK(std::abs(oracle - 2.3094010767585030) <= 1e-12);
    CHECK(std::abs(z_alpha_matrix(4.0, 40).eigenvalues().front() - oracle) <= 1e-12);
    CHECK(std::abs(z_alpha_matrix(4.0, 40).eigenvalues().front() - lambda_of_alpha(4.0)) <= 1e-6);
    Eigen::VectorXd u = z_alpha_matrix(3.0, 40).top_eigenvector();
    for (int i = 2; i < 10; ++i) CHECK(u[i + 1] / u[i] == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-6));
    CHECK_THROWS_AS(z_alpha_matrix(-1, 4), DomainError);
    double prev = 0;
    for (double a = 2; a < 8; a += 0.25) {
        double top = z_alpha_matrix(a, 40).eigenvalues().front();
        CHECK(top >= prev);
        prev = top;
    }
}

TEST_CASE("tree norm checks") {
    auto pq = tree_norm_check(3, 3, 7);
    CHECK(pq.bound == doctest::Approx(2 * std::sqrt(3.0)));
    CHECK(pq.norm < 2 * std::sqrt(3.0));
    CHECK(pq.within_bound);
    auto hub = tree_norm_check(9, 3, 8);
    // Dense spectrum of the radial reduction: bound sqrt(3) * 3/sqrt(2) = 3.6742346141747673
    CHECK(hub.bound == doctest::Approx(3.6742346141747673).epsilon(1e-14));
    CHECK(hub.bound - hub.norm <= 1e-2);
    CHECK(tree_norm_check(9, 3, 10).norm > hub.norm);
    CHECK(hub.within_bound);
    CHECK(hub.norm == doctest::Approx(hub.radial_norm).epsilon(1e-10));
    auto path = tree_norm_check(1, 1, 5);
    CHECK(path.norm == doctest::Approx(2 * std::cos(std::numbers::pi / 7)).epsilon(1e-12));
    CHECK(path.norm <= 2);
}

TEST_CASE("tree norm matches the explicit dense spectrum") {
    for (auto [p, q, depth] : {std::tuple{4, 2, 5}, {2, 3, 4}, {7, 2, 5}}) {
        auto rec = tree_norm_check(p, q, depth);
        double dense = oracle_eigenvalues(adjacency(pq_tree(p, q, depth)))[0];
        CHECK(rec.norm == doctest::Approx(dense).epsilon(1e-10));
        CHECK(rec.radial_norm == doctest::Approx(dense).epsilon(1e-10));
    }
}

TEST_CASE("spectrum csv") {
    Eigen::MatrixXd d = Eigen::Vector2d(2, 1).asDiagonal();
    std::ostringstream os;
    write_spectrum_csv(os, eig_sym(d), true);
    CHECK(os.str() == "index,eigenvalue,inf_norm_of_vector\n1,2,1\n2,1,1\n");
}
