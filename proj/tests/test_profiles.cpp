#include <doctest.h>

#include <cmath>

#include "erspec/errors.hpp"
#include "erspec/exponents.hpp"
#include "erspec/profiles.hpp"
#include "generators.hpp"

using namespace erspec;

namespace {

// Star hub 0 with `kids` children, each child having `grand` further children.
GraphSample two_level_star(int kids, int grand, double d) {
    std::vector<Edge> e;
    int next = 1;
    for (int k = 0; k < kids; ++k) {
        int c = next++;
        e.emplace_back(0, c);
        for (int j = 0; j < grand; ++j) e.emplace_back(c, next++);
    }
    return sample_from_edges(next, d, e);
}

Eigen::MatrixXd materialize(const LinearOperator& op) {
    Eigen::MatrixXd m(op.n, op.n);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(op.n);
    for (int j = 0; j < op.n; ++j) {
        e[j] = 1;
        op.apply(e.data(), m.col(j).data());
        e[j] = 0;
    }
    return m;
}

}  // namespace

TEST_CASE("profile weights") {
    auto u = profile_weights(2.0, 3);
    CHECK(u[0] == doctest::Approx(1 / std::sqrt(6.0)).epsilon(1e-15));
    CHECK(u[1] == doctest::Approx(std::sqrt(2.0) * u[0]).epsilon(1e-15));
    CHECK(u[2] == doctest::Approx(std::sqrt(2.0) * u[0]).epsilon(1e-15));
    CHECK(u[3] == doctest::Approx(u[0]).epsilon(1e-15));
    // Large alpha: mass splits evenly between the center and the first sphere.
    auto big = profile_weights(1e8, 4);
    CHECK(big[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-7));
    CHECK(big[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-7));
    CHECK(big[2] / big[0] < 1e-3);
    auto five = profile_weights(5.0, 10);
    CHECK(five[10] / five[0] == doctest::Approx(std::pow(4.0, -4.5)).epsilon(1e-14));
    CHECK_THROWS_AS(profile_weights(1.0, 2), DomainError);
    gen::cases(100, 61, [](gen::Eng& e) {
        auto w = profile_weights(gen::uniform(e, 1.01, 50), gen::integer(e, 1, 12));
        double s = 0;
        for (double x : w) {
            CHECK(x > 0);
            s += x * x;
        }
        CHECK(std::abs(s - 1) <= 1e-12);
    });
}

TEST_CASE("profile vectors are unit, and the signed pair is orthogonal") {
    GraphSample g = two_level_star(6, 2, 2.0);
    PrunedGraph p = prune(g, 2.5, 2);
    REQUIRE(p.v_tau == std::vector<int>{0});
    auto plus = build_profile(p, 0, 1);
    auto minus = build_profile(p, 0, -1);
    Eigen::VectorXd vp = plus.dense(g.n()), vm = minus.dense(g.n());
    CHECK(std::abs(vp.norm() - 1) <= 1e-12);
    CHECK(std::abs(vp.dot(vm)) <= 1e-12);
    CHECK(plus.alpha == 3.0);
    CHECK_THROWS_AS(build_profile(p, 0, 0), ParameterError);
}

TEST_CASE("tail masses follow the weights") {
    // alpha = 3, r_star = 2: u_0^2 = 1/(1 + 3/2 + 1/2) = 1/3, u_1^2 = 1/2, u_2^2 = 1/6.
    GraphSample g = two_level_star(6, 2, 2.0);
    PrunedGraph p = prune(g, 2.5, 2);
    auto prof = build_profile(p, 0, 1);
    auto tail = prof.tail_masses(g.graph);
    REQUIRE(tail.size() == 3);
    CHECK(tail[0] == doctest::Approx(2.0 / 3).epsilon(1e-14));
    CHECK(tail[1] == doctest::Approx(1.0 / 6).epsilon(1e-14));
    CHECK(tail[2] == 0);
}

TEST_CASE("degenerate support is reported") {
    GraphSample g = two_level_star(5, 0, 1.0);
    PrunedGraph p = prune(g, 2.0, 2);
    CHECK_THROWS_AS(build_profile(p, 0, 1), DegenerateSupport);
    auto ops = build_pruned_operators(g, p, 1e-6);
    CHECK(ops.centers.empty());
    CHECK(ops.degenerate == std::vector<int>{0});
}

TEST_CASE("empty center set: projection vanishes and H_hat equals H_tau") {
    GraphSample g = generate_er(300, 5.0, 3);
    PrunedGraph p = prune(g, 1.8, 1);
    auto ops = build_pruned_operators(g, p, 1e6);
    REQUIRE(ops.centers.empty());
    Eigen::MatrixXd pi = materialize(ops.op(&PrunedOperators::apply_pi));
    CHECK(pi.isZero(0));
    Eigen::MatrixXd ht = materialize(ops.op(&PrunedOperators::apply_h_tau));
    Eigen::MatrixXd hh = materialize(ops.op(&PrunedOperators::apply_h_hat));
    CHECK((ht - hh).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("no pruning means H_tau equals H") {
    GraphSample g = generate_er(200, 20.0, 4);
    PrunedGraph p = prune(g, 2.0, 1);
    REQUIRE(p.v_tau.empty());
    auto ops = build_pruned_operators(g, p, 1e-3);
    auto rep = approximation_report(ops);
    CHECK(rep.norm_h_htau <= 1e-12);
    CHECK(rep.norm_ea_cut <= 1e-12);
}

TEST_CASE("block structure of the approximation") {
    for (uint64_t seed = 1; seed <= 6; ++seed) {
        GraphSample g = generate_er(400, 2.5, seed);
        PrunedGraph p = prune(g, 1.5, 1);
        auto ops = build_pruned_operators(g, p, 0.0);
        if (ops.centers.empty()) continue;
        int n = g.n();
        Eigen::MatrixXd pi = materialize(ops.op(&PrunedOperators::apply_pi));
        Eigen::MatrixXd hh = materialize(ops.op(&PrunedOperators::apply_h_hat));
        Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
        CHECK((pi * pi - pi).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((pi - pi.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((pi * hh * (id - pi)).cwiseAbs().maxCoeff() <= 1e-12);
        // Gram matrix of the whole family.
        Eigen::MatrixXd v(n, ops.profiles.size());
        for (size_t i = 0; i < ops.profiles.size(); ++i) v.col(i) = ops.profiles[i].dense(n);
        Eigen::MatrixXd gram = v.transpose() * v;
        CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= 1e-10);
        for (const auto& prof : ops.profiles) {
            Eigen::VectorXd x = prof.dense(n);
            CHECK(std::abs(x.dot(hh * x) - prof.sigma * lambda_of_alpha(prof.alpha)) <= 1e-10);
        }
        // Restricted to the profile span the spectrum is exactly {sigma Lambda(alpha)}.
        Eigen::MatrixXd restricted = v.transpose() * hh * v;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(restricted);
        std::vector<double> want;
        for (const auto& prof : ops.profiles) want.push_back(prof.sigma * lambda_of_alpha(prof.alpha));
        std::sort(want.begin(), want.end());
        for (size_t i = 0; i < want.size(); ++i) CHECK(es.eigenvalues()[i] == doctest::Approx(want[i]).epsilon(1e-10));
    }
}

TEST_CASE("H_tau is local around pruned balls") {
    GraphSample g = generate_er(500, 3.0, 9);
    PrunedGraph p = prune(g, 1.5, 2);
    auto ops = build_pruned_operators(g, p, 0.0);
    int n = g.n();
    for (int x : p.v_tau) {
        auto spheres = ball_and_spheres(p.kept, x, 2 * p.r_star);
        for (int i = 0; i + 1 <= 2 * p.r_star; ++i) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
            std::vector<char> inside(n, 0);
            for (int k = 0; k <= i; ++k)
                for (int y : spheres[k]) v[y] = 1.0 + y % 3, inside[y] = 1;
            for (int y : spheres[i + 1]) inside[y] = 1;
            Eigen::VectorXd out(n);
            ops.apply_h_tau(v.data(), out.data());
            for (int y = 0; y < n; ++y)
                if (!inside[y]) CHECK(out[y] == 0);
        }
    }
}

TEST_CASE("EA cut against its dense form") {
    for (uint64_t seed = 1; seed <= 4; ++seed) {
        GraphSample g = generate_er(300, 3.0, seed);
        PrunedGraph p = prune(g, 1.5, 1);
        auto ops = build_pruned_operators(g, p, 0.0);
        int n = g.n();
        Eigen::MatrixXd ea = Eigen::MatrixXd::Constant(n, n, g.d / n);
        ea.diagonal().setZero();
        Eigen::VectorXd chi(n);
        for (int i = 0; i < n; ++i) chi[i] = ops.chi[i];
        Eigen::MatrixXd want = ea - chi.asDiagonal() * ea * chi.asDiagonal();
        Eigen::MatrixXd got = materialize(ops.op(&PrunedOperators::apply_ea_cut));
        CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-15);
        MESSAGE("seed " << seed << ": ||EA - chi EA chi|| / sqrt(d) = " << spectral_norm(want) / std::sqrt(g.d));
    }
}

TEST_CASE("profile residual on a complete tree is the boundary term only") {
    // Hub with 3 d children, every other vertex d - 1 children, so alpha = 3 exactly on the tree.
    int d = 4, r = 3;
    std::vector<Edge> e;
    std::vector<int> level{0};
    int next = 1;
    for (int k = 1; k <= 2 * r + 1; ++k) {
        std::vector<int> fresh;
        int kids = k == 1 ? 3 * d : d - 1;
        for (int u : level)
            for (int c = 0; c < kids; ++c) {
                e.emplace_back(u, next);
                fresh.push_back(next++);
            }
        level = std::move(fresh);
    }
    GraphSample g = sample_from_edges(next, d, e);
    PrunedGraph p = prune(g, 2.0, r);
    auto ops = build_pruned_operators(g, p, 1e-12);
    REQUIRE(ops.centers == std::vector<int>{0});
    // Radial recursion on sphere values a_i = sigma^i u_i / sqrt|S_i|.
    std::vector<double> sphere{1};
    for (int k = 1; k <= r + 1; ++k) sphere.push_back(k == 1 ? 3.0 * d : sphere.back() * (d - 1));
    for (const auto& prof : ops.profiles) {
        std::vector<double> a(r + 2, 0.0);
        for (int i = 0; i <= r; ++i) a[i] = (prof.sigma < 0 && i % 2 ? -1 : 1) * prof.weights[i] / std::sqrt(sphere[i]);
        double lam = prof.sigma * lambda_of_alpha(3.0);
        double sq = 0;
        for (int i = 0; i <= r + 1; ++i) {
            double up = i == 0 ? 0 : a[i - 1];
            double down = i == 0 ? 3.0 * d * a[1] : (d - 1.0) * a[i + 1 <= r ? i + 1 : r + 1];
            double res = (up + down) / std::sqrt(double(d)) - lam * a[i];
            sq += sphere[i] * res * res;
        }
        double res = profile_residual(ops, prof);
        CHECK(res == doctest::Approx(std::sqrt(sq)).epsilon(1e-10));
        MESSAGE("sigma " << prof.sigma << ": residual " << res);
    }
}

TEST_CASE("Ihara-Bass type margin") {
    ScaledMatrix zero;
    zero.n = 3;
    zero.d = 4;
    zero.row_ptr = {0, 0, 0, 0};
    DegreeProfile flat{4.0, {0, 0, 0}, {0, 0, 0}};
    double c = 1.0;
    double expected = 1 + c * std::max(std::log(3.0) / 16, 0.5);
    CHECK(ihara_bass_check(zero, flat, c) == doctest::Approx(expected).epsilon(1e-12));
    GraphSample edge = sample_from_edges(2, 4.0, {{0, 1}});
    ScaledMatrix h = build_scaled_matrix(edge, MatrixKind::adjacency_over_sqrt_d);
    CHECK(ihara_bass_check(h, normalized_degrees(edge), 1.0) > 0);
    double smallest_c = 1e9;
    for (uint64_t seed = 1; seed <= 3; ++seed) {
        GraphSample g = generate_er(1000, 8.0, seed);
        ScaledMatrix hc = build_scaled_matrix(g, MatrixKind::centered_H);
        double margin0 = ihara_bass_check(hc, normalized_degrees(g), 0.0);
        double unit = std::max(std::log(1000.0) / 64, 1 / std::sqrt(8.0));
        smallest_c = std::min(smallest_c, std::max(0.0, -margin0 / unit));
        CHECK(ihara_bass_check(hc, normalized_degrees(g), 1.0) >= 0);
    }
    MESSAGE("smallest admissible constant over seeds: " << smallest_c);
}
