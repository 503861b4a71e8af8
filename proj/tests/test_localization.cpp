#include <doctest.h>

#include <cmath>
#include <sstream>

#include "erspec/errors.hpp"
#include "erspec/exponents.hpp"
#include "erspec/localization.hpp"
#include "generators.hpp"

using namespace erspec;

TEST_CASE("gamma exponent") {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(16);
    e[3] = 1;
    CHECK(gamma_exponent(e, 16) == doctest::Approx(0).epsilon(1e-15));
    Eigen::VectorXd flat = Eigen::VectorXd::Constant(16, 0.25);
    CHECK(gamma_exponent(flat, 16) == doctest::Approx(1).epsilon(1e-14));
    Eigen::VectorXd four = Eigen::VectorXd::Zero(16);
    four.head(4).setConstant(0.5);
    CHECK(gamma_exponent(four, 16) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(gamma_exponent(Eigen::VectorXd::Zero(4), 4), DomainError);
    CHECK_THROWS_AS(gamma_exponent(Eigen::VectorXd::Constant(4, 1.0), 4), DomainError);
    gen::cases(200, 71, [](gen::Eng& eng) {
        int n = gen::integer(eng, 2, 300);
        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i) w[i] = gen::uniform(eng, -1, 1);
        w.normalize();
        double g = gamma_exponent(w, n);
        CHECK(g >= -1e-12);
        CHECK(g <= 1 + 1e-12);
    });
}

TEST_CASE("resonant sets") {
    DegreeProfile prof{1.0, {0, 2, 3, 5, 10}, {0, 2, 3, 5, 10}};
    CHECK_THROWS_AS(resonant_set(prof, 2.0, 0.1), ParameterError);
    CHECK_THROWS_AS(resonant_set(prof, 2.5, 0.6), ParameterError);
    CHECK_THROWS_AS(resonant_set(prof, 2.5, 0.0), ParameterError);
    auto s = resonant_set(prof, 2.5, 0.05);
    CHECK(s.vertices == std::vector<int>{3});
    auto wide = resonant_set(prof, 2.5, 0.5);
    CHECK(wide.vertices == std::vector<int>{1, 2, 3});
    gen::cases(100, 72, [&](gen::Eng& eng) {
        double lambda = gen::uniform(eng, 2.01, 4);
        double d1 = gen::uniform(eng, 1e-3, lambda - 2);
        double d2 = gen::uniform(eng, d1, lambda - 2);
        auto a = resonant_set(prof, lambda, d1).vertices;
        auto b = resonant_set(prof, lambda, d2).vertices;
        CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
    });
    CHECK(default_delta(2.02) == doctest::Approx(0.02));
    CHECK(default_delta(2.06) == doctest::Approx(0.05));
    CHECK(default_delta(3.0) == doctest::Approx(0.5));
}

TEST_CASE("predicted center mass") {
    CHECK(predicted_center_mass(2.5) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(predicted_center_mass(-2.5) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(predicted_center_mass(1.0) == 0);
    CHECK(predicted_center_mass(2.0) == 0);
    // Equals u_0^2 in the r_star -> infinity limit.
    for (double alpha : {2.5, 3.0, 6.0}) {
        double u0 = profile_weights(alpha, 60)[0];
        CHECK(predicted_center_mass(lambda_of_alpha(alpha)) == doctest::Approx(u0 * u0).epsilon(1e-10));
    }
}

TEST_CASE("overlap with the profile itself is one") {
    std::vector<Edge> e;
    int next = 1;
    for (int k = 0; k < 6; ++k) {
        int c = next++;
        e.emplace_back(0, c);
        for (int j = 0; j < 2; ++j) e.emplace_back(c, next++);
    }
    GraphSample g = sample_from_edges(next, 2.0, e);
    PrunedGraph p = prune(g, 2.5, 2);
    std::vector<LocalizationProfile> profs{build_profile(p, 0, 1), build_profile(p, 0, -1)};
    double lambda = lambda_of_alpha(3.0);
    ResonantSet res = resonant_set(normalized_degrees(g), lambda, 0.1);
    REQUIRE(res.vertices == std::vector<int>{0});
    auto rep = overlap_report(profs[0].dense(g.n()), lambda, res, profs);
    CHECK(rep.overlap == doctest::Approx(1).epsilon(1e-12));
    CHECK(rep.center_mass == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(rep.l2 == doctest::Approx(1).epsilon(1e-12));
    auto neg = overlap_report(profs[1].dense(g.n()), -lambda, res, profs);
    CHECK(neg.overlap == doctest::Approx(1).epsilon(1e-12));
    auto cross = overlap_report(profs[1].dense(g.n()), lambda, res, profs);
    CHECK(cross.overlap == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("rigidity pairing on a hand-made spectrum") {
    EigenDecomposition eigs;
    eigs.n = 6;
    eigs.values = {3.0, 2.45, 1.0, 0.0, -1.0, -2.4};
    eigs.rank = {1, 2, 3, 4, 5, 6};
    DegreeProfile prof{1.0, {5, 0, 1, 1, 1, 0}, {5, 0, 1, 1, 1, 0}};
    auto rep = rigidity_pairing(eigs, prof, 0.01);
    REQUIRE(rep.u_set == std::vector<int>{0});
    REQUIRE(rep.pairs.size() == 2);
    CHECK(rep.pairs[0].rank == 2);
    CHECK(rep.pairs[0].gap == doctest::Approx(0.05));
    CHECK(rep.pairs[1].rank == 6);
    CHECK(rep.pairs[1].predicted == doctest::Approx(-2.5));
    CHECK(rep.pairs[1].gap == doctest::Approx(0.1));
    CHECK(rep.bulk_max == doctest::Approx(1.0));
    CHECK(rep.count_above == 1);

    DegreeProfile quiet{1.0, {1, 1, 1, 1, 1, 1}, {1, 1, 1, 1, 1, 1}};
    auto none = rigidity_pairing(eigs, quiet, 0.01);
    CHECK(none.u_set.empty());
    CHECK(none.pairs.empty());
    CHECK(none.bulk_max == doctest::Approx(2.45));

    EigenDecomposition partial = eigs;
    partial.values = {3.0};
    partial.rank = {1};
    CHECK_THROWS_AS(rigidity_pairing(partial, prof, 0.01), ParameterError);
}

TEST_CASE("U ordering breaks ties by id") {
    EigenDecomposition eigs;
    eigs.n = 8;
    eigs.values = {4, 3, 2.9, 0, 0, 0, -2.9, -3};
    eigs.rank = {1, 2, 3, 4, 5, 6, 7, 8};
    DegreeProfile prof{1.0, {0, 5, 0, 5, 0, 0, 0, 0}, {0, 5, 0, 5, 0, 0, 0, 0}};
    auto rep = rigidity_pairing(eigs, prof, 0.01);
    CHECK(rep.u_set == std::vector<int>{1, 3});
}

TEST_CASE("scatter rows and CSV layout") {
    Eigen::MatrixXd m(2, 2);
    m << 0, 1, 1, 0;
    auto e = eig_sym(m);
    auto rows = scatter_rows(e);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].eigenvalue == doctest::Approx(1));
    CHECK(rows[0].inf_norm == doctest::Approx(std::sqrt(0.5)));
    std::ostringstream os;
    write_scatter_csv(os, {{1.0, 0.5}});
    CHECK(os.str() == "eigenvalue,inf_norm\n1,0.5\n");
    RigidityReport rep;
    rep.pairs.push_back({2, 2.45, 2.5, 0.05, 0});
    std::ostringstream rs;
    write_rigidity_csv(rs, rep);
    CHECK(rs.str() == "rank,eigenvalue,predicted,abs_gap\n2,2.45,2.5,0.05\n");
    std::ostringstream ls;
    write_localization_csv(ls, {});
    CHECK(ls.str() == "eigenvalue,gamma,overlap,center_mass,predicted_center_mass\n");
    EigenDecomposition no_vectors = eig_sym(m, false);
    CHECK_THROWS_AS(scatter_rows(no_vectors), ParameterError);
}
