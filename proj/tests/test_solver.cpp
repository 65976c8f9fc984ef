#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle_systems.hpp"
#include "tdbem/solver.hpp"

using namespace tdbem;
using doctest::Approx;

namespace {

MOTSystem scalar_system(std::vector<double> lags, int steps, double b) {
    MOTSystem s;
    s.blocks.dt = 1.0;
    s.blocks.rows = s.blocks.cols = 1;
    for (double c : lags) {
        Eigen::SparseMatrix<double> m(1, 1);
        m.insert(0, 0) = c;
        s.blocks.blocks.push_back(m);
    }
    s.rhs = Eigen::MatrixXd::Constant(steps, 1, b);
    return s;
}

}  // namespace

TEST_CASE("identity system returns the data") {
    std::mt19937 rng(1);
    auto s = test::random_system(rng, 3, 6, 1);
    s.blocks.blocks[0] = Eigen::MatrixXd::Identity(3, 3).sparseView();
    CHECK((mot_solve(s).x - s.rhs).cwiseAbs().maxCoeff() == 0.0);
    CHECK((dense_solve(s).x - s.rhs).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("geometric recursion") {
    const double c = 0.6;
    const auto s = scalar_system({1.0, c}, 12, 1.0);
    const auto r = mot_solve(s), d = dense_solve(s);
    for (int n = 0; n < 12; ++n) {
        const double exact = (1.0 - std::pow(-c, n + 1)) / (1.0 + c);
        CHECK(r.x(n, 0) == Approx(exact).epsilon(1e-14));
        CHECK(d.x(n, 0) == Approx(exact).epsilon(1e-13));
    }
}

TEST_CASE("marching agrees with the dense solve") {
    std::mt19937 rng(9);
    const auto s = test::random_system(rng, 3, 10, 10);
    const auto a = mot_solve(s), b = dense_solve(s);
    CHECK((a.x - b.x).norm() <= 1e-12 * b.x.norm());
    CHECK(a.residual < 1e-13);
    CHECK(relative_residual(s, a.x) == Approx(a.residual));
    CHECK(monolithic_matrix(s.blocks, 10).rows() == 30);
}

TEST_CASE("causality and linearity") {
    std::mt19937 rng(21);
    auto s = test::random_system(rng, 4, 16, 5);
    s.rhs.topRows(6).setZero();
    const auto r = mot_solve(s);
    CHECK(r.x.topRows(6).cwiseAbs().maxCoeff() == 0.0);
    auto s2 = test::random_system(rng, 4, 16, 5);
    s2.blocks = s.blocks;
    MOTSystem sum = s;
    sum.rhs = s.rhs + s2.rhs;
    const Eigen::MatrixXd x = mot_solve(sum).x, y = mot_solve(s).x + mot_solve(s2).x;
    CHECK((x - y).norm() <= 1e-10 * x.norm());
}

TEST_CASE("negative lags are rejected and growth is flagged") {
    auto grow = scalar_system({1.0, -3.0}, 40, 1.0);
    const auto r = mot_solve(grow);
    CHECK(r.energy_growth);
    CHECK_FALSE(mot_solve(scalar_system({1.0, 0.5}, 40, 1.0)).energy_growth);
    auto bad = scalar_system({1.0}, 4, 1.0);
    bad.blocks.lag_min = -1;
    CHECK_THROWS_AS(mot_solve(bad), SolverError);
}

TEST_CASE("singular diagonal block") {
    auto s = scalar_system({0.0, 1.0}, 4, 1.0);
    CHECK_THROWS_AS(mot_solve(s), SolverError);
    MOTSystem t;
    t.blocks.rows = t.blocks.cols = 2;
    t.blocks.blocks.push_back(Eigen::Vector2d(1.0, 1e-14).asDiagonal().toDenseMatrix().sparseView());
    t.rhs = Eigen::MatrixXd::Ones(3, 2);
    CHECK_THROWS_AS(mot_solve(t), SolverError);
}

TEST_CASE("dense solve is capped") {
    std::mt19937 rng(2);
    auto s = test::random_system(rng, 200, 60, 1);
    CHECK_THROWS_AS(dense_solve(s), SolverError);
}

TEST_CASE("sparse factorisation path") {
    std::mt19937 rng(5);
    const auto s = test::random_system(rng, 20, 5, 3);
    MOTOptions o;
    o.sparse_threshold = 10;
    const auto a = mot_solve(s, o), b = mot_solve(s);
    CHECK((a.x - b.x).norm() <= 1e-12 * b.x.norm());
}
