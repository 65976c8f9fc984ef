#include <doctest.h>

#include <cmath>
#include <random>

#include "tdbem/analysis.hpp"
#include "tdbem/discretization.hpp"
#include "test_support.hpp"

using namespace tdbem;
using doctest::Approx;

TEST_CASE("space basis sizes") {
    const auto oct = test::octahedron();
    CHECK(SpaceBasis(oct, 0).size() == 8);
    CHECK(SpaceBasis(oct, 1).size() == 6);
    const auto sq = refine_uniform(test::screen());
    CHECK(SpaceBasis(sq, 1).size() == 1);  // only the centre vertex is interior
    CHECK_THROWS_AS(SpaceBasis(oct, 2), DiscretizationError);
    CHECK_THROWS_AS(make_basis(oct, TimeGrid{0.1, 10}, 0, 2), DiscretizationError);
    CHECK_THROWS_AS(TimeGrid({-0.1, 10}).validate(), DiscretizationError);
}

TEST_CASE("space projection reproduces its space") {
    const auto m = test::octahedron();
    const SpaceBasis b0(m, 0), b1(m, 1);
    const auto one = project_space([](const Vec3&) { return 1.0; }, m, b0);
    CHECK((one.array() - 1.0).abs().maxCoeff() < 1e-12);
    const auto lin = [](const Vec3& x) { return 1.0 + 2.0 * x.x() - x.y() + 0.5 * x.z(); };
    CHECK(space_l2_error(lin, m, b1, project_space(lin, m, b1)) < 1e-12);
    // A panelwise constant function sampled at a point with its panel recovered from the centroid.
    Eigen::VectorXd c(8);
    for (int i = 0; i < 8; ++i) c[i] = i - 3.5;
    auto pw = [&](const Vec3& x) {
        int best = 0;
        double dist = 1e300;
        for (int i = 0; i < 8; ++i) {
            const auto g = m.panel(i);
            const double d = std::abs(g.normal.dot(x - g.centroid)) + (x - g.centroid).norm() * 1e-9;
            if (d < dist) dist = d, best = i;
        }
        return c[best];
    };
    CHECK((project_space(pw, m, b0) - c).norm() < 1e-12);
}

TEST_CASE("projection is idempotent and a best approximation") {
    const auto m = refine_uniform(test::octahedron());
    const SpaceBasis b(m, 1);
    const auto f = [](const Vec3& x) { return std::sin(x.x()) * std::exp(x.y() * x.z()); };
    const auto c = project_space(f, m, b);
    const auto err = space_l2_error(f, m, b, c);
    std::mt19937 rng(2);
    std::normal_distribution<double> n(0.0, 0.05);
    for (int k = 0; k < 20; ++k) {
        Eigen::VectorXd v = c;
        for (int i = 0; i < v.size(); ++i) v[i] += n(rng);
        CHECK(space_l2_error(f, m, b, v) >= err - 1e-12);
    }
    const TimeGrid g{0.2, 12};
    const auto tc = project_time([](double t) { return t * t; }, g, 0);
    const auto piece = [&](double t) {
        int n = std::min(g.nt - 1, static_cast<int>(t / g.dt));
        return tc[n];
    };
    CHECK((project_time(piece, g, 0) - tc).norm() < 1e-12);
}

TEST_CASE("time projection") {
    const TimeGrid g{0.25, 8};
    const auto c0 = project_time([](double) { return 3.0; }, g, 0);
    CHECK((c0.array() - 3.0).abs().maxCoeff() < 1e-13);
    const auto c1 = project_time([](double t) { return t; }, g, 1);
    for (int m = 0; m < g.nt; ++m) CHECK(c1[m] == Approx((m + 1) * g.dt).epsilon(1e-12));
    CHECK(time_l2_error([](double t) { return t; }, g, 1, c1) < 1e-12);
}

TEST_CASE("projection rates are one for piecewise constants") {
    std::vector<double> et, es, steps;
    auto sq = test::screen();
    for (int l = 0; l < 4; ++l) {
        const TimeGrid g{0.5 / (1 << l), 4 << l};
        const auto gt = [](double t) { return t * t; };
        et.push_back(time_l2_error(gt, g, 0, project_time(gt, g, 0)));
        const SpaceBasis b(sq, 0);
        const auto fx = [](const Vec3& x) { return x.x(); };
        es.push_back(space_l2_error(fx, sq, b, project_space(fx, sq, b)));
        steps.push_back(sq.h());
        sq = refine_uniform(sq);
    }
    CHECK(estimate_rate(et, steps) == Approx(1.0).epsilon(0.1));
    CHECK(estimate_rate(es, steps) == Approx(1.0).epsilon(0.1));
}

TEST_CASE("density evaluation") {
    const auto m = test::octahedron();
    const TimeGrid g{0.1, 10};
    Density d(make_basis(m, g, 0, 0), g.dt);
    CHECK(eval_density(d, 0.35, 2, 0.2, 0.3) == 0.0);
    d.coeffs(3, 2) = 1.0;
    CHECK(eval_density(d, 0.35, 2, 0.2, 0.3) == 1.0);
    CHECK(eval_density(d, 0.45, 2, 0.2, 0.3) == 0.0);
    CHECK(eval_density(d, 0.35, 1, 0.2, 0.3) == 0.0);
    CHECK(eval_density(d, m, 0.35, m.panel(2).centroid) == 1.0);

    Density h(make_basis(m, g, 1, 1), g.dt);
    h.coeffs.setRandom();
    for (int i = 0; i < 8; ++i) CHECK(eval_density(h, 0.0, i, 0.3, 0.3) == 0.0);
    // Hats are piecewise linear: the time derivative is the slope between nodes.
    const double t = 0.43;
    const double fd = (eval_density(h, t + 1e-6, 4, 0.2, 0.1) - eval_density(h, t - 1e-6, 4, 0.2, 0.1)) / 2e-6;
    CHECK(eval_density_dt(h, t, 4, 0.2, 0.1) == Approx(fd).epsilon(1e-7));
}

TEST_CASE("inverse estimate constant is stable") {
    // ||d_t u|| <= C / dt ||u|| on random hat densities, C measured per step size.
    const auto m = test::octahedron();
    std::vector<double> c;
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    for (double dt : {0.2, 0.1, 0.05}) {
        const TimeGrid g{dt, static_cast<int>(std::lround(1.0 / dt))};
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            Density d(make_basis(m, g, 1, 1), dt);
            d.coeffs = d.coeffs.unaryExpr([&](double) { return u(rng); });
            const double n0 = weighted_st_norm(d, NormSpec{0, 0.0, 0.0}, m);
            const double n1 = weighted_st_norm(d, NormSpec{1, 0.0, 0.0}, m);
            worst = std::max(worst, std::sqrt(n1 * n1 - n0 * n0) * dt / n0);
        }
        c.push_back(worst);
    }
    CHECK(c.back() < 1.5 * c.front());
    CHECK(c.front() < 1.5 * c.back());
}
