#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tdbem/panel_integration.hpp"
#include "tdbem/piecewise_poly.hpp"
#include "tdbem/quadrature.hpp"

using namespace tdbem;
using doctest::Approx;

TEST_CASE("Gauss-Legendre integrates degree 2n-1 exactly") {
    for (int n : {1, 2, 4, 7, 10}) {
        const auto& g = gauss_legendre(n);
        double s = 0.0;
        const int deg = 2 * n - 1;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], deg);
        CHECK(s == Approx(1.0 / (deg + 1)).epsilon(1e-14));
    }
}

TEST_CASE("seven point triangle rule is exact to degree five") {
    // Int over the reference triangle of xi^a eta^b = a! b! / (a + b + 2)!, weights normalised to area.
    auto exact = [](int a, int b) { return 2.0 * std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3); };
    for (int a = 0; a <= 5; ++a)
        for (int b = 0; a + b <= 5; ++b) {
            double s = 0.0;
            for (const auto& p : triangle_rule_7()) s += p.weight * std::pow(p.xi, a) * std::pow(p.eta, b);
            CHECK(s == Approx(exact(a, b)).epsilon(1e-13));
            double t = 0.0;
            for (const auto& p : triangle_rule_subdivided(2)) t += p.weight * std::pow(p.xi, a) * std::pow(p.eta, b);
            CHECK(t == Approx(exact(a, b)).epsilon(1e-13));
        }
}

TEST_CASE("adaptive quadrature") {
    const auto v = integrate_adaptive([](double x) { return std::complex<double>(std::exp(-x), std::sin(x)); }, 0.0,
                                      20.0, 1e-12);
    CHECK(v.real() == Approx(1.0 - std::exp(-20.0)).epsilon(1e-11));
    CHECK(v.imag() == Approx(1.0 - std::cos(20.0)).epsilon(1e-11));
    const auto s = integrate_adaptive([](double x) { return std::complex<double>(1.0 / std::sqrt(x), 0.0); }, 0.0, 1.0,
                                      1e-9, 1, 20000);
    CHECK(s.real() == Approx(2.0).epsilon(1e-8));
}

TEST_CASE("polar integration reproduces area and the Newton potential") {
    const auto panel = make_panel(Vec3(0, 0, 1), Vec3(1, 0, 1), Vec3(0.2, 0.9, 1.3));
    const RadialGrid grid{0.37, 0.0};
    for (const Vec3& x : {Vec3(0.3, 0.3, 1.1), Vec3(2.0, -1.0, 3.0), panel.centroid, panel.vertices[1]}) {
        double area = 0.0, newton = 0.0;
        integrate_polar(x, panel, grid, PolarOptions{6, 8, 1.0}, [&](const PolarPoint& q) {
            area += q.weight;
            newton += q.weight / q.r;
        });
        CHECK(area == Approx(panel.area).epsilon(1e-12));
        // Oracle: subdivided triangle rule on a punctured-free integrand is valid off the panel only.
        if ((x - panel.centroid).norm() > 1.0) {
            double ref = 0.0;
            for (const auto& p : map_rule(panel, triangle_rule_subdivided(4))) ref += p.weight / (x - p.x).norm();
            CHECK(newton == Approx(ref).epsilon(1e-10));
        }
    }
}

TEST_CASE("box correlation is the hat") {
    const double h = 0.3;
    const auto c = correlate(box_function(h), box_function(h));
    const auto hat = hat_function(h).shifted(-1);
    for (double t = -0.35; t <= 0.35; t += 0.01) CHECK(c(t) == Approx(hat(t) * h).epsilon(1e-13));
    CHECK(c.integral() == Approx(h * h).epsilon(1e-14));
}

TEST_CASE("piecewise polynomial calculus") {
    const double h = 0.25;
    const auto box = box_function(h);
    const std::complex<double> w(1.3, 0.7), i(0, 1);
    const auto F = box.fourier(w);
    const auto ref = (std::exp(i * w * h) - 1.0) / (i * w);
    CHECK(std::abs(F - ref) < 1e-13);
    CHECK_THROWS_AS(box.derivative(), std::domain_error);
    const auto hat = hat_function(h);
    const auto dh = hat.derivative();
    CHECK(dh(0.1) == Approx(1.0 / h));
    CHECK(dh(0.4) == Approx(-1.0 / h));
    CHECK(hat.reflected()(-h) == Approx(1.0));
    CHECK(hat.max_jump() < 1e-15);
    CHECK(box.max_jump() == Approx(1.0));
    CHECK(poly::integral01(poly::mul({1, 1}, {0, 2})) == Approx(1.0 + 2.0 / 3.0));
    CHECK(poly::eval(poly::shift({0, 0, 1}, 1.0), 1.0) == Approx(4.0));
}
