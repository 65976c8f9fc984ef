#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "tdbem/potential.hpp"
#include "test_support.hpp"

using namespace tdbem;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAlpha = 0.3;
constexpr double kDt = 0.4;

// A small panel far from the observer, so every retarded time stays inside one linear piece of the basis.
SurfaceMesh small_panel() { return test::single_panel(Vec3(0, 0, 1), Vec3(0.1, 0, 1), Vec3(0.02, 0.08, 1.03)); }

const Vec3 kX(4.0, 0.0, 1.5);

double box2(double s) { return (s >= 0.8 && s < 1.2) ? 1.0 : 0.0; }

// Int G(t - s, x, y) box_2(s) ds, with the absorbing part integrated in closed form.
double single_layer_point(double t, const Vec3& y) {
    const auto pp = PointPair::make(kX, y);
    double v = box2(t - pp.r_plus) / (4 * kPi * pp.r_plus) + box2(t - pp.r_minus) / (4 * kPi * pp.r_minus);
    auto Hf = [&](double u) { return u > pp.r_minus ? oracle::sigma_antiderivative(u, pp.R, pp.z_plus, kAlpha) : 0.0; };
    v += -(kAlpha / (2 * kPi)) * (Hf(t - 0.8) - Hf(t - 1.2));
    return v;
}

// Hat with support [0.4, 1.2) peaking at 0.8.
double hat1(double s) { return (s <= 0.4 || s >= 1.2) ? 0.0 : (s <= 0.8 ? (s - 0.4) / kDt : (1.2 - s) / kDt); }

double hat_point(double t, const Vec3& y) {
    const auto pp = PointPair::make(kX, y);
    double v = hat1(t - pp.r_plus) / (4 * kPi * pp.r_plus) + hat1(t - pp.r_minus) / (4 * kPi * pp.r_minus);
    auto f = [&](double u) { return oracle::sigma_antiderivative(u, pp.R, pp.z_plus, kAlpha); };
    // Int_{r-} f(u) hat'(t - u) du over the two linear pieces.
    auto piece = [&](double a, double b, double slope) {
        a = std::max(a, pp.r_minus);
        return b > a ? slope * oracle::composite_gauss(f, a, b, 20) : 0.0;
    };
    v += -(kAlpha / (2 * kPi)) * (piece(t - 0.8, t - 0.4, 1.0 / kDt) + piece(t - 1.2, t - 0.8, -1.0 / kDt));
    return v;
}

double panel_integral(const SurfaceMesh& m, const std::function<double(const Vec3&)>& g) {
    double s = 0.0;
    for (const auto& q : map_rule(m.panel(0), triangle_rule_subdivided(3))) s += q.weight * g(q.x);
    return s;
}

}  // namespace

TEST_CASE("zero density and causality") {
    const auto m = test::octahedron();
    const TimeGrid g{0.5, 10};
    Density d(make_basis(m, g, 0, 0), g.dt);
    const KernelParams p{kAlpha, 1.0};
    const Vec3 x(0, 0, 4);
    CHECK(eval_single_layer(d, m, x, 3.0, p) == 0.0);
    Density h(make_basis(m, g, 1, 1), g.dt);
    CHECK(eval_double_layer(h, m, x, 3.0, p) == 0.0);
    d.coeffs.setOnes();
    h.coeffs.setOnes();
    // dist(x, mesh) = 1 from the top vertex (0, 0, 3).
    CHECK(eval_single_layer(d, m, x, 0.99, p) == 0.0);
    CHECK(eval_double_layer(h, m, x, 0.99, p) == 0.0);
    CHECK(eval_single_layer(d, m, x, 1.5, p) != 0.0);
    CHECK_THROWS_AS(eval_single_layer(d, m, m.panel(0).centroid, 1.0, p), DiscretizationError);
    CHECK_THROWS_AS(eval_single_layer(d, m, Vec3(0, 0, -1), 1.0, p), DiscretizationError);
}

TEST_CASE("single layer of a distant panel") {
    const auto m = small_panel();
    const TimeGrid g{kDt, 20};
    Density d(make_basis(m, g, 0, 0), g.dt);
    d.coeffs(2, 0) = 1.0;
    const KernelParams p{kAlpha, 1.0};
    // Direct arrival inside the box, image arrival inside the box, and the absorbing tail alone.
    for (double t : {5.03, 5.717, 6.2}) {
        const double ref = panel_integral(m, [&](const Vec3& y) { return single_layer_point(t, y); });
        CHECK(eval_single_layer(d, m, kX, t, p) == Approx(ref).epsilon(1e-6));
    }
}

TEST_CASE("double layer of a distant closed surface") {
    // Octahedron of radius 0.05 around (0, 0, 1.2), density hat_1(t) (1 + 10 y1): linear, so p = 1 is exact.
    auto oct = test::octahedron();
    std::vector<Vec3> v;
    for (const auto& q : oct.vertices()) v.push_back(Vec3(0, 0, 1.2) + 0.05 * (q - Vec3(0, 0, 2)));
    const SurfaceMesh m(v, oct.triangles());
    const TimeGrid g{kDt, 20};
    Density d(make_basis(m, g, 1, 1), g.dt);
    for (int i = 0; i < 6; ++i) d.coeffs(1, i) = 1.0 + 10.0 * v[i].x();
    const KernelParams p{kAlpha, 1.0};
    const double h = 1e-4;
    for (double t : {4.5, 5.3, 6.5}) {
        double ref = 0.0;
        for (std::size_t i = 0; i < m.num_triangles(); ++i) {
            const auto P = m.panel(i);
            for (const auto& q : map_rule(P, triangle_rule_subdivided(3)))
                ref += q.weight * (1.0 + 10.0 * q.x.x()) *
                       (hat_point(t, q.x + h * P.normal) - hat_point(t, q.x - h * P.normal)) / (2 * h);
        }
        CHECK(eval_double_layer(d, m, kX, t, p) == Approx(ref).epsilon(1e-6));
    }
}

TEST_CASE("potentials are linear in the density") {
    const auto m = test::octahedron();
    const TimeGrid g{0.5, 8};
    const KernelParams p{kAlpha, 1.0};
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int q = 0; q < 2; ++q) {
        Density a(make_basis(m, g, q, q), g.dt), b = a, c = a;
        a.coeffs = a.coeffs.unaryExpr([&](double) { return u(rng); });
        b.coeffs = b.coeffs.unaryExpr([&](double) { return u(rng); });
        c.coeffs = 2.0 * a.coeffs + b.coeffs;
        const Vec3 x(0.5, 0.3, 3.6);
        auto eval = [&](const Density& d) {
            return q == 0 ? eval_single_layer(d, m, x, 3.1, p) : eval_double_layer(d, m, x, 3.1, p);
        };
        const double lhs = eval(c), rhs = 2.0 * eval(a) + eval(b);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + 1.0));
    }
}

TEST_CASE("observation times and signal output") {
    const auto t = observation_times(0.5, 4, 4);
    REQUIRE(t.size() == 17);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == Approx(2.0));
    CHECK(t[1] == Approx(0.125));
    const auto path = std::filesystem::temp_directory_path() / "tdbem_signal.csv";
    write_signal_csv(path, {0.0, 0.5}, {1.0, -2.0});
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "t,value");
    CHECK(row.rfind("0,", 0) == 0);
    std::filesystem::remove(path);
}
