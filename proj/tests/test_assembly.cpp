#include <doctest.h>

#include <cmath>

#include "tdbem/assembly.hpp"
#include "test_support.hpp"

using namespace tdbem;
using doctest::Approx;

namespace {

SurfaceMesh two_panels(double gap) {
    return SurfaceMesh({Vec3(0, 0, 1), Vec3(0.5, 0, 1), Vec3(0, 0.5, 1), Vec3(gap, 0, 1), Vec3(gap + 0.5, 0, 1),
                        Vec3(gap, 0.5, 1)},
                       {{0, 1, 2}, {3, 4, 5}});
}

double max_abs(const Eigen::SparseMatrix<double>& s) {
    double m = 0.0;
    for (int c = 0; c < s.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(s, c); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

double max_diff(const ToeplitzBlocks& a, const ToeplitzBlocks& b) {
    double m = 0.0;
    const int lo = std::min(a.lag_min, b.lag_min), hi = std::max(a.lag_max(), b.lag_max());
    for (int k = lo; k <= hi; ++k) m = std::max(m, (a.dense(k) - b.dense(k)).cwiseAbs().maxCoeff());
    return m;
}

double max_entry(const ToeplitzBlocks& a) {
    double m = 0.0;
    for (int k = a.lag_min; k <= a.lag_max(); ++k) m = std::max(m, max_abs(a.block(k)));
    return m;
}

}  // namespace

TEST_CASE("retarded blocks are causal") {
    const double gap = 3.0;
    const auto mesh = two_panels(gap);
    const TimeGrid grid{0.2, 30};
    const auto b = make_basis(mesh, grid, 0, 0);
    const double dmin = gap - 0.5;
    const auto V = assemble_V_blocks(mesh, grid, b, b, KernelParams{0.3, 1.0});
    bool reached = false;
    for (int k = 0; k <= V.lag_max(); ++k) {
        const double v = V.dense(k)(0, 1);
        if ((k + 1) * grid.dt < dmin) CHECK(v == 0.0);
        if (v != 0.0) reached = true;
    }
    CHECK(reached);
    const auto K = assemble_K_blocks(mesh, grid, make_basis(mesh, grid, 0, 1), b, KernelParams{0.3, 1.0});
    for (int k = K.lag_min; k <= K.lag_max(); ++k)
        if ((k + 2) * grid.dt < dmin) CHECK(K.dense(k)(0, 1) == 0.0);
}

TEST_CASE("alpha_inf = 0 splits into direct and image blocks") {
    const auto mesh = test::octahedron();
    const TimeGrid grid{0.5, 8};
    const auto b = make_basis(mesh, grid, 0, 0);
    const KernelParams p{0.0, 1.0};
    AssemblyOptions direct, image;
    direct.image = direct.sigma = false;
    image.free_space = image.sigma = false;
    const auto full = assemble_V_blocks(mesh, grid, b, b, p);
    const auto sum = assemble_V_blocks(mesh, grid, b, b, p, direct) + assemble_V_blocks(mesh, grid, b, b, p, image);
    CHECK(max_diff(full, sum) <= 1e-12 * max_entry(full));
}

TEST_CASE("blocks vary continuously in alpha_inf") {
    const auto mesh = test::octahedron();
    const TimeGrid grid{0.5, 8};
    const auto b = make_basis(mesh, grid, 0, 0);
    const auto A0 = assemble_V_blocks(mesh, grid, b, b, KernelParams{0.0, 1.0});
    const auto A1 = assemble_V_blocks(mesh, grid, b, b, KernelParams{1e-6, 1.0});
    const auto A2 = assemble_V_blocks(mesh, grid, b, b, KernelParams{2e-6, 1.0});
    const double d1 = max_diff(A0, A1), d2 = max_diff(A0, A2);
    CHECK(d1 <= 1e-4 * max_entry(A0));
    CHECK(d2 == Approx(2 * d1).epsilon(0.05));
}

TEST_CASE("longer horizon reproduces the leading blocks") {
    const auto mesh = test::octahedron();
    const TimeGrid short_grid{0.5, 5}, long_grid{0.5, 10};
    const KernelParams p{0.3, 1.0};
    const auto a = assemble_V_blocks(mesh, short_grid, make_basis(mesh, short_grid, 0, 0),
                                     make_basis(mesh, short_grid, 0, 0), p);
    const auto b = assemble_V_blocks(mesh, long_grid, make_basis(mesh, long_grid, 0, 0),
                                     make_basis(mesh, long_grid, 0, 0), p);
    REQUIRE(b.lag_max() >= a.lag_max());
    for (int k = a.lag_min; k <= a.lag_max(); ++k) CHECK((a.dense(k) - b.dense(k)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("time mass blocks") {
    const auto mesh = test::octahedron();
    const TimeGrid grid{0.25, 6};
    const auto box = make_basis(mesh, grid, 0, 0);
    const std::vector<double> one(8, 1.0), two(8, 2.5);
    const Eigen::MatrixXd M = mass_matrix(mesh, box.space, box.space);
    const auto A = assemble_time_mass(mesh, grid, box, box, one, 0);
    for (int k = A.lag_min; k <= A.lag_max(); ++k)
        CHECK((A.dense(k) - ((k == 0 ? grid.dt : 0.0) * M)).cwiseAbs().maxCoeff() < 1e-15);
    const auto B = assemble_time_mass(mesh, grid, box, box, two, 0);
    CHECK(max_diff(B, 2.5 * A) < 1e-15);

    // d_t of hat m is +1/dt on cell m and -1/dt on cell m + 1.
    const auto hat = make_basis(mesh, grid, 1, 1), test1 = make_basis(mesh, grid, 1, 0);
    const Eigen::MatrixXd M1 = mass_matrix(mesh, test1.space, hat.space);
    const auto D = assemble_time_mass(mesh, grid, hat, test1, std::vector<double>(8, 1.0), 1);
    CHECK((D.dense(0) - M1).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((D.dense(1) + M1).cwiseAbs().maxCoeff() < 1e-14);
    for (int k = D.lag_min; k <= D.lag_max(); ++k)
        if (k != 0 && k != 1) CHECK(D.dense(k).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("acoustic system with kernels switched off is the decoupled mass form") {
    const auto mesh = test::octahedron();
    const TimeGrid grid{0.25, 4};
    AssemblyOptions off;
    off.free_space = off.image = off.sigma = false;
    std::vector<cplx> a(8);
    for (int i = 0; i < 8; ++i) a[i] = 0.5 + 0.25 * i;
    const MaterialField mat{a};
    const auto s = assemble_acoustic_blocks(mesh, grid, KernelParams{0.3, 1.0}, mat, off);
    CHECK(max_entry(s.V) == 0.0);
    CHECK(max_entry(s.K) == 0.0);
    CHECK(max_entry(s.Kp) == 0.0);
    CHECK(max_entry(s.W) == 0.0);
    std::vector<double> ar(8), inv(8);
    for (int i = 0; i < 8; ++i) ar[i] = a[i].real(), inv[i] = 1.0 / ar[i];
    const auto Ma = assemble_time_mass(mesh, grid, s.phi_basis, s.test1_basis, ar, 1);
    const auto Mi = assemble_time_mass(mesh, grid, s.p_basis, s.test2_basis, inv, 0);
    const auto mono = s.monolithic();
    const int r1 = s.test1_basis.n_space(), c1 = s.phi_basis.n_space();
    for (int k = mono.lag_min; k <= mono.lag_max(); ++k) {
        const Eigen::MatrixXd m = mono.dense(k);
        CHECK((m.topLeftCorner(r1, c1) - Ma.dense(k)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((m.bottomRightCorner(8, 8) - Mi.dense(k)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(m.topRightCorner(r1, 8).cwiseAbs().maxCoeff() == 0.0);
        CHECK(m.bottomLeftCorner(8, c1).cwiseAbs().maxCoeff() == 0.0);
    }
    // Inverse weights: panel i of the second block scales with 1 / alpha_i.
    CHECK(Mi.dense(0)(3, 3) == Approx(grid.dt * mesh.panel(3).area / ar[3]).epsilon(1e-13));
}

TEST_CASE("material validation") {
    const auto mesh = test::octahedron();
    CHECK_THROWS(MaterialField::constant(mesh, -1.0).validate_acoustic());
    CHECK_THROWS(MaterialField::constant(mesh, cplx(1, 1)).real_values());
    CHECK(MaterialField::constant(mesh, 2.0).invertible());
    CHECK_FALSE(MaterialField::constant(mesh, 0.0).invertible());
    CHECK_THROWS_AS(assemble_acoustic_blocks(mesh, TimeGrid{0.5, 2}, KernelParams{}, MaterialField::constant(mesh, -1.0)),
                    std::exception);
}

TEST_CASE("Dirichlet right-hand side") {
    const auto mesh = test::octahedron();
    const TimeGrid grid{0.2, 6};
    const auto b = make_basis(mesh, grid, 0, 0);
    const auto zero = assemble_rhs_dirichlet([](double, const Vec3&) { return 0.0; }, mesh, grid, b);
    CHECK(zero.cwiseAbs().maxCoeff() == 0.0);

    const auto g = [](const Vec3& x) { return 1.0 + x.x() - 0.5 * x.z(); };
    const auto f = [&](double t, const Vec3& x) { return t * g(x); };
    const auto r = assemble_rhs_dirichlet(f, mesh, grid, b);
    const auto ra = assemble_rhs_dirichlet(f, mesh, grid, b, 0.0, [&](double, const Vec3& x) { return g(x); });
    for (int n = 0; n < grid.nt; ++n)
        for (int i = 0; i < 8; ++i) {
            const auto P = mesh.panel(i);
            const double exact = grid.dt * P.area * g(P.centroid);
            CHECK(r(n, i) == Approx(exact).epsilon(1e-9));
            CHECK(ra(n, i) == Approx(exact).epsilon(1e-13));
        }

    // sigma = 1: d_t (t^2 g) = 2 t g against e^{-2t}, with antiderivative -(t + 1/2) e^{-2t}.
    const auto w = assemble_rhs_dirichlet([&](double t, const Vec3& x) { return t * t * g(x); }, mesh, grid, b, 1.0,
                                          [&](double t, const Vec3& x) { return 2 * t * g(x); });
    auto F = [](double t) { return -(t + 0.5) * std::exp(-2 * t); };
    for (int n = 0; n < grid.nt; ++n) {
        const auto P = mesh.panel(5);
        const double exact = (F((n + 1) * grid.dt) - F(n * grid.dt)) * P.area * g(P.centroid);
        CHECK(w(n, 5) == Approx(exact).epsilon(1e-10));
    }
    CHECK_THROWS_AS(assemble_rhs_dirichlet([](double, const Vec3&) { return 1.0; }, mesh, grid, b), AssemblyError);
}

TEST_CASE("acoustic right-hand side") {
    const auto mesh = test::octahedron();
    const TimeGrid grid{0.25, 4};
    std::vector<cplx> a(8);
    for (int i = 0; i < 8; ++i) a[i] = 1.0 + 0.1 * i;
    const MaterialField mat{a};
    AssemblyOptions off;
    off.free_space = off.image = off.sigma = false;
    const auto s = assemble_acoustic_blocks(mesh, grid, KernelParams{}, mat, off);
    const auto zero = assemble_rhs_acoustic([](double, const Vec3&, int) { return 0.0; },
                                            [](double, const Vec3&, int) { return 0.0; }, mesh, grid, s, mat);
    CHECK(zero.first.cwiseAbs().maxCoeff() == 0.0);
    CHECK(zero.second.cwiseAbs().maxCoeff() == 0.0);
    const auto r = assemble_rhs_acoustic([](double, const Vec3&, int) { return 0.0; },
                                         [&](double, const Vec3&, int i) { return a[i].real(); }, mesh, grid, s, mat);
    for (int n = 0; n < grid.nt; ++n)
        for (int i = 0; i < 8; ++i) CHECK(r.second(n, i) == Approx(grid.dt * mesh.panel(i).area).epsilon(1e-13));
}

TEST_CASE("time correlation of boxes") {
    const double dt = 0.3;
    const auto c = time_correlation(0, 0, dt, 0);
    CHECK(c(0.0) == Approx(dt));
    CHECK(c(0.15) == Approx(0.15));
    CHECK(c.integral() == Approx(dt * dt));
    // One trial derivative of a hat against a box integrates to zero net lag mass.
    CHECK(std::abs(time_correlation(1, 0, dt, 1).integral()) < 1e-14);
}
