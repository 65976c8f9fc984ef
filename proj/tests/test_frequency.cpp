#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tdbem/frequency.hpp"
#include "test_support.hpp"

using namespace tdbem;
using doctest::Approx;

namespace {

SurfaceMesh far_pair() {
    return SurfaceMesh({Vec3(0, 0, 1), Vec3(0.5, 0, 1), Vec3(0, 0.5, 1.2), Vec3(3, 0.2, 0.8), Vec3(3.4, 0.2, 1.1),
                        Vec3(3, 0.7, 0.9)},
                       {{0, 1, 2}, {3, 4, 5}});
}

}  // namespace

TEST_CASE("single layer matrix is complex symmetric") {
    const auto m = test::octahedron();
    const SpaceBasis b(m, 0);
    const auto V = assemble_V_omega(m, b, b, cplx(0.8, 1.0), KernelParams{0.3, 1.0});
    CHECK((V - V.transpose()).norm() <= 1e-7 * V.norm());
}

TEST_CASE("far interaction matches a tensor rule with the brute-force kernel") {
    const auto m = far_pair();
    const SpaceBasis b(m, 0);
    const cplx w(0.9, 0.8);
    const double alpha = 0.4;
    const auto V = assemble_V_omega(m, b, b, w, KernelParams{alpha, 1.0});
    const auto K = assemble_K_omega(m, b, b, w, KernelParams{alpha, 1.0});
    const auto Kp = assemble_Kp_omega(m, b, b, w, KernelParams{alpha, 1.0});
    const auto P0 = m.panel(0), P1 = m.panel(1);
    cplx ref = 0.0, refK = 0.0, refKp = 0.0;
    const auto X = map_rule(P0, triangle_rule_subdivided(1)), Y = map_rule(P1, triangle_rule_subdivided(1));
    for (const auto& x : X)
        for (const auto& y : Y) {
            ref += 2.0 * x.weight * y.weight * oracle::half_space_green(x.x, y.x, w, alpha);
            const auto g = eval_G_omega_gradient(PointPair::make(x.x, y.x), w, KernelParams{alpha, 1.0});
            refK += 2.0 * x.weight * y.weight * g.grad_y.cwiseProduct(P1.normal.cast<cplx>()).sum();
            refKp += 2.0 * x.weight * y.weight * g.grad_x.cwiseProduct(P0.normal.cast<cplx>()).sum();
        }
    CHECK(std::abs(V(0, 1) - ref) <= 1e-6 * std::abs(ref));
    CHECK(std::abs(K(0, 1) - refK) <= 1e-6 * std::abs(refK));
    CHECK(std::abs(Kp(0, 1) - refKp) <= 1e-6 * std::abs(refKp));
}

TEST_CASE("alpha_inf = 0 splits into direct and image parts") {
    const auto m = test::octahedron();
    const SpaceBasis b(m, 1);
    const KernelParams p{0.0, 1.0};
    FrequencyOptions direct, image;
    direct.image = direct.correction = false;
    image.free_space = image.correction = false;
    const cplx w(1.3, 1.0);
    const auto full = assemble_V_omega(m, b, b, w, p);
    const CMatrix sum = assemble_V_omega(m, b, b, w, p, direct) + assemble_V_omega(m, b, b, w, p, image);
    CHECK((full - sum).norm() <= 1e-13 * full.norm());
}

TEST_CASE("Yukawa single layer is symmetric positive definite") {
    const auto m = refine_uniform(test::octahedron());
    const SpaceBasis b(m, 0);
    const Eigen::MatrixXd Y = assemble_yukawa(m, b, 1.0);
    CHECK((Y - Y.transpose()).norm() <= 1e-8 * Y.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Y + Y.transpose()));
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("complex weighted mass") {
    const auto m = test::octahedron();
    const SpaceBasis b(m, 0);
    const auto M = weighted_mass_complex(m, b, b, std::vector<cplx>(8, cplx(2.0, -1.0)));
    for (int i = 0; i < 8; ++i) CHECK(std::abs(M(i, i) - cplx(2.0, -1.0) * m.panel(i).area) < 1e-14);
}

TEST_CASE("frequency system blocks") {
    const auto m = test::octahedron();
    const auto sys = assemble_frequency_system(m, cplx(0.8, 1.0), KernelParams{0.3, 1.0}, MaterialField::constant(m, 1.0));
    CHECK(sys.n_phi() == 6);
    CHECK(sys.n_p() == 8);
    CHECK(sys.A.rows() == 14);
    CHECK(sys.A.cols() == 14);
    CHECK_THROWS(assemble_W_omega(m, SpaceBasis(m, 0), SpaceBasis(m, 0), cplx(1, 1), KernelParams{}));
}
