#pragma once

#include <Eigen/Dense>

#include "tdbem/assembly.hpp"

namespace tdbem {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Quadrature controls for Galerkin matrices at a fixed complex frequency.
struct FrequencyOptions {
    int outer_refine = 0;      // outer rule on the test panel
    int inner_refine = 1;      // tensor rule on the trial panel for the smooth correction
    double radial_h = 0.25;    // radial piece length of the polar rule
    PolarOptions polar{6, 6, 1.0};
    bool free_space = true;
    bool image = true;
    bool correction = true;
};

/// <V_w phi, psi> = 2 Int Int G_w(x, y) phi(y) psi(x).
CMatrix assemble_V_omega(const SurfaceMesh& mesh, const SpaceBasis& test, const SpaceBasis& trial, cplx omega,
                         const KernelParams& params, const FrequencyOptions& opts = {});

/// <K_w phi, psi> = 2 Int Int dG_w/dn_y phi psi.
CMatrix assemble_K_omega(const SurfaceMesh& mesh, const SpaceBasis& test, const SpaceBasis& trial, cplx omega,
                         const KernelParams& params, const FrequencyOptions& opts = {});

/// <K'_w p, psi> = 2 Int Int dG_w/dn_x p psi.
CMatrix assemble_Kp_omega(const SurfaceMesh& mesh, const SpaceBasis& test, const SpaceBasis& trial, cplx omega,
                          const KernelParams& params, const FrequencyOptions& opts = {});

/// <W_w phi, psi> = -2 Int Int G_w [curl phi . curl psi - w^2 n_x . n_y phi psi], p = 1 only.
CMatrix assemble_W_omega(const SurfaceMesh& mesh, const SpaceBasis& test, const SpaceBasis& trial, cplx omega,
                         const KernelParams& params, const FrequencyOptions& opts = {});

/// Free-space single layer of the Yukawa kernel 2 e^{-s r}/(4 pi r); symmetric positive definite.
Eigen::MatrixXd assemble_yukawa(const SurfaceMesh& mesh, const SpaceBasis& basis, double s,
                                const FrequencyOptions& opts = {});

/// Galerkin matrix of a_w in the unknown (phi, p), phi in p = 1, p in p = 0:
/// a_w(U, V) = V^H A U.
struct FrequencySystem {
    SpaceBasis phi_space, p_space;
    CMatrix V, K, Kp, W;     // Galerkin matrices of the four operators
    CMatrix M_alpha, M_inv;  // weighted masses (p1 x p1, p0 x p0)
    CMatrix A;               // full form
    cplx omega;

    int n_phi() const { return phi_space.size(); }
    int n_p() const { return p_space.size(); }
};

FrequencySystem assemble_frequency_system(const SurfaceMesh& mesh, cplx omega, const KernelParams& params,
                                          const MaterialField& material, const FrequencyOptions& opts = {});

/// Panel-weighted mass matrix with complex weights.
CMatrix weighted_mass_complex(const SurfaceMesh& mesh, const SpaceBasis& test, const SpaceBasis& trial,
                              const std::vector<cplx>& w);

}  // namespace tdbem
