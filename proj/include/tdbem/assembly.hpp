#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "tdbem/discretization.hpp"
#include "tdbem/kernel.hpp"
#include "tdbem/panel_integration.hpp"

namespace tdbem {

class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OperatorTag : int { V = 0, K = 1, Kp = 2, W = 3, Malpha = 4, Minvalpha = 5, Custom = 6 };
std::string to_string(OperatorTag tag);

/// Lag blocks A^k, k = lag_min..lag_max, of a retarded Galerkin operator:
/// (A x)_n = sum_k A^k x_{n-k}. For weighted assembly (row_weight_sigma > 0) the
/// true matrix row n carries the extra factor e^{-2 sigma n dt}.
struct ToeplitzBlocks {
    OperatorTag tag = OperatorTag::Custom;
    double dt = 0.0;
    int lag_min = 0;
    int rows = 0, cols = 0;
    double row_weight_sigma = 0.0;
    std::vector<Eigen::SparseMatrix<double>> blocks;  // blocks[k - lag_min]

    int lag_max() const noexcept { return lag_min + static_cast<int>(blocks.size()) - 1; }
    /// A^k, or an empty rows x cols matrix outside the stored range.
    Eigen::SparseMatrix<double> block(int k) const;
    Eigen::MatrixXd dense(int k) const { return Eigen::MatrixXd(block(k)); }
    /// Keeps lags lag_min..k_max.
    ToeplitzBlocks truncated(int k_max) const;
};

ToeplitzBlocks operator+(const ToeplitzBlocks& a, const ToeplitzBlocks& b);
ToeplitzBlocks operator*(double c, const ToeplitzBlocks& a);

/// Obstacle impedance, one value per panel.
struct MaterialField {
    std::vector<cplx> alpha;

    static MaterialField constant(const SurfaceMesh& mesh, cplx a);
    bool invertible() const;               // every |alpha| > 0
    void validate_acoustic() const;        // throws unless Re alpha > 0 everywhere
    std::vector<double> real_values() const;  // throws on complex entries
};

struct AssemblyOptions {
    int outer_refine = 0;         // outer rule: 7 points on each of 4^outer_refine sub-triangles
    int far_refine = 0;           // inner tensor rule for the Sigma tail beyond the reflected cone
    PolarOptions polar;
    int n_time_gauss = 4;         // Gauss points per time cell in Sigma tails
    bool free_space = true;       // direct delta term
    bool image = true;            // reflected delta term
    bool sigma = true;            // absorbing correction
    int lag_min = 0;              // lowest lag kept (negative lags appear for q = 1 tests)
    int lag_max = -1;             // highest lag kept; -1 means nt - 1
    double weight_sigma = 0.0;    // multiply test functions by e^{-2 sigma t}
    int weight_degree = 10;       // Taylor degree of the weight per time cell
};

/// Time correlation C(v) = Int b(s) a(s + v) ds of trial shape b and test shape a,
/// differentiated `trial_derivatives` times in the trial argument. Block k of an
/// operator with kernel G(u) is Int G(u) C(u - k dt) du.
PiecewisePoly time_correlation(int q_trial, int q_test, double dt, int trial_derivatives, double weight_sigma = 0.0,
                               int weight_degree = 10);

/// <V d^j/dt^j phi, psi> for V p = 2 Int G p, j = trial_time_derivative.
ToeplitzBlocks assemble_V_blocks(const SurfaceMesh& mesh, const TimeGrid& grid, const SpaceTimeBasis& trial,
                                 const SpaceTimeBasis& test, const KernelParams& params,
                                 const AssemblyOptions& opts = {}, int trial_time_derivative = 0);

/// <K d^j/dt^j phi, psi>, K phi = 2 Int dG/dn_y phi.
ToeplitzBlocks assemble_K_blocks(const SurfaceMesh& mesh, const TimeGrid& grid, const SpaceTimeBasis& trial,
                                 const SpaceTimeBasis& test, const KernelParams& params,
                                 const AssemblyOptions& opts = {}, int trial_time_derivative = 0);

/// <K' p, psi>, K' p = 2 Int dG/dn_x p.
ToeplitzBlocks assemble_Kp_blocks(const SurfaceMesh& mesh, const TimeGrid& grid, const SpaceTimeBasis& trial,
                                  const SpaceTimeBasis& test, const KernelParams& params,
                                  const AssemblyOptions& opts = {});

/// <W phi, psi>, W phi = 2 Int d^2G/dn_x dn_y phi, through the surface-curl form
///   <W phi, psi> = -2 Int Int G * [curl phi . curl psi + n_x . n_y (d_t^2 phi) psi]
/// applied to the direct, the reflected and the absorbing parts of G. Needs p = 1.
ToeplitzBlocks assemble_W_blocks(const SurfaceMesh& mesh, const TimeGrid& grid, const SpaceTimeBasis& trial,
                                 const SpaceTimeBasis& test, const KernelParams& params,
                                 const AssemblyOptions& opts = {});

/// Space-time mass blocks Int Int w(x) (d^j/dt^j phi) psi with a per-panel weight.
ToeplitzBlocks assemble_time_mass(const SurfaceMesh& mesh, const TimeGrid& grid, const SpaceTimeBasis& trial,
                                  const SpaceTimeBasis& test, const std::vector<double>& panel_weight,
                                  int trial_time_derivative, const AssemblyOptions& opts = {});

/// The six term families of the space-time bilinear form for the unknowns
/// phi (p = 1, q = 1) and p (p = 0, q = 0). The first equation is tested with d_t psi,
/// represented by boxes in time and p = 1 in space; the second with boxes q / alpha.
struct AcousticBlocks {
    SpaceTimeBasis phi_basis, p_basis, test1_basis, test2_basis;
    ToeplitzBlocks M_alpha;     // alpha (d_t phi, box)
    ToeplitzBlocks M_invalpha;  // (p / alpha, q)
    ToeplitzBlocks Kp;          // (K' p, box)
    ToeplitzBlocks W;           // (W phi, box)
    ToeplitzBlocks V;           // (V d_t p, q)
    ToeplitzBlocks K;           // (K d_t phi, q)

    /// Stacked unknown (phi_n, p_n) and stacked test (eq. 1, eq. 2):
    /// [[M_alpha - W, Kp], [-K, M_invalpha + V]].
    ToeplitzBlocks monolithic() const;
};

AcousticBlocks assemble_acoustic_blocks(const SurfaceMesh& mesh, const TimeGrid& grid, const KernelParams& params,
                                        const MaterialField& material, const AssemblyOptions& opts = {});

using SpaceTimeFunction = std::function<double(double t, const Vec3& x)>;
/// Boundary data that may depend on the panel, e.g. through its normal.
using BoundaryFunction = std::function<double(double t, const Vec3& x, int panel)>;

/// <d_t f, psi> with measure ds e^{-2 sigma t} dt, rows = time steps of the test basis.
/// Without df the time derivative is taken by fourth-order central differences.
Eigen::MatrixXd assemble_rhs_dirichlet(const SpaceTimeFunction& f, const SurfaceMesh& mesh, const TimeGrid& grid,
                                       const SpaceTimeBasis& test, double sigma = 0.0,
                                       const SpaceTimeFunction& df = nullptr);

/// (Int F box_n lambda_i, Int G / alpha box_n chi_j) with weight e^{-2 sigma t}.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> assemble_rhs_acoustic(const BoundaryFunction& F,
                                                                  const BoundaryFunction& G, const SurfaceMesh& mesh,
                                                                  const TimeGrid& grid, const AcousticBlocks& sys,
                                                                  const MaterialField& material, double sigma = 0.0);

}  // namespace tdbem
