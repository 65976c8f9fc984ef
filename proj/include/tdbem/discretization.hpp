#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "tdbem/mesh.hpp"
#include "tdbem/piecewise_poly.hpp"

namespace tdbem {

class DiscretizationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Uniform time grid t_n = n dt, n = 0..nt, with horizon T = nt dt.
struct TimeGrid {
    double dt = 0.1;
    int nt = 10;
    double sigma = 0.0;  // weight parameter of e^{-2 sigma t}; enters norms only

    void validate() const;
    double t(int n) const noexcept { return n * dt; }
    double horizon() const noexcept { return nt * dt; }
};

/// Piecewise constants (p = 0) or continuous piecewise linears (p = 1) on the
/// panels. For p = 1 on a screen, vertices on the boundary carry no dof.
class SpaceBasis {
public:
    SpaceBasis() = default;
    SpaceBasis(const SurfaceMesh& mesh, int p);

    int degree() const noexcept { return p_; }
    int size() const noexcept { return n_; }
    int local_count() const noexcept { return p_ == 0 ? 1 : 3; }
    /// Global dof of local shape k on panel t, or -1 when it carries none.
    int dof(int panel, int k) const { return p_ == 0 ? panel : local_dofs_[panel][k]; }
    /// Shape value at barycentric (1 - xi - eta, xi, eta).
    double shape(int k, double xi, double eta) const noexcept {
        if (p_ == 0) return 1.0;
        return k == 0 ? 1.0 - xi - eta : (k == 1 ? xi : eta);
    }
    /// Surface gradient of local shape k on a panel (p = 1 only).
    static Vec3 shape_gradient(const PanelGeometry& g, int k);

private:
    int p_ = 0;
    int n_ = 0;
    std::vector<std::array<int, 3>> local_dofs_;
};

/// Reference temporal shape: box on [0, dt) for q = 0, hat on [0, 2 dt) for q = 1.
/// Basis function m is the reference shape shifted by m dt, m = 0..nt-1, so every
/// hat vanishes at t = 0.
PiecewisePoly time_shape(int q, double dt);

struct SpaceTimeBasis {
    SpaceBasis space;
    int q = 0;
    int n_time = 0;

    int n_space() const noexcept { return space.size(); }
    std::size_t size() const noexcept { return static_cast<std::size_t>(n_space()) * n_time; }
};

SpaceTimeBasis make_basis(const SurfaceMesh& mesh, const TimeGrid& grid, int p, int q);

/// Coefficients indexed (time index, space dof).
struct Density {
    Eigen::MatrixXd coeffs;
    SpaceTimeBasis basis;
    double dt = 0.1;

    Density() = default;
    Density(SpaceTimeBasis b, double dt_);
    /// Time coefficient of step m, zero outside the stored range.
    double at(int m, int dof) const {
        return (m < 0 || m >= coeffs.rows() || dof < 0) ? 0.0 : coeffs(m, dof);
    }
};

/// Temporal factor of the basis of step m at time t (box indicator or hat value).
double time_basis_value(int q, double dt, int m, double t);

/// Value at (t, point with barycentrics on panel).
double eval_density(const Density& d, double t, int panel, double xi, double eta);
/// Value at (t, x); x must lie on a panel within 1e-9 h.
double eval_density(const Density& d, const SurfaceMesh& mesh, double t, const Vec3& x);
/// Time derivative of a q = 1 density (piecewise constant in time).
double eval_density_dt(const Density& d, double t, int panel, double xi, double eta);

/// Spatial mass matrix <test_i, trial_j>_{L2(Gamma)}.
Eigen::SparseMatrix<double> mass_matrix(const SurfaceMesh& mesh, const SpaceBasis& test, const SpaceBasis& trial);

using SpaceFunction = std::function<double(const Vec3&)>;
using TimeFunction = std::function<double(double)>;

/// L2(Gamma) projection onto V_h^p (7-point rule per panel, exact to degree 5).
Eigen::VectorXd project_space(const SpaceFunction& f, const SurfaceMesh& mesh, const SpaceBasis& basis);
/// L2(0, T) projection onto V_dt^q (4-point Gauss per step).
Eigen::VectorXd project_time(const TimeFunction& g, const TimeGrid& grid, int q);

/// L2(Gamma) norm of f - sum_j c_j b_j.
double space_l2_error(const SpaceFunction& f, const SurfaceMesh& mesh, const SpaceBasis& basis,
                      const Eigen::VectorXd& c);
/// L2(0, T) norm of g - sum_m c_m b_m.
double time_l2_error(const TimeFunction& g, const TimeGrid& grid, int q, const Eigen::VectorXd& c);

}  // namespace tdbem
