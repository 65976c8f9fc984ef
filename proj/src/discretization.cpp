#include "tdbem/discretization.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

#include "tdbem/quadrature.hpp"

namespace tdbem {

void TimeGrid::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DiscretizationError("time step must be positive");
    if (nt < 1) throw DiscretizationError("time grid needs at least one step");
    if (!(sigma >= 0.0)) throw DiscretizationError("sigma must be >= 0");
}

SpaceBasis::SpaceBasis(const SurfaceMesh& mesh, int p) : p_(p) {
    if (p != 0 && p != 1) throw DiscretizationError("spatial degree must be 0 or 1");
    if (p == 0) {
        n_ = static_cast<int>(mesh.num_triangles());
        return;
    }
    std::vector<int> vdof(mesh.num_vertices(), -1);
    const auto& bnd = mesh.is_boundary_vertex();
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
        if (!bnd[v]) vdof[v] = n_++;
    if (n_ == 0) throw DiscretizationError("p = 1 basis is empty: every vertex lies on the screen boundary");
    local_dofs_.reserve(mesh.num_triangles());
    for (const auto& t : mesh.triangles()) local_dofs_.push_back({vdof[t[0]], vdof[t[1]], vdof[t[2]]});
}

Vec3 SpaceBasis::shape_gradient(const PanelGeometry& g, int k) {
    const auto& v = g.vertices;
    const Vec3 e = v[(k + 2) % 3] - v[(k + 1) % 3];
    return g.normal.cross(e) / (2.0 * g.area);
}

PiecewisePoly time_shape(int q, double dt) {
    if (q == 0) return box_function(dt);
    if (q == 1) return hat_function(dt);
    throw DiscretizationError("temporal degree must be 0 or 1");
}

SpaceTimeBasis make_basis(const SurfaceMesh& mesh, const TimeGrid& grid, int p, int q) {
    grid.validate();
    if (q != 0 && q != 1) throw DiscretizationError("temporal degree must be 0 or 1");
    return {SpaceBasis(mesh, p), q, grid.nt};
}

Density::Density(SpaceTimeBasis b, double dt_)
    : coeffs(Eigen::MatrixXd::Zero(b.n_time, b.n_space())), basis(std::move(b)), dt(dt_) {}

double time_basis_value(int q, double dt, int m, double t) {
    const double s = t / dt - m;
    if (q == 0) return (s >= 0.0 && s < 1.0) ? 1.0 : 0.0;
    if (s <= 0.0 || s >= 2.0) return 0.0;
    return s <= 1.0 ? s : 2.0 - s;
}

namespace {

// Time coefficients active at t: (step, factor) pairs.
template <class F>
void for_active_steps(int q, double dt, double t, F&& f) {
    const int c = static_cast<int>(std::floor(t / dt));
    const double xi = t / dt - c;
    if (q == 0) {
        f(c, 1.0);
    } else {
        f(c, xi);
        f(c - 1, 1.0 - xi);
    }
}

}  // namespace

double eval_density(const Density& d, double t, int panel, double xi, double eta) {
    double v = 0.0;
    const auto& sb = d.basis.space;
    for_active_steps(d.basis.q, d.dt, t, [&](int m, double ft) {
        if (ft == 0.0) return;
        for (int k = 0; k < sb.local_count(); ++k) v += ft * sb.shape(k, xi, eta) * d.at(m, sb.dof(panel, k));
    });
    return v;
}

double eval_density_dt(const Density& d, double t, int panel, double xi, double eta) {
    if (d.basis.q != 1) throw DiscretizationError("time derivative needs a q = 1 density");
    const auto& sb = d.basis.space;
    const int c = static_cast<int>(std::floor(t / d.dt));
    double v = 0.0;
    for (int k = 0; k < sb.local_count(); ++k) {
        const int dof = sb.dof(panel, k);
        v += sb.shape(k, xi, eta) * (d.at(c, dof) - d.at(c - 1, dof));
    }
    return v / d.dt;
}

double eval_density(const Density& d, const SurfaceMesh& mesh, double t, const Vec3& x) {
    double best = std::numeric_limits<double>::infinity();
    int best_panel = -1;
    double bxi = 0.0, beta = 0.0;
    for (std::size_t i = 0; i < mesh.num_triangles(); ++i) {
        const PanelGeometry g = mesh.panel(i);
        const Vec3 e1 = g.vertices[1] - g.vertices[0], e2 = g.vertices[2] - g.vertices[0];
        Eigen::Matrix2d A;
        A << e1.dot(e1), e1.dot(e2), e1.dot(e2), e2.dot(e2);
        const Eigen::Vector2d rhs(e1.dot(x - g.vertices[0]), e2.dot(x - g.vertices[0]));
        Eigen::Vector2d s = A.ldlt().solve(rhs);
        s = s.cwiseMax(0.0);
        if (s.sum() > 1.0) s /= s.sum();
        const double dist = (g.vertices[0] + s[0] * e1 + s[1] * e2 - x).norm();
        if (dist < best) {
            best = dist;
            best_panel = static_cast<int>(i);
            bxi = s[0];
            beta = s[1];
        }
    }
    if (best > 1e-9 * mesh.h()) throw DiscretizationError("point does not lie on the surface");
    return eval_density(d, t, best_panel, bxi, beta);
}

Eigen::SparseMatrix<double> mass_matrix(const SurfaceMesh& mesh, const SpaceBasis& test, const SpaceBasis& trial) {
    std::vector<Eigen::Triplet<double>> trip;
    const auto rule = triangle_rule_7();
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const double area = mesh.panel(t).area;
        for (int a = 0; a < test.local_count(); ++a) {
            const int i = test.dof(static_cast<int>(t), a);
            if (i < 0) continue;
            for (int b = 0; b < trial.local_count(); ++b) {
                const int j = trial.dof(static_cast<int>(t), b);
                if (j < 0) continue;
                double s = 0.0;
                for (const auto& q : rule) s += q.weight * test.shape(a, q.xi, q.eta) * trial.shape(b, q.xi, q.eta);
                trip.emplace_back(i, j, s * area);
            }
        }
    }
    Eigen::SparseMatrix<double> M(test.size(), trial.size());
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

Eigen::VectorXd project_space(const SpaceFunction& f, const SurfaceMesh& mesh, const SpaceBasis& basis) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(basis.size());
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const PanelGeometry g = mesh.panel(t);
        for (const auto& q : map_rule(g, triangle_rule_7())) {
            const double fv = f(q.x);
            for (int k = 0; k < basis.local_count(); ++k) {
                const int i = basis.dof(static_cast<int>(t), k);
                if (i >= 0) rhs[i] += q.weight * fv * basis.shape(k, q.xi, q.eta);
            }
        }
    }
    const Eigen::SparseMatrix<double> M = mass_matrix(mesh, basis, basis);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(M);
    if (ldlt.info() != Eigen::Success) throw DiscretizationError("singular Gram matrix");
    return ldlt.solve(rhs);
}

namespace {

// Gram matrix of the temporal basis restricted to [0, T] and the load vector.
void time_system(const TimeFunction& g, const TimeGrid& grid, int q, Eigen::MatrixXd& M, Eigen::VectorXd& b) {
    grid.validate();
    const int n = grid.nt;
    M = Eigen::MatrixXd::Zero(n, n);
    b = Eigen::VectorXd::Zero(n);
    const auto& gl = gauss_legendre(4);
    for (int c = 0; c < n; ++c)
        for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
            const double t = (c + gl.nodes[k]) * grid.dt, w = gl.weights[k] * grid.dt;
            const double gv = g(t);
            for (int m = std::max(0, c - 1); m <= c; ++m) {
                const double bm = time_basis_value(q, grid.dt, m, t);
                if (bm == 0.0) continue;
                b[m] += w * gv * bm;
                for (int l = std::max(0, c - 1); l <= c; ++l) M(m, l) += w * bm * time_basis_value(q, grid.dt, l, t);
            }
        }
}

}  // namespace

Eigen::VectorXd project_time(const TimeFunction& g, const TimeGrid& grid, int q) {
    if (q != 0 && q != 1) throw DiscretizationError("temporal degree must be 0 or 1");
    Eigen::MatrixXd M;
    Eigen::VectorXd b;
    time_system(g, grid, q, M, b);
    return M.ldlt().solve(b);
}

double space_l2_error(const SpaceFunction& f, const SurfaceMesh& mesh, const SpaceBasis& basis,
                      const Eigen::VectorXd& c) {
    const auto rule = triangle_rule_subdivided(2);
    double s = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
        for (const auto& q : map_rule(mesh.panel(t), rule)) {
            double v = f(q.x);
            for (int k = 0; k < basis.local_count(); ++k) {
                const int i = basis.dof(static_cast<int>(t), k);
                if (i >= 0) v -= c[i] * basis.shape(k, q.xi, q.eta);
            }
            s += q.weight * v * v;
        }
    return std::sqrt(s);
}

double time_l2_error(const TimeFunction& g, const TimeGrid& grid, int q, const Eigen::VectorXd& c) {
    const auto& gl = gauss_legendre(8);
    double s = 0.0;
    for (int n = 0; n < grid.nt; ++n)
        for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
            const double t = (n + gl.nodes[k]) * grid.dt;
            double v = g(t);
            for (int m = std::max(0, n - 1); m <= n; ++m) v -= c[m] * time_basis_value(q, grid.dt, m, t);
            s += gl.weights[k] * grid.dt * v * v;
        }
    return std::sqrt(s);
}

}  // namespace tdbem
