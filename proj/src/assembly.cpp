#include "tdbem/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "assembly_engine.hpp"
#include "tdbem/quadrature.hpp"

namespace tdbem {

std::string to_string(OperatorTag tag) {
    switch (tag) {
        case OperatorTag::V: return "V";
        case OperatorTag::K: return "K";
        case OperatorTag::Kp: return "Kp";
        case OperatorTag::W: return "W";
        case OperatorTag::Malpha: return "Malpha";
        case OperatorTag::Minvalpha: return "Minvalpha";
        case OperatorTag::Custom: return "Custom";
    }
    return "Custom";
}

Eigen::SparseMatrix<double> ToeplitzBlocks::block(int k) const {
    if (k < lag_min || k > lag_max()) return Eigen::SparseMatrix<double>(rows, cols);
    return blocks[k - lag_min];
}

ToeplitzBlocks ToeplitzBlocks::truncated(int k_max) const {
    ToeplitzBlocks t = *this;
    const int keep = std::max(0, k_max - lag_min + 1);
    if (static_cast<int>(t.blocks.size()) > keep) t.blocks.resize(keep);
    return t;
}

ToeplitzBlocks operator+(const ToeplitzBlocks& a, const ToeplitzBlocks& b) {
    if (a.blocks.empty()) return b;
    if (b.blocks.empty()) return a;
    if (a.rows != b.rows || a.cols != b.cols) throw AssemblyError("ToeplitzBlocks: size mismatch in sum");
    if (std::abs(a.dt - b.dt) > 1e-14 * a.dt || a.row_weight_sigma != b.row_weight_sigma)
        throw AssemblyError("ToeplitzBlocks: incompatible time grids in sum");
    ToeplitzBlocks s;
    s.tag = a.tag == b.tag ? a.tag : OperatorTag::Custom;
    s.dt = a.dt;
    s.rows = a.rows;
    s.cols = a.cols;
    s.row_weight_sigma = a.row_weight_sigma;
    s.lag_min = std::min(a.lag_min, b.lag_min);
    const int hi = std::max(a.lag_max(), b.lag_max());
    for (int k = s.lag_min; k <= hi; ++k) s.blocks.push_back(a.block(k) + b.block(k));
    return s;
}

ToeplitzBlocks operator*(double c, const ToeplitzBlocks& a) {
    ToeplitzBlocks s = a;
    for (auto& m : s.blocks) m *= c;
    return s;
}

MaterialField MaterialField::constant(const SurfaceMesh& mesh, cplx a) {
    return {std::vector<cplx>(mesh.num_triangles(), a)};
}

bool MaterialField::invertible() const {
    return std::all_of(alpha.begin(), alpha.end(), [](cplx a) { return std::abs(a) > 0.0; });
}

void MaterialField::validate_acoustic() const {
    for (const auto& a : alpha)
        if (!(a.real() > 0.0)) throw AssemblyError("material: Re alpha must be positive on every panel");
}

std::vector<double> MaterialField::real_values() const {
    std::vector<double> r;
    for (const auto& a : alpha) {
        if (std::abs(a.imag()) > 1e-14 * std::max(1.0, std::abs(a)))
            throw AssemblyError("material: time-domain assembly needs real alpha");
        r.push_back(a.real());
    }
    return r;
}

namespace {

// Test shape times the cellwise Taylor polynomial of e^{-2 sigma (t - t_n)}.
PiecewisePoly weighted_test_shape(int q, double dt, double sigma, int degree) {
    const PiecewisePoly a = time_shape(q, dt);
    if (sigma == 0.0) return a;
    const PiecewisePoly w0 = exp_weighted_box(dt, sigma, degree);
    PiecewisePoly w = w0;
    for (int c = 1; c < a.end(); ++c) w = w + w0.shifted(c).scaled(std::exp(-2.0 * sigma * c * dt));
    return a.multiplied(w);
}

engine::LagRange lag_range(const TimeGrid& grid, const AssemblyOptions& opts) {
    engine::LagRange r{opts.lag_min, opts.lag_max < 0 ? grid.nt - 1 : opts.lag_max};
    if (r.lag_max < r.lag_min) throw AssemblyError("assembly: empty lag range");
    return r;
}

void check_bases(const SpaceTimeBasis& trial, const SpaceTimeBasis& test, const TimeGrid& grid) {
    grid.validate();
    if (trial.q < 0 || trial.q > 1 || test.q < 0 || test.q > 1) throw AssemblyError("assembly: q must be 0 or 1");
    if (trial.n_space() == 0 || test.n_space() == 0) throw AssemblyError("assembly: empty space basis");
}

}  // namespace

PiecewisePoly time_correlation(int q_trial, int q_test, double dt, int trial_derivatives, double weight_sigma,
                               int weight_degree) {
    if (trial_derivatives < 0) throw AssemblyError("time_correlation: negative derivative order");
    PiecewisePoly c = correlate(time_shape(q_trial, dt), weighted_test_shape(q_test, dt, weight_sigma, weight_degree));
    for (int j = 0; j < trial_derivatives; ++j) {
        // interior jumps of the last derivative are harmless (kernel integrals only)
        if (j + 1 == trial_derivatives) {
            try {
                c = c.derivative();
            } catch (const std::domain_error&) {
                std::vector<Poly> pieces;
                for (const auto& p : c.pieces()) pieces.push_back(poly::scale(poly::derivative(p), 1.0 / dt));
                c = PiecewisePoly(dt, c.origin(), pieces);
            }
        } else {
            c = c.derivative();
        }
        c = c.scaled(-1.0);
    }
    return c;
}

ToeplitzBlocks assemble_V_blocks(const SurfaceMesh& mesh, const TimeGrid& grid, const SpaceTimeBasis& trial,
                                 const SpaceTimeBasis& test, const KernelParams& params, const AssemblyOptions& opts,
                                 int trial_time_derivative) {
    check_bases(trial, test, grid);
    params.validate();
    const auto lags = lag_range(grid, opts);
    engine::Channel ch{time_correlation(trial.q, test.q, grid.dt, trial_time_derivative, opts.weight_sigma,
                                        opts.weight_degree),
                       true, [](int, int, bool, double w[3][3]) {
                           for (int a = 0; a < 3; ++a)
                               for (int b = 0; b < 3; ++b) w[a][b] = 2.0;
                       }};
    const auto dense = engine::single_layer(mesh, grid.dt, test.space, trial.space, {ch}, params.real_alpha(), opts,
                                            lags);
    return engine::to_blocks(dense, OperatorTag::V, grid.dt, lags.lag_min, opts.weight_sigma);
}

ToeplitzBlocks assemble_K_blocks(const SurfaceMesh& mesh, const TimeGrid& grid, const SpaceTimeBasis& trial,
                                 const SpaceTimeBasis& test, const KernelParams& params, const AssemblyOptions& opts,
                                 int trial_time_derivative) {
    check_bases(trial, test, grid);
    params.validate();
    const auto lags = lag_range(grid, opts);
    const PiecewisePoly D =
        time_correlation(trial.q, test.q, grid.dt, trial_time_derivative, opts.weight_sigma, opts.weight_degree);
    if (D.max_jump() > 1e-9) throw AssemblyError("K: time correlation must be continuous");
    const auto dense = engine::double_layer(mesh, grid.dt, test.space, trial.space, D, params.real_alpha(), opts,
                                            lags, false);
    return engine::to_blocks(dense, OperatorTag::K, grid.dt, lags.lag_min, opts.weight_sigma);
}

ToeplitzBlocks assemble_Kp_blocks(const SurfaceMesh& mesh, const TimeGrid& grid, const SpaceTimeBasis& trial,
                                  const SpaceTimeBasis& test, const KernelParams& params,
                                  const AssemblyOptions& opts) {
    check_bases(trial, test, grid);
    params.validate();
    const auto lags = lag_range(grid, opts);
    const PiecewisePoly D = time_correlation(trial.q, test.q, grid.dt, 0, opts.weight_sigma, opts.weight_degree);
    if (D.max_jump() > 1e-9) throw AssemblyError("K': time correlation must be continuous");
    // G is symmetric in (x, y): the x-normal derivative is a double layer seen from the trial panel.
    const auto dense = engine::double_layer(mesh, grid.dt, trial.space, test.space, D, params.real_alpha(), opts,
                                            lags, true);
    return engine::to_blocks(dense, OperatorTag::Kp, grid.dt, lags.lag_min, opts.weight_sigma);
}

ToeplitzBlocks assemble_W_blocks(const SurfaceMesh& mesh, const TimeGrid& grid, const SpaceTimeBasis& trial,
                                 const SpaceTimeBasis& test, const KernelParams& params,
                                 const AssemblyOptions& opts) {
    check_bases(trial, test, grid);
    params.validate();
    if (trial.space.degree() != 1 || test.space.degree() != 1 || trial.q != 1)
        throw AssemblyError("W: needs p = 1 trial and test functions and q = 1 in time");
    const auto lags = lag_range(grid, opts);
    const int np = static_cast<int>(mesh.num_triangles());
    const Eigen::Matrix3d Rm = Eigen::Vector3d(1.0, 1.0, -1.0).asDiagonal();
    std::vector<std::array<Vec3, 3>> curl(np), curl_img(np);
    std::vector<Vec3> nrm(np), nrm_img(np);
    for (int i = 0; i < np; ++i) {
        const PanelGeometry g = mesh.panel(i);
        nrm[i] = g.normal;
        nrm_img[i] = Rm * g.normal;
        for (int k = 0; k < 3; ++k) {
            const Vec3 grad = SpaceBasis::shape_gradient(g, k);
            curl[i][k] = g.normal.cross(grad);
            curl_img[i][k] = nrm_img[i].cross(Rm * grad);
        }
    }
    engine::Channel c_curl{time_correlation(1, test.q, grid.dt, 0, opts.weight_sigma, opts.weight_degree), false,
                           [&](int i, int j, bool img, double w[3][3]) {
                               const auto& cj = img ? curl_img[j] : curl[j];
                               for (int a = 0; a < 3; ++a)
                                   for (int b = 0; b < 3; ++b) w[a][b] = -2.0 * curl[i][a].dot(cj[b]);
                           }};
    engine::Channel c_nn{time_correlation(1, test.q, grid.dt, 2, opts.weight_sigma, opts.weight_degree), true,
                         [&](int i, int j, bool img, double w[3][3]) {
                             const double d = -2.0 * nrm[i].dot(img ? nrm_img[j] : nrm[j]);
                             for (int a = 0; a < 3; ++a)
                                 for (int b = 0; b < 3; ++b) w[a][b] = d;
                         }};
    const auto dense = engine::single_layer(mesh, grid.dt, test.space, trial.space, {c_curl, c_nn},
                                            params.real_alpha(), opts, lags);
    return engine::to_blocks(dense, OperatorTag::W, grid.dt, lags.lag_min, opts.weight_sigma);
}

namespace {

Eigen::SparseMatrix<double> weighted_mass(const SurfaceMesh& mesh, const SpaceBasis& test, const SpaceBasis& trial,
                                          const std::vector<double>& w) {
    std::vector<Eigen::Triplet<double>> trip;
    const auto rule = triangle_rule_7();
    for (int i = 0; i < static_cast<int>(mesh.num_triangles()); ++i) {
        const auto pts = map_rule(mesh.panel(i), rule);
        for (int a = 0; a < test.local_count(); ++a) {
            const int ia = test.dof(i, a);
            if (ia < 0) continue;
            for (int b = 0; b < trial.local_count(); ++b) {
                const int jb = trial.dof(i, b);
                if (jb < 0) continue;
                double v = 0.0;
                for (const auto& q : pts) v += q.weight * test.shape(a, q.xi, q.eta) * trial.shape(b, q.xi, q.eta);
                trip.emplace_back(ia, jb, w[i] * v);
            }
        }
    }
    Eigen::SparseMatrix<double> m(test.size(), trial.size());
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

}  // namespace

ToeplitzBlocks assemble_time_mass(const SurfaceMesh& mesh, const TimeGrid& grid, const SpaceTimeBasis& trial,
                                  const SpaceTimeBasis& test, const std::vector<double>& panel_weight,
                                  int trial_time_derivative, const AssemblyOptions& opts) {
    check_bases(trial, test, grid);
    if (panel_weight.size() != mesh.num_triangles()) throw AssemblyError("time mass: one weight per panel expected");
    const PiecewisePoly C =
        time_correlation(trial.q, test.q, grid.dt, trial_time_derivative, opts.weight_sigma, opts.weight_degree);
    const auto M = weighted_mass(mesh, test.space, trial.space, panel_weight);
    ToeplitzBlocks tb;
    tb.tag = OperatorTag::Custom;
    tb.dt = grid.dt;
    tb.rows = static_cast<int>(M.rows());
    tb.cols = static_cast<int>(M.cols());
    tb.row_weight_sigma = opts.weight_sigma;
    const int lo = std::max(opts.lag_min, -C.end()), hi = std::min(-C.origin(), grid.nt - 1);
    tb.lag_min = lo;
    // C at the breakpoint -k dt as the mean of its one-sided limits, taken from the pieces exactly.
    for (int k = lo; k <= hi; ++k) {
        const int cell = -k;
        const Poly& left = C.cell(cell - 1);
        const Poly& right = C.cell(cell);
        const double c = 0.5 * ((left.empty() ? 0.0 : poly::eval(left, 1.0)) + (right.empty() ? 0.0 : poly::eval(right, 0.0)));
        tb.blocks.push_back(c * M);
    }
    if (tb.blocks.empty()) tb.lag_min = 0;
    return tb;
}

ToeplitzBlocks AcousticBlocks::monolithic() const {
    const std::vector<std::vector<const ToeplitzBlocks*>> parts = {{&M_alpha, &W, &Kp}, {&K, &M_invalpha, &V}};
    const int r1 = test1_basis.n_space(), r2 = test2_basis.n_space();
    const int c1 = phi_basis.n_space(), c2 = p_basis.n_space();
    int lo = 0, hi = 0;
    for (const auto& row : parts)
        for (const auto* b : row) {
            lo = std::min(lo, b->lag_min);
            hi = std::max(hi, b->lag_max());
        }
    ToeplitzBlocks m;
    m.tag = OperatorTag::Custom;
    m.dt = V.dt;
    m.rows = r1 + r2;
    m.cols = c1 + c2;
    m.row_weight_sigma = V.row_weight_sigma;
    m.lag_min = lo;
    for (int k = lo; k <= hi; ++k) {
        std::vector<Eigen::Triplet<double>> trip;
        auto put = [&](const Eigen::SparseMatrix<double>& s, int r0, int cc0, double f) {
            for (int c = 0; c < s.outerSize(); ++c)
                for (Eigen::SparseMatrix<double>::InnerIterator it(s, c); it; ++it)
                    trip.emplace_back(r0 + it.row(), cc0 + it.col(), f * it.value());
        };
        put(M_alpha.block(k), 0, 0, 1.0);
        put(W.block(k), 0, 0, -1.0);
        put(Kp.block(k), 0, c1, 1.0);
        put(K.block(k), r1, 0, -1.0);
        put(M_invalpha.block(k), r1, c1, 1.0);
        put(V.block(k), r1, c1, 1.0);
        Eigen::SparseMatrix<double> b(m.rows, m.cols);
        b.setFromTriplets(trip.begin(), trip.end());
        m.blocks.push_back(b);
    }
    return m;
}

AcousticBlocks assemble_acoustic_blocks(const SurfaceMesh& mesh, const TimeGrid& grid, const KernelParams& params,
                                        const MaterialField& material, const AssemblyOptions& opts) {
    if (material.alpha.size() != mesh.num_triangles()) throw AssemblyError("material: one value per panel expected");
    material.validate_acoustic();
    const auto alpha = material.real_values();
    std::vector<double> inv(alpha.size());
    std::transform(alpha.begin(), alpha.end(), inv.begin(), [](double a) { return 1.0 / a; });
    AcousticBlocks s;
    s.phi_basis = make_basis(mesh, grid, 1, 1);
    s.p_basis = make_basis(mesh, grid, 0, 0);
    s.test1_basis = make_basis(mesh, grid, 1, 0);
    s.test2_basis = make_basis(mesh, grid, 0, 0);
    s.M_alpha = assemble_time_mass(mesh, grid, s.phi_basis, s.test1_basis, alpha, 1, opts);
    s.M_alpha.tag = OperatorTag::Malpha;
    s.M_invalpha = assemble_time_mass(mesh, grid, s.p_basis, s.test2_basis, inv, 0, opts);
    s.M_invalpha.tag = OperatorTag::Minvalpha;
    s.Kp = assemble_Kp_blocks(mesh, grid, s.p_basis, s.test1_basis, params, opts);
    s.W = assemble_W_blocks(mesh, grid, s.phi_basis, s.test1_basis, params, opts);
    s.V = assemble_V_blocks(mesh, grid, s.p_basis, s.test2_basis, params, opts, 1);
    s.K = assemble_K_blocks(mesh, grid, s.phi_basis, s.test2_basis, params, opts, 1);
    return s;
}

namespace {

// Int Int f(t, x) psi_{n,a}(t, x) e^{-2 sigma t} for every test function.
Eigen::MatrixXd project_rhs(const BoundaryFunction& f, const SurfaceMesh& mesh, const TimeGrid& grid,
                            const SpaceTimeBasis& test, double sigma, const std::vector<double>& panel_weight) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(test.n_time, test.n_space());
    const auto& gt = gauss_legendre(8);
    const auto srule = triangle_rule_subdivided(1);
    const int cells = test.n_time + test.q;
    for (int i = 0; i < static_cast<int>(mesh.num_triangles()); ++i) {
        const auto pts = map_rule(mesh.panel(i), srule);
        for (int c = 0; c < cells; ++c)
            for (std::size_t g = 0; g < gt.nodes.size(); ++g) {
                const double t = (c + gt.nodes[g]) * grid.dt;
                const double wt = gt.weights[g] * grid.dt * std::exp(-2.0 * sigma * t) * panel_weight[i];
                for (const auto& q : pts) {
                    const double v = wt * q.weight * f(t, q.x, i);
                    if (v == 0.0) continue;
                    for (int m = std::max(0, c - test.q); m <= std::min(test.n_time - 1, c); ++m) {
                        const double tb = time_basis_value(test.q, grid.dt, m, t);
                        if (tb == 0.0) continue;
                        for (int a = 0; a < test.space.local_count(); ++a) {
                            const int ia = test.space.dof(i, a);
                            if (ia >= 0) out(m, ia) += v * tb * test.space.shape(a, q.xi, q.eta);
                        }
                    }
                }
            }
    }
    return out;
}

}  // namespace

Eigen::MatrixXd assemble_rhs_dirichlet(const SpaceTimeFunction& f, const SurfaceMesh& mesh, const TimeGrid& grid,
                                       const SpaceTimeBasis& test, double sigma, const SpaceTimeFunction& df) {
    grid.validate();
    for (int i = 0; i < static_cast<int>(mesh.num_triangles()); ++i) {
        const Vec3 c = mesh.panel(i).centroid;
        if (std::abs(f(0.0, c)) > 1e-12 * (1.0 + std::abs(f(grid.horizon(), c))))
            throw AssemblyError("rhs: Dirichlet data must vanish at t = 0");
    }
    SpaceTimeFunction d = df;
    if (!d) {
        const double e = 1e-3 * grid.dt;
        d = [f, e](double t, const Vec3& x) {
            auto F = [&](double s) { return s <= 0.0 ? 0.0 : f(s, x); };
            return (-F(t + 2 * e) + 8 * F(t + e) - 8 * F(t - e) + F(t - 2 * e)) / (12 * e);
        };
    }
    return project_rhs([&d](double t, const Vec3& x, int) { return d(t, x); }, mesh, grid, test, sigma,
                       std::vector<double>(mesh.num_triangles(), 1.0));
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> assemble_rhs_acoustic(const BoundaryFunction& F,
                                                                  const BoundaryFunction& G, const SurfaceMesh& mesh,
                                                                  const TimeGrid& grid, const AcousticBlocks& sys,
                                                                  const MaterialField& material, double sigma) {
    const auto alpha = material.real_values();
    std::vector<double> inv(alpha.size());
    std::transform(alpha.begin(), alpha.end(), inv.begin(), [](double a) { return 1.0 / a; });
    return {project_rhs(F, mesh, grid, sys.test1_basis, sigma, std::vector<double>(mesh.num_triangles(), 1.0)),
            project_rhs(G, mesh, grid, sys.test2_basis, sigma, inv)};
}

}  // namespace tdbem
