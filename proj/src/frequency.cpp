#include "tdbem/frequency.hpp"

#include <cmath>
#include <numbers>

#include "assembly_engine.hpp"
#include "tdbem/quadrature.hpp"

namespace tdbem {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
const cplx I(0.0, 1.0);

struct Term {
    bool shapes = true;
    cplx factor = 1.0;
    engine::PairWeight weight;
};

double shape3(int b, double xi, double eta) { return b == 0 ? 1.0 - xi - eta : (b == 1 ? xi : eta); }

void uniform_weight(double c, double w[3][3]) {
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) w[a][b] = c;
}

// Galerkin matrix (outer dofs x inner dofs) of G_w (single) or dG_w/dn_y (double).
CMatrix freq_engine(const SurfaceMesh& mesh, const SpaceBasis& outer, const SpaceBasis& inner, cplx omega,
                    const KernelParams& params, const FrequencyOptions& opts, const std::vector<Term>& terms,
                    bool dbl) {
    if (!(omega.imag() > 0.0)) throw KernelError("frequency assembly needs Im omega > 0");
    const int nt = static_cast<int>(terms.size());
    const int nout = outer.local_count(), nin = inner.local_count();
    const int np = static_cast<int>(mesh.num_triangles());
    const auto orule = engine::outer_rule(opts.outer_refine);
    const auto irule = engine::outer_rule(opts.inner_refine);
    const RadialGrid grid{opts.radial_h, 0.0};
    const bool corr = opts.correction && std::abs(params.alpha_inf) > 0.0;
    CMatrix A = CMatrix::Zero(outer.size(), inner.size());

    auto helm = [&](double r) { return std::exp(I * omega * r) / (kFourPi * r); };
    auto helm_dr = [&](double r) { return std::exp(I * omega * r) * (I * omega * r - 1.0) / (kFourPi * r * r); };

#pragma omp parallel
    {
        CMatrix local = CMatrix::Zero(outer.size(), inner.size());
        std::vector<cplx> acc_d(nt * 3), acc_i(nt * 3);
#pragma omp for schedule(dynamic)
        for (int i = 0; i < np; ++i) {
            const auto xs = map_rule(mesh.panel(i), orule);
            for (int j = 0; j < np; ++j) {
                const PanelGeometry Pj = mesh.panel(j);
                const PanelGeometry Pr = reflect_panel(Pj);
                std::vector<std::array<std::array<double, 3>, 3>> wd(nt), wi(nt);
                for (int t = 0; t < nt; ++t) {
                    double w[3][3];
                    terms[t].weight(i, j, false, w);
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b) wd[t][a][b] = w[a][b];
                    terms[t].weight(i, j, true, w);
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b) wi[t][a][b] = w[a][b];
                }
                const auto ys = corr ? map_rule(Pj, irule) : std::vector<PhysicalPoint>{};
                for (const auto& xq : xs) {
                    std::fill(acc_d.begin(), acc_d.end(), cplx(0.0));
                    std::fill(acc_i.begin(), acc_i.end(), cplx(0.0));
                    auto add = [&](std::vector<cplx>& acc, cplx v, double bxi, double beta) {
                        for (int t = 0; t < nt; ++t) {
                            if (terms[t].shapes && nin == 3)
                                for (int b = 0; b < 3; ++b) acc[t * 3 + b] += v * shape3(b, bxi, beta);
                            else
                                acc[t * 3] += v;
                        }
                    };
                    auto polar = [&](const PanelGeometry& P, std::vector<cplx>& acc) {
                        const Vec3 n = P.normal;
                        if (dbl && std::abs((P.vertices[0] - xq.x).dot(n)) <= 1e-14 * P.diameter) return;
                        integrate_polar(xq.x, P, grid, opts.polar, [&](const PolarPoint& p) {
                            const cplx v = dbl ? helm_dr(p.r) * ((p.y - xq.x).dot(n) / p.r) : helm(p.r);
                            add(acc, p.weight * v, p.bxi, p.beta);
                        });
                    };
                    if (opts.free_space) polar(Pj, acc_d);
                    if (opts.image) polar(Pr, acc_i);
                    for (const auto& yq : ys) {
                        const PointPair pp = PointPair::make(xq.x, yq.x);
                        const CorrectionTerms c = g_omega_correction(pp, omega, params, dbl);
                        cplx v = c.value;
                        if (dbl) {
                            const Vec3 dh(yq.x.x() - xq.x.x(), yq.x.y() - xq.x.y(), 0.0);
                            v = c.d_per_R * dh.dot(Pj.normal) + c.d_dz * Pj.normal.z();
                        }
                        add(acc_i, yq.weight * v, yq.xi, yq.eta);
                    }
                    for (int a = 0; a < nout; ++a) {
                        const int ia = outer.dof(i, a);
                        if (ia < 0) continue;
                        for (int t = 0; t < nt; ++t) {
                            const bool s = terms[t].shapes;
                            const double fa = xq.weight * (s && nout == 3 ? shape3(a, xq.xi, xq.eta) : 1.0);
                            for (int b = 0; b < nin; ++b) {
                                const int jb = inner.dof(j, b);
                                if (jb < 0) continue;
                                const int bb = (s && nin == 3) ? b : 0;
                                local(ia, jb) += terms[t].factor * fa *
                                                 (wd[t][a][b] * acc_d[t * 3 + bb] + wi[t][a][b] * acc_i[t * 3 + bb]);
                            }
                        }
                    }
                }
            }
        }
#pragma omp critical
        A += local;
    }
    return A;
}

Term plain(double c) {
    return {true, 1.0, [c](int, int, bool, double w[3][3]) { uniform_weight(c, w); }};
}

}  // namespace

CMatrix assemble_V_omega(const SurfaceMesh& mesh, const SpaceBasis& test, const SpaceBasis& trial, cplx omega,
                         const KernelParams& params, const FrequencyOptions& opts) {
    params.validate();
    return freq_engine(mesh, test, trial, omega, params, opts, {plain(2.0)}, false);
}

CMatrix assemble_K_omega(const SurfaceMesh& mesh, const SpaceBasis& test, const SpaceBasis& trial, cplx omega,
                         const KernelParams& params, const FrequencyOptions& opts) {
    params.validate();
    return freq_engine(mesh, test, trial, omega, params, opts, {plain(2.0)}, true);
}

CMatrix assemble_Kp_omega(const SurfaceMesh& mesh, const SpaceBasis& test, const SpaceBasis& trial, cplx omega,
                          const KernelParams& params, const FrequencyOptions& opts) {
    params.validate();
    return freq_engine(mesh, trial, test, omega, params, opts, {plain(2.0)}, true).transpose();
}

CMatrix assemble_W_omega(const SurfaceMesh& mesh, const SpaceBasis& test, const SpaceBasis& trial, cplx omega,
                         const KernelParams& params, const FrequencyOptions& opts) {
    params.validate();
    if (test.degree() != 1 || trial.degree() != 1) throw AssemblyError("W_omega: needs p = 1 on both sides");
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
    Term c_curl{false, 1.0, [&](int i, int j, bool img, double w[3][3]) {
                    const auto& cj = img ? curl_img[j] : curl[j];
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b) w[a][b] = -2.0 * curl[i][a].dot(cj[b]);
                }};
    Term c_nn{true, -omega * omega, [&](int i, int j, bool img, double w[3][3]) {
                  uniform_weight(-2.0 * nrm[i].dot(img ? nrm_img[j] : nrm[j]), w);
              }};
    return freq_engine(mesh, test, trial, omega, params, opts, {c_curl, c_nn}, false);
}

Eigen::MatrixXd assemble_yukawa(const SurfaceMesh& mesh, const SpaceBasis& basis, double s,
                                const FrequencyOptions& opts) {
    if (!(s > 0.0)) throw KernelError("Yukawa kernel needs a positive decay rate");
    FrequencyOptions o = opts;
    o.image = false;
    o.correction = false;
    o.free_space = true;
    const CMatrix A = freq_engine(mesh, basis, basis, cplx(0.0, s), KernelParams{0.0, s}, o, {plain(2.0)}, false);
    const Eigen::MatrixXd Re = A.real();
    return 0.5 * (Re + Re.transpose());
}

CMatrix weighted_mass_complex(const SurfaceMesh& mesh, const SpaceBasis& test, const SpaceBasis& trial,
                              const std::vector<cplx>& w) {
    const int np = static_cast<int>(mesh.num_triangles());
    CMatrix M = CMatrix::Zero(test.size(), trial.size());
    const auto rule = triangle_rule_7();
    for (int i = 0; i < np; ++i)
        for (const auto& q : map_rule(mesh.panel(i), rule))
            for (int a = 0; a < test.local_count(); ++a) {
                const int ia = test.dof(i, a);
                if (ia < 0) continue;
                for (int b = 0; b < trial.local_count(); ++b) {
                    const int jb = trial.dof(i, b);
                    if (jb >= 0) M(ia, jb) += w[i] * q.weight * test.shape(a, q.xi, q.eta) * trial.shape(b, q.xi, q.eta);
                }
            }
    return M;
}

FrequencySystem assemble_frequency_system(const SurfaceMesh& mesh, cplx omega, const KernelParams& params,
                                          const MaterialField& material, const FrequencyOptions& opts) {
    if (material.alpha.size() != mesh.num_triangles()) throw AssemblyError("material: one value per panel expected");
    if (!material.invertible()) throw AssemblyError("material: alpha must be invertible");
    FrequencySystem s;
    s.omega = omega;
    s.phi_space = SpaceBasis(mesh, 1);
    s.p_space = SpaceBasis(mesh, 0);
    s.V = assemble_V_omega(mesh, s.p_space, s.p_space, omega, params, opts);
    s.K = assemble_K_omega(mesh, s.p_space, s.phi_space, omega, params, opts);
    s.Kp = assemble_Kp_omega(mesh, s.phi_space, s.p_space, omega, params, opts);
    s.W = assemble_W_omega(mesh, s.phi_space, s.phi_space, omega, params, opts);
    std::vector<cplx> inv(material.alpha.size());
    for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / material.alpha[i];
    s.M_alpha = weighted_mass_complex(mesh, s.phi_space, s.phi_space, material.alpha);
    s.M_inv = weighted_mass_complex(mesh, s.p_space, s.p_space, inv);
    const int n1 = s.n_phi(), n2 = s.n_p();
    const cplx wb = std::conj(omega);
    s.A = CMatrix::Zero(n1 + n2, n1 + n2);
    s.A.topLeftCorner(n1, n1) = std::norm(omega) * s.M_alpha - I * wb * s.W;
    s.A.topRightCorner(n1, n2) = I * wb * s.Kp;
    s.A.bottomLeftCorner(n2, n1) = I * omega * s.K;
    s.A.bottomRightCorner(n2, n2) = s.M_inv - I * omega * s.V;
    return s;
}

}  // namespace tdbem
