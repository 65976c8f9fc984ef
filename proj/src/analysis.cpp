#include "tdbem/analysis.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "tdbem/quadrature.hpp"

namespace tdbem {

namespace {

const cplx I(0.0, 1.0);

constexpr int kTimeGauss = 6;

bool is_half(double r, double v) { return std::abs(r - v) < 1e-12; }

// Space coefficient vector of d at time t, or of d_t d when derivative is set.
Eigen::VectorXd slice(const Density& d, double t, bool derivative) {
    const int n = d.basis.n_space();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    const int c = static_cast<int>(std::floor(t / d.dt));
    auto row = [&](int m) -> Eigen::VectorXd {
        if (m < 0 || m >= d.coeffs.rows()) return Eigen::VectorXd::Zero(n);
        return d.coeffs.row(m).transpose();
    };
    if (derivative) {
        if (d.basis.q != 1) throw AnalysisError("time derivative norm needs a q = 1 density");
        return (row(c) - row(c - 1)) / d.dt;
    }
    for (int m = c - d.basis.q; m <= c; ++m) {
        const double tb = time_basis_value(d.basis.q, d.dt, m, t);
        if (tb != 0.0) v += tb * row(m);
    }
    return v;
}

// Int_0^T e^{-2 sigma t} g(t) dt with Gauss rules on the cells of the density's grid.
template <class G>
double time_integral(double dt, int cells, double sigma, G&& g) {
    const auto& rule = gauss_legendre(kTimeGauss);
    double s = 0.0;
    for (int c = 0; c < cells; ++c)
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double t = (c + rule.nodes[q]) * dt;
            s += rule.weights[q] * dt * std::exp(-2.0 * sigma * t) * g(t);
        }
    return s;
}

// Cells of [0, T]; the tail of the last hat beyond T is outside the computed horizon.
int support_cells(const Density& d) { return static_cast<int>(d.coeffs.rows()); }

double l2_squared(const Density& d, const SurfaceMesh& mesh, double sigma, bool derivative) {
    const Eigen::SparseMatrix<double> M = mass_matrix(mesh, d.basis.space, d.basis.space);
    return time_integral(d.dt, support_cells(d), sigma, [&](double t) {
        const Eigen::VectorXd v = slice(d, t, derivative);
        return v.dot(M * v);
    });
}

double gram_squared(const Density& d, const Eigen::MatrixXd& G, double sigma, bool derivative) {
    if (G.rows() != d.basis.n_space() || G.cols() != G.rows()) throw AnalysisError("half-norm Gram has the wrong size");
    return time_integral(d.dt, support_cells(d), sigma, [&](double t) {
        const Eigen::VectorXd v = slice(d, t, derivative);
        return v.dot(G * v);
    });
}

Eigen::VectorXcd random_complex(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = cplx(N(rng), N(rng));
    return v;
}

bool hypotheses(const KernelParams& params, const MaterialField& material, cplx omega) {
    bool ok = params.alpha_inf.real() >= 0.0 && omega.imag() >= params.sigma;
    for (const cplx& a : material.alpha) ok = ok && a.real() > 0.0;
    return ok;
}

}  // namespace

void NormSpec::validate() const {
    if (s != 0 && s != 1) throw AnalysisError("norm: time index must be 0 or 1");
    if (!is_half(r, -0.5) && !is_half(r, 0.0) && !is_half(r, 0.5))
        throw AnalysisError("norm: space index must be -1/2, 0 or 1/2");
    if (!(sigma >= 0.0)) throw AnalysisError("norm: sigma must be non-negative");
    if (s == 1 && is_half(r, -0.5)) throw AnalysisError("norm: (s, r) = (1, -1/2) is not supported");
}

double energy_form(const ToeplitzBlocks& blocks, const Eigen::MatrixXd& coeffs) {
    if (coeffs.cols() != blocks.cols || blocks.rows != blocks.cols)
        throw AnalysisError("energy form: blocks and coefficients do not match");
    const int nt = static_cast<int>(coeffs.rows());
    double b = 0.0;
    for (int n = 0; n < nt; ++n) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(blocks.rows);
        for (int k = blocks.lag_min; k <= blocks.lag_max(); ++k) {
            const int m = n - k;
            if (m < 0 || m >= nt) continue;
            r += blocks.block(k) * coeffs.row(m).transpose();
        }
        b += std::exp(-2.0 * blocks.row_weight_sigma * n * blocks.dt) * coeffs.row(n).dot(r);
    }
    return b;
}

double weighted_st_norm(const Density& d, const NormSpec& spec, const SurfaceMesh& mesh, const NormData& data) {
    spec.validate();
    if (d.basis.n_space() != d.coeffs.cols()) throw AnalysisError("norm: density does not match its basis");
    if (is_half(spec.r, -0.5)) {
        if (!data.energy) throw AnalysisError("norm: the -1/2 surrogate needs energy blocks");
        if (std::abs(data.energy->row_weight_sigma - spec.sigma) > 1e-14)
            throw AnalysisError("norm: energy blocks were assembled with a different sigma");
        const double b = energy_form(*data.energy, d.coeffs);
        const double scale = d.coeffs.squaredNorm() * data.energy->dense(0).norm();
        if (b < -1e-10 * scale) throw AnalysisError("norm: negative energy " + std::to_string(b));
        return std::sqrt(std::max(b, 0.0));
    }
    double s2 = 0.0;
    if (is_half(spec.r, 0.0)) {
        s2 = l2_squared(d, mesh, spec.sigma, false);
        if (spec.s == 1) s2 += l2_squared(d, mesh, spec.sigma, true);
    } else {
        if (!data.half_gram) throw AnalysisError("norm: the 1/2 surrogate needs a Gram matrix");
        s2 = gram_squared(d, *data.half_gram, spec.sigma, false);
        if (spec.s == 1) s2 += gram_squared(d, *data.half_gram, spec.sigma, true);
    }
    return std::sqrt(std::max(s2, 0.0));
}

Eigen::MatrixXd half_norm_gram(const SurfaceMesh& mesh, const SpaceBasis& space, double s,
                               const FrequencyOptions& opts) {
    const SpaceBasis p0(mesh, 0);
    const Eigen::MatrixXd Y = assemble_yukawa(mesh, p0, s, opts);
    const Eigen::MatrixXd M = Eigen::MatrixXd(mass_matrix(mesh, p0, space));
    Eigen::LLT<Eigen::MatrixXd> llt(Y);
    if (llt.info() != Eigen::Success) throw AnalysisError("Yukawa matrix is not positive definite");
    const Eigen::MatrixXd G = M.transpose() * llt.solve(M);
    return 0.5 * (G + G.transpose());
}

double AcousticNorm::total() const { return std::sqrt(p * p + phi_half * phi_half + dt_phi * dt_phi); }

AcousticNorm energy_norm_acoustic(const Density& phi, const Density& p, const SurfaceMesh& mesh, double sigma,
                                  const Eigen::MatrixXd& half_gram) {
    if (phi.basis.q != 1 || std::abs(phi.dt - p.dt) > 1e-14 * p.dt || phi.coeffs.rows() != p.coeffs.rows())
        throw AnalysisError("acoustic norm: phi needs q = 1 on the grid of p");
    AcousticNorm n;
    n.p = std::sqrt(l2_squared(p, mesh, sigma, false));
    n.phi_half = std::sqrt(std::max(0.0, gram_squared(phi, half_gram, sigma, false)));
    n.dt_phi = std::sqrt(l2_squared(phi, mesh, sigma, true));
    return n;
}

AcousticNorm acoustic_error(const Density& phi, const Density& p, const AcousticExact& exact, const SurfaceMesh& mesh,
                            double sigma, const Eigen::MatrixXd& yukawa_p0) {
    if (phi.basis.q != 1 || std::abs(phi.dt - p.dt) > 1e-14 * p.dt || phi.coeffs.rows() != p.coeffs.rows())
        throw AnalysisError("acoustic error: phi needs q = 1 on the grid of p");
    const int np = static_cast<int>(mesh.num_triangles());
    if (yukawa_p0.rows() != np) throw AnalysisError("acoustic error: Yukawa matrix must be on piecewise constants");
    Eigen::LLT<Eigen::MatrixXd> llt(yukawa_p0);
    if (llt.info() != Eigen::Success) throw AnalysisError("Yukawa matrix is not positive definite");
    std::vector<std::vector<PhysicalPoint>> pts(np);
    for (int i = 0; i < np; ++i) pts[i] = map_rule(mesh.panel(i), triangle_rule_7());
    const int cells = static_cast<int>(p.coeffs.rows());
    double ep = 0.0, ed = 0.0, eh = 0.0;
    const auto& rule = gauss_legendre(kTimeGauss);
    for (int c = 0; c < cells; ++c)
        for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
            const double t = (c + rule.nodes[g]) * p.dt;
            const double w = rule.weights[g] * p.dt * std::exp(-2.0 * sigma * t);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(np);
            for (int i = 0; i < np; ++i)
                for (const auto& q : pts[i]) {
                    const double dp = eval_density(p, t, i, q.xi, q.eta) - exact.p(t, q.x, i);
                    const double dd = eval_density_dt(phi, t, i, q.xi, q.eta) - exact.dt_phi(t, q.x);
                    ep += w * q.weight * dp * dp;
                    ed += w * q.weight * dd * dd;
                    b[i] += q.weight * (eval_density(phi, t, i, q.xi, q.eta) - exact.phi(t, q.x));
                }
            eh += w * b.dot(llt.solve(b));
        }
    return {std::sqrt(ep), std::sqrt(std::max(eh, 0.0)), std::sqrt(ed)};
}

Density prolongate(const Density& coarse, const SurfaceMesh& coarse_mesh, const SurfaceMesh& fine_mesh,
                   const SpaceTimeBasis& fine_basis, double fine_dt) {
    if (fine_basis.q != coarse.basis.q || fine_basis.space.degree() != coarse.basis.space.degree())
        throw AnalysisError("prolongate: bases differ in degree");
    const double ratio = coarse.dt / fine_dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0) throw AnalysisError("prolongate: time grids are not nested");
    Density f(fine_basis, fine_dt);
    const int q = fine_basis.q;
    const auto& sb = fine_basis.space;
    for (int m = 0; m < fine_basis.n_time; ++m) {
        const double t = q == 0 ? (m + 0.5) * fine_dt : (m + 1) * fine_dt;
        for (int i = 0; i < static_cast<int>(fine_mesh.num_triangles()); ++i) {
            const PanelGeometry g = fine_mesh.panel(i);
            for (int k = 0; k < sb.local_count(); ++k) {
                const int dof = sb.dof(i, k);
                if (dof < 0) continue;
                const Vec3 x = sb.degree() == 0 ? g.centroid : g.vertices[k];
                f.coeffs(m, dof) = eval_density(coarse, coarse_mesh, t, x);
            }
        }
    }
    return f;
}

double form_value(const FrequencySystem& sys, const CVector& U) { return (U.adjoint() * sys.A * U)(0, 0).real(); }

CoercivityReport coercivity_check(const SurfaceMesh& mesh, cplx omega, const KernelParams& params,
                                  const MaterialField& material, int trials, unsigned seed,
                                  const FrequencyOptions& opts) {
    if (trials < 1) throw AnalysisError("coercivity: need at least one trial");
    const FrequencySystem sys = assemble_frequency_system(mesh, omega, params, material, opts);
    CoercivityReport r;
    r.omega = omega;
    r.trials = trials;
    r.hypotheses_hold = hypotheses(params, material, omega);
    r.min_form = r.min_single_layer = INFINITY;
    std::mt19937_64 rng(seed);
    const CMatrix Vs = -I * omega * sys.V;
    for (int k = 0; k < trials; ++k) {
        const CVector U = random_complex(sys.n_phi() + sys.n_p(), rng);
        r.min_form = std::min(r.min_form, form_value(sys, U) / U.squaredNorm());
        const CVector p = random_complex(sys.n_p(), rng);
        r.min_single_layer = std::min(r.min_single_layer, (p.adjoint() * Vs * p)(0, 0).real() / p.squaredNorm());
    }
    return r;
}

TimeCoercivityReport time_coercivity_check(const SurfaceMesh& mesh, const TimeGrid& grid, const KernelParams& params,
                                           const MaterialField& material, int trials, unsigned seed,
                                           const AssemblyOptions& opts) {
    if (trials < 1) throw AnalysisError("coercivity: need at least one trial");
    if (!(grid.sigma > 0.0)) throw AnalysisError("time coercivity needs sigma > 0");
    AssemblyOptions o = opts;
    o.weight_sigma = grid.sigma;
    const AcousticBlocks ab = assemble_acoustic_blocks(mesh, grid, params, material, o);
    const ToeplitzBlocks A = ab.monolithic();
    const int n1 = ab.phi_basis.n_space(), n2 = ab.p_basis.n_space(), nt = grid.nt;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    TimeCoercivityReport r;
    r.trials = trials;
    r.min_form = INFINITY;
    for (int k = 0; k < trials; ++k) {
        // the last hat is left out so that every test function ends inside [0, T]
        Eigen::MatrixXd x = Eigen::MatrixXd::Zero(nt, n1 + n2);
        for (int n = 0; n < nt; ++n)
            for (int j = 0; j < n1 + n2; ++j)
                if (j >= n1 || n < nt - 1) x(n, j) = N(rng);
        Eigen::MatrixXd test = x;
        for (int n = 0; n < nt; ++n) {
            const Eigen::RowVectorXd prev = n > 0 ? Eigen::RowVectorXd(x.row(n - 1).head(n1)) : Eigen::RowVectorXd::Zero(n1);
            test.row(n).head(n1) = (x.row(n).head(n1) - prev) / grid.dt;
        }
        double a = 0.0;
        for (int n = 0; n < nt; ++n) {
            Eigen::VectorXd row = Eigen::VectorXd::Zero(A.rows);
            for (int l = A.lag_min; l <= A.lag_max(); ++l) {
                const int m = n - l;
                if (m >= 0 && m < nt) row += A.block(l) * x.row(m).transpose();
            }
            a += std::exp(-2.0 * A.row_weight_sigma * n * grid.dt) * test.row(n).dot(row);
        }
        r.min_form = std::min(r.min_form, a / x.squaredNorm());
    }
    return r;
}

ContinuityReport continuity_check(const SurfaceMesh& mesh, cplx omega, const KernelParams& params,
                                  const MaterialField& material, int trials, unsigned seed,
                                  const FrequencyOptions& opts) {
    if (trials < 1) throw AnalysisError("continuity: need at least one trial");
    const FrequencySystem sys = assemble_frequency_system(mesh, omega, params, material, opts);
    const int n1 = sys.n_phi(), n2 = sys.n_p();
    const Eigen::MatrixXd M1 = Eigen::MatrixXd(mass_matrix(mesh, sys.phi_space, sys.phi_space));
    const Eigen::MatrixXd M2 = Eigen::MatrixXd(mass_matrix(mesh, sys.p_space, sys.p_space));
    const Eigen::MatrixXd G = half_norm_gram(mesh, sys.phi_space, 1.0, opts);
    Eigen::MatrixXd N = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
    N.topLeftCorner(n1, n1) = std::norm(omega) * M1 + G;
    N.bottomRightCorner(n2, n2) = M2;
    auto norm = [&](const CVector& U) { return std::sqrt((U.adjoint() * N * U)(0, 0).real()); };
    std::mt19937_64 rng(seed);
    ContinuityReport r;
    r.trials = trials;
    for (int k = 0; k < trials; ++k) {
        const CVector U = random_complex(n1 + n2, rng), W = random_complex(n1 + n2, rng);
        r.max_ratio = std::max(r.max_ratio, std::abs((W.adjoint() * sys.A * U)(0, 0)) / (norm(U) * norm(W)));
    }
    return r;
}

double transform_consistency(const ToeplitzBlocks& blocks, const PiecewisePoly& correlation,
                             const std::vector<cplx>& omegas, const std::function<CMatrix(cplx)>& frequency_matrix) {
    double worst = 0.0;
    for (const cplx& w : omegas) {
        if (w.imag() < 0.5) throw AnalysisError("transform consistency needs Im omega >= 0.5");
        CMatrix S = CMatrix::Zero(blocks.rows, blocks.cols);
        for (int k = blocks.lag_min; k <= blocks.lag_max(); ++k)
            S += blocks.dense(k).cast<cplx>() * std::exp(I * w * (k * blocks.dt));
        const CMatrix X = (correlation.fourier(-w) / blocks.dt) * frequency_matrix(w);
        worst = std::max(worst, (S - X).norm() / X.norm());
    }
    return worst;
}

double estimate_rate(const std::vector<double>& errors, const std::vector<double>& steps) {
    if (errors.size() != steps.size() || errors.size() < 3) throw AnalysisError("rate: need at least 3 matching points");
    const int n = static_cast<int>(errors.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!(errors[i] > 0.0) || !(steps[i] > 0.0)) throw AnalysisError("rate: errors and steps must be positive");
        const double x = std::log(steps[i]), y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    if (!(den > 0.0)) throw AnalysisError("rate: steps must not all be equal");
    return (n * sxy - sx * sy) / den;
}

void append_json_record(const std::string& path, const std::string& operation, const nlohmann::json& inputs,
                        const nlohmann::json& metrics) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot append to " + path);
    out << nlohmann::json{{"operation", operation}, {"inputs", inputs}, {"metrics", metrics}}.dump() << '\n';
}

}  // namespace tdbem
