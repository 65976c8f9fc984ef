#include "assembly_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tdbem/quadrature.hpp"
#include "tdbem/sigma_terms.hpp"

namespace tdbem::engine {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec3 reflect(const Vec3& y) { return {y.x(), y.y(), -y.z()}; }

double shape3(int b, double xi, double eta) { return b == 0 ? 1.0 - xi - eta : (b == 1 ? xi : eta); }

struct OuterPoint {
    Vec3 x;
    double w;
    double shape[3];
};

std::vector<OuterPoint> outer_points(const PanelGeometry& g, const std::vector<TrianglePoint>& rule,
                                     const SpaceBasis& basis) {
    std::vector<OuterPoint> pts;
    for (const auto& q : map_rule(g, rule)) {
        OuterPoint o{q.x, q.weight, {1.0, 0.0, 0.0}};
        if (basis.degree() == 1)
            for (int a = 0; a < 3; ++a) o.shape[a] = shape3(a, q.xi, q.eta);
        pts.push_back(o);
    }
    return pts;
}

// Accumulator acc[channel][lag][b].
class Acc {
public:
    Acc(int channels, int lags, int nb) : lags_(lags), nb_(nb), data_(static_cast<std::size_t>(channels) * lags * nb) {}
    void clear() { std::fill(data_.begin(), data_.end(), 0.0); }
    double& at(int c, int k, int b) { return data_[(static_cast<std::size_t>(c) * lags_ + k) * nb_ + b]; }

private:
    int lags_, nb_;
    std::vector<double> data_;
};

// Adds val * D(cell - k, xi) * shape_b into acc for every lag k touched by the cell.
template <class Eval>
inline void spread(Acc& acc, int ch, const TimeTable& D, const LagRange& lags, int cell, Eval&& eval, double val,
                   const double* shape, int nb) {
    const int k0 = std::max(lags.lag_min, cell - D.end() + 1), k1 = std::min(lags.lag_max, cell - D.origin());
    for (int k = k0; k <= k1; ++k) {
        const double v = val * eval(cell - k);
        if (v == 0.0) continue;
        for (int b = 0; b < nb; ++b) acc.at(ch, k - lags.lag_min, b) += v * shape[b];
    }
}

PolarOptions polar_for_degree(PolarOptions p, int degree) {
    p.n_radial = std::max(p.n_radial, (degree + 5) / 2);
    return p;
}

inline double sigma_smooth_fast(double u, double R2, double zp, double alpha) {
    const double a = u + alpha * zp;
    const double q = a * a + (alpha * alpha - 1.0) * R2;
    return (alpha / kTwoPi) * a / (q * std::sqrt(q));
}

// Smooth part of an absorbing tail, Int_{r-(y)}^inf h(u, y) E(u - k dt) du dy, integrated
// as Int A(u) E(u - k dt) du with A(u) the integral of h(u, .) lambda_b over the trial panel
// where r-(y) < u. A is generated on the reflected panel by a polar pass cut at u; its kinks
// (ball crossing edges or vertices) and the cell breakpoints split the u-range. Beyond the
// farthest vertex the cut is void and a tensor rule over far_pts is used. emit(sample, A).
template <class H, class Emit>
void sigma_tail(const Vec3& x, const PanelGeometry& Pr, const std::vector<PhysicalPoint>& far_pts, double dt,
                int j_end, const QuadratureRule1D& gu, const PolarOptions& pcut, H&& h, Emit&& emit) {
    const auto [dmin, dmax] = distance_range(x, Pr);
    const double u_end = j_end * dt;
    if (dmin >= u_end) return;
    std::vector<double> pts{dmin, std::min(dmax, u_end)};
    for (int c = static_cast<int>(std::floor(dmin / dt)) + 1; c * dt < std::min(dmax, u_end); ++c) pts.push_back(c * dt);
    const auto& v = Pr.vertices;
    for (int e = 0; e < 3; ++e) {
        pts.push_back((v[e] - x).norm());
        const Vec3 ab = v[(e + 1) % 3] - v[e];
        const double t = std::clamp((x - v[e]).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
        pts.push_back((v[e] + t * ab - x).norm());
    }
    std::sort(pts.begin(), pts.end());
    const double span = std::min(dmax, u_end);
    double A[3];
    for (std::size_t q = 0; q + 1 < pts.size(); ++q) {
        const double a = std::max(pts[q], dmin), b = std::min(pts[q + 1], span);
        if (b - a <= 1e-14 * (1.0 + b)) continue;
        const int cell = static_cast<int>(std::floor(0.5 * (a + b) / dt));
        for (std::size_t g = 0; g < gu.nodes.size(); ++g) {
            // u = a + (b - a)(3s^2 - 2s^3) absorbs the (u - kink)^{3/2} behaviour at both ends
            const double sn = gu.nodes[g];
            const double u = a + (b - a) * sn * sn * (3.0 - 2.0 * sn);
            const double wu = gu.weights[g] * (b - a) * 6.0 * sn * (1.0 - sn);
            A[0] = A[1] = A[2] = 0.0;
            integrate_polar(x, Pr, RadialGrid{u, 0.0}, pcut, [&](const PolarPoint& p) {
                const double val = p.weight * h(u, reflect(p.y));
                A[0] += val * shape3(0, p.bxi, p.beta);
                A[1] += val * shape3(1, p.bxi, p.beta);
                A[2] += val * shape3(2, p.bxi, p.beta);
            });
            emit(USample{cell, -1, u / dt - cell, wu}, A);
        }
    }
    if (dmax >= u_end) return;
    auto tensor = [&](double u, const USample& smp) {
        A[0] = A[1] = A[2] = 0.0;
        for (const auto& yq : far_pts) {
            const double val = yq.weight * h(u, yq.x);
            A[0] += val * shape3(0, yq.xi, yq.eta);
            A[1] += val * shape3(1, yq.xi, yq.eta);
            A[2] += val * shape3(2, yq.xi, yq.eta);
        }
        emit(smp, A);
    };
    const int j_star = static_cast<int>(std::floor(dmax / dt)) + 1;
    const double hi = std::min(j_star * dt, u_end);
    if (hi > dmax)
        for (std::size_t g = 0; g < gu.nodes.size(); ++g) {
            const double u = dmax + (hi - dmax) * gu.nodes[g];
            tensor(u, USample{j_star - 1, -1, u / dt - (j_star - 1), gu.weights[g] * (hi - dmax)});
        }
    for (int c = j_star; c < j_end; ++c)
        for (std::size_t g = 0; g < gu.nodes.size(); ++g)
            tensor((c + gu.nodes[g]) * dt, USample{c, static_cast<int>(g), gu.nodes[g], gu.weights[g] * dt});
}

}  // namespace

std::vector<TrianglePoint> outer_rule(int refine) {
    if (refine <= 0) {
        const auto r = triangle_rule_7();
        return {r.begin(), r.end()};
    }
    return triangle_rule_subdivided(refine);
}

ToeplitzBlocks to_blocks(const DenseBlocks& dense, OperatorTag tag, double dt, int lag_min, double row_sigma) {
    ToeplitzBlocks tb;
    tb.tag = tag;
    tb.dt = dt;
    tb.lag_min = lag_min;
    tb.row_weight_sigma = row_sigma;
    if (!dense.empty()) {
        tb.rows = static_cast<int>(dense.front().rows());
        tb.cols = static_cast<int>(dense.front().cols());
    }
    for (const auto& d : dense) tb.blocks.push_back(d.sparseView(0.0, 0.0));
    return tb;
}

DenseBlocks single_layer(const SurfaceMesh& mesh, double dt, const SpaceBasis& test, const SpaceBasis& trial,
                         const std::vector<Channel>& channels, double alpha, const AssemblyOptions& opts,
                         LagRange lags) {
    const int nch = static_cast<int>(channels.size());
    const int ntest = test.local_count(), ntrial = trial.local_count();
    const auto& gu = gauss_legendre(opts.n_time_gauss);
    std::vector<TimeTable> tables;
    int max_deg = 0, d_end = 0;
    for (const auto& c : channels) {
        tables.emplace_back(c.D, gu);
        max_deg = std::max(max_deg, c.D.degree());
        d_end = std::max(d_end, c.D.end());
    }
    const PolarOptions popt = polar_for_degree(opts.polar, max_deg);
    const PolarOptions pcut{4, 4, 1.0, 0};
    const RadialGrid rgrid{dt, 0.0};
    const auto orule = outer_rule(opts.outer_refine);
    const auto frule = outer_rule(opts.far_refine);
    const bool use_sigma = opts.sigma && alpha > 0.0;
    const int npanels = static_cast<int>(mesh.num_triangles());
    const int j_end = lags.lag_max + d_end;  // cells at or beyond j_end touch no kept lag

    DenseBlocks result(lags.count(), Eigen::MatrixXd::Zero(test.size(), trial.size()));

#pragma omp parallel
    {
        DenseBlocks local(lags.count(), Eigen::MatrixXd::Zero(test.size(), trial.size()));
        Acc acc_d(nch, lags.count(), 3), acc_i(nch, lags.count(), 3);
        const double one[3] = {1.0, 0.0, 0.0};

#pragma omp for schedule(dynamic)
        for (int i = 0; i < npanels; ++i) {
            const PanelGeometry Pi = mesh.panel(i);
            const auto xs = outer_points(Pi, orule, test);
            for (int j = 0; j < npanels; ++j) {
                const PanelGeometry Pj = mesh.panel(j);
                const PanelGeometry Pr = reflect_panel(Pj);
                std::vector<std::array<std::array<double, 3>, 3>> wd(nch), wi(nch);
                for (int c = 0; c < nch; ++c) {
                    double w[3][3];
                    channels[c].weight(i, j, false, w);
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b) wd[c][a][b] = w[a][b];
                    channels[c].weight(i, j, true, w);
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b) wi[c][a][b] = w[a][b];
                }
                const std::vector<PhysicalPoint> far_pts =
                    use_sigma ? map_rule(Pj, frule) : std::vector<PhysicalPoint>{};

                for (const auto& xq : xs) {
                    acc_d.clear();
                    acc_i.clear();
                    if (opts.free_space) {
                        integrate_polar(xq.x, Pj, rgrid, popt, [&](const PolarPoint& p) {
                            const double val = p.weight / (kFourPi * p.r);
                            const double sh[3] = {shape3(0, p.bxi, p.beta), shape3(1, p.bxi, p.beta),
                                                  shape3(2, p.bxi, p.beta)};
                            for (int c = 0; c < nch; ++c) {
                                const bool s = channels[c].shapes && ntrial == 3;
                                spread(acc_d, c, tables[c], lags, p.cell,
                                       [&](int cc) { return tables[c].value(cc, p.xi_cell); }, val, s ? sh : one,
                                       s ? 3 : 1);
                            }
                        });
                    }
                    if (opts.image || use_sigma) {
                        integrate_polar(xq.x, Pr, rgrid, popt, [&](const PolarPoint& p) {
                            const double sh[3] = {shape3(0, p.bxi, p.beta), shape3(1, p.bxi, p.beta),
                                                  shape3(2, p.bxi, p.beta)};
                            double kern = opts.image ? 1.0 / (kFourPi * p.r) : 0.0;
                            if (use_sigma) kern += -(alpha / kTwoPi) / (xq.x.z() - p.y.z() + alpha * p.r);
                            const double val = p.weight * kern;
                            for (int c = 0; c < nch; ++c) {
                                const bool s = channels[c].shapes && ntrial == 3;
                                spread(acc_i, c, tables[c], lags, p.cell,
                                       [&](int cc) { return tables[c].value(cc, p.xi_cell); }, val, s ? sh : one,
                                       s ? 3 : 1);
                            }
                        });
                    }
                    if (use_sigma) {
                        const Vec3 x = xq.x;
                        sigma_tail(
                            x, Pr, far_pts, dt, j_end, gu, pcut,
                            [&](double u, const Vec3& y) {
                                const double dx = x.x() - y.x(), dy = x.y() - y.y();
                                return sigma_smooth_fast(u, dx * dx + dy * dy, x.z() + y.z(), alpha);
                            },
                            [&](const USample& smp, const double* A) {
                                const double tot = A[0] + A[1] + A[2];
                                for (int c = 0; c < nch; ++c) {
                                    const bool s = channels[c].shapes && ntrial == 3;
                                    spread(acc_i, c, tables[c], lags, smp.cell,
                                           [&](int cc) { return tables[c].sample(cc, smp); }, smp.wh, s ? A : &tot,
                                           s ? 3 : 1);
                                }
                            });
                    }
                    // scatter
                    for (int c = 0; c < nch; ++c) {
                        const bool s = channels[c].shapes;
                        for (int a = 0; a < ntest; ++a) {
                            const int ia = test.dof(i, a);
                            if (ia < 0) continue;
                            const double fa = xq.w * (s ? xq.shape[a] : 1.0);
                            for (int b = 0; b < ntrial; ++b) {
                                const int jb = trial.dof(j, b);
                                if (jb < 0) continue;
                                const int bb = (s && ntrial == 3) ? b : 0;
                                const double cd = fa * wd[c][a][b], ci = fa * wi[c][a][b];
                                if (cd == 0.0 && ci == 0.0) continue;
                                for (int k = 0; k < lags.count(); ++k) {
                                    const double v = cd * acc_d.at(c, k, bb) + ci * acc_i.at(c, k, bb);
                                    if (v != 0.0) local[k](ia, jb) += v;
                                }
                            }
                        }
                    }
                }
            }
        }
#pragma omp critical
        for (int k = 0; k < lags.count(); ++k) result[k] += local[k];
    }
    return result;
}

DenseBlocks double_layer(const SurfaceMesh& mesh, double dt, const SpaceBasis& outer, const SpaceBasis& inner,
                         const PiecewisePoly& D, double alpha, const AssemblyOptions& opts, LagRange lags,
                         bool transpose) {
    const int nout = outer.local_count(), nin = inner.local_count();
    const auto& gu = gauss_legendre(opts.n_time_gauss);
    const PiecewisePoly D1 = D.derivative();
    const TimeTable T0(D, gu), T1(D1, gu);
    PolarOptions popt = polar_for_degree(opts.polar, D.degree() + 1);
    popt.n_radial = std::max(popt.n_radial, 6);
    const PolarOptions pcut{4, 4, 1.0, 0};
    const RadialGrid rgrid{dt, 0.0};
    const auto orule = outer_rule(opts.outer_refine);
    const auto frule = outer_rule(opts.far_refine);
    const bool use_sigma = opts.sigma && alpha > 0.0;
    const int npanels = static_cast<int>(mesh.num_triangles());
    const int j_end = lags.lag_max + std::max(D.end(), D1.end());
    const int rows = transpose ? inner.size() : outer.size();
    const int cols = transpose ? outer.size() : inner.size();

    DenseBlocks result(lags.count(), Eigen::MatrixXd::Zero(rows, cols));

#pragma omp parallel
    {
        DenseBlocks local(lags.count(), Eigen::MatrixXd::Zero(rows, cols));
        Acc acc(1, lags.count(), 3);
        const double one[3] = {1.0, 0.0, 0.0};
        const int nb = nin == 3 ? 3 : 1;

#pragma omp for schedule(dynamic)
        for (int i = 0; i < npanels; ++i) {
            const PanelGeometry Pi = mesh.panel(i);
            const auto xs = outer_points(Pi, orule, outer);
            for (int j = 0; j < npanels; ++j) {
                const PanelGeometry Pj = mesh.panel(j);
                const PanelGeometry Pr = reflect_panel(Pj);
                const Vec3 nj = Pj.normal, nr = Pr.normal;
                const std::vector<PhysicalPoint> far_pts =
                    use_sigma ? map_rule(Pj, frule) : std::vector<PhysicalPoint>{};
                for (const auto& xq : xs) {
                    acc.clear();
                    auto delta_visit = [&](const PolarPoint& p, const Vec3& n) {
                        const double drdn = (p.y - xq.x).dot(n) / p.r;
                        if (drdn == 0.0) return;
                        const double sh[3] = {shape3(0, p.bxi, p.beta), shape3(1, p.bxi, p.beta),
                                              shape3(2, p.bxi, p.beta)};
                        const double w = p.weight * drdn / kFourPi;
                        const double inv_r = 1.0 / p.r;
                        spread(acc, 0, T0, lags, p.cell,
                               [&](int cc) { return T1.value(cc, p.xi_cell) * inv_r - T0.value(cc, p.xi_cell) * inv_r * inv_r; },
                               w, nb == 3 ? sh : one, nb);
                    };
                    if (opts.free_space) {
                        // (y - x) . n_y is constant on the panel; zero for points in its plane.
                        if (std::abs((Pj.vertices[0] - xq.x).dot(nj)) > 1e-14 * Pj.diameter)
                            integrate_polar(xq.x, Pj, rgrid, popt, [&](const PolarPoint& p) { delta_visit(p, nj); });
                    }
                    if (opts.image || use_sigma) {
                        integrate_polar(xq.x, Pr, rgrid, popt, [&](const PolarPoint& p) {
                            if (opts.image) delta_visit(p, nr);
                            if (!use_sigma) return;
                            const PointPair pp = PointPair::make(xq.x, reflect(p.y));
                            const double sh[3] = {shape3(0, p.bxi, p.beta), shape3(1, p.bxi, p.beta),
                                                  shape3(2, p.bxi, p.beta)};
                            // jump: -(a/2pi) f(r-) dr-/dn D'(r- - k dt)
                            const double g = -(alpha / kTwoPi) / (pp.z_plus + alpha * p.r) * r_minus_dn(pp, nj);
                            spread(acc, 0, T1, lags, p.cell, [&](int cc) { return T1.value(cc, p.xi_cell); },
                                   p.weight * g, nb == 3 ? sh : one, nb);
                        });
                    }
                    if (use_sigma) {
                        const Vec3 x = xq.x;
                        sigma_tail(
                            x, Pr, far_pts, dt, j_end, gu, pcut,
                            [&](double u, const Vec3& y) {
                                return (alpha / kTwoPi) * sigma_profile_dn(u, PointPair::make(x, y), alpha, nj);
                            },
                            [&](const USample& smp, const double* A) {
                                const double tot = A[0] + A[1] + A[2];
                                spread(acc, 0, T1, lags, smp.cell, [&](int cc) { return T1.sample(cc, smp); }, smp.wh,
                                       nb == 3 ? A : &tot, nb);
                            });
                    }
                    for (int a = 0; a < nout; ++a) {
                        const int ia = outer.dof(i, a);
                        if (ia < 0) continue;
                        const double fa = 2.0 * xq.w * xq.shape[a];
                        for (int b = 0; b < nin; ++b) {
                            const int jb = inner.dof(j, b);
                            if (jb < 0) continue;
                            for (int k = 0; k < lags.count(); ++k) {
                                const double v = fa * acc.at(0, k, nb == 3 ? b : 0);
                                if (v == 0.0) continue;
                                if (transpose)
                                    local[k](jb, ia) += v;
                                else
                                    local[k](ia, jb) += v;
                            }
                        }
                    }
                }
            }
        }
#pragma omp critical
        for (int k = 0; k < lags.count(); ++k) result[k] += local[k];
    }
    return result;
}

}  // namespace tdbem::engine
