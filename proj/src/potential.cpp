#include "tdbem/potential.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "tdbem/quadrature.hpp"
#include "tdbem/sigma_terms.hpp"

namespace tdbem {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec3 reflect(const Vec3& y) { return {y.x(), y.y(), -y.z()}; }

void check_point(const SurfaceMesh& mesh, const Vec3& x) {
    if (!(x.z() > 0.0)) throw DiscretizationError("potential: observation point must satisfy x3 > 0");
    for (std::size_t i = 0; i < mesh.num_triangles(); ++i)
        if (distance_range(x, mesh.panel(i)).first < 1e-9 * mesh.h())
            throw DiscretizationError("potential: observation point lies on the boundary");
}

// Coefficient of step m at a point of a panel.
double coeff(const Density& d, int m, int panel, double bxi, double beta) {
    const auto& sb = d.basis.space;
    double v = 0.0;
    for (int k = 0; k < sb.local_count(); ++k) v += sb.shape(k, bxi, beta) * d.at(m, sb.dof(panel, k));
    return v;
}

// Int_{r-}^inf f(u) d_t phi(t - u) du at one point of the trial panel, f = Q^{-1/2}.
double sigma_convolution(const Density& d, double t, const PointPair& pp, double alpha, int panel, double bxi,
                         double beta) {
    const double dt = d.dt, rm = pp.r_minus;
    if (t <= rm) return 0.0;
    const int m_hi = static_cast<int>(std::floor((t - rm) / dt));
    double v = 0.0;
    if (d.basis.q == 0) {
        // d_t of a box sum is a sum of +- deltas at the step ends
        auto F = [&](double u) { return u >= rm ? sigma_profile(u, pp, alpha) : 0.0; };
        for (int m = 0; m <= std::min(m_hi, d.basis.n_time - 1); ++m)
            v += coeff(d, m, panel, bxi, beta) * (F(t - m * dt) - F(t - (m + 1) * dt));
        return v;
    }
    const double c2 = (alpha * alpha - 1.0) * pp.R * pp.R;
    auto Fi = [&](double u) {
        const double w = u + alpha * pp.z_plus;
        return std::log(w + std::sqrt(w * w + c2));
    };
    for (int c = 0; c <= m_hi; ++c) {
        const double slope = (coeff(d, c, panel, bxi, beta) - coeff(d, c - 1, panel, bxi, beta)) / dt;
        if (slope == 0.0) continue;
        const double hi = t - c * dt, lo = std::max(rm, t - (c + 1) * dt);
        if (hi > lo) v += slope * (Fi(hi) - Fi(lo));
    }
    return v;
}

double slope_at(const Density& d, double s, int panel, double bxi, double beta) {
    if (s < 0.0) return 0.0;
    const int c = static_cast<int>(std::floor(s / d.dt));
    return (coeff(d, c, panel, bxi, beta) - coeff(d, c - 1, panel, bxi, beta)) / d.dt;
}

struct Setup {
    RadialGrid grid;
    PolarOptions polar;
    bool any = false;
};

Setup retarded_grid(double t, double dt, const PolarOptions& p) {
    Setup s;
    const double steps = std::floor(t / dt);
    s.grid = RadialGrid{dt, t - steps * dt};
    s.polar = p;
    s.polar.max_cell = static_cast<int>(steps) - 1;
    s.any = t > 0.0;
    return s;
}

}  // namespace

double eval_single_layer(const Density& d, const SurfaceMesh& mesh, const Vec3& x, double t,
                         const KernelParams& params, const PotentialOptions& opts) {
    check_point(mesh, x);
    const double alpha = opts.sigma ? params.real_alpha() : 0.0;
    const Setup st = retarded_grid(t, d.dt, opts.polar);
    if (!st.any) return 0.0;
    double v = 0.0;
    for (int j = 0; j < static_cast<int>(mesh.num_triangles()); ++j) {
        const PanelGeometry Pj = mesh.panel(j);
        if (distance_range(x, Pj).first >= t) continue;
        if (opts.free_space)
            integrate_polar(x, Pj, st.grid, st.polar, [&](const PolarPoint& p) {
                v += p.weight * eval_density(d, t - p.r, j, p.bxi, p.beta) / (kFourPi * p.r);
            });
        if (opts.image || alpha > 0.0)
            integrate_polar(x, reflect_panel(Pj), st.grid, st.polar, [&](const PolarPoint& p) {
                double k = 0.0;
                if (opts.image) k += eval_density(d, t - p.r, j, p.bxi, p.beta) / (kFourPi * p.r);
                if (alpha > 0.0) {
                    const PointPair pp = PointPair::make(x, reflect(p.y));
                    k -= (alpha / kTwoPi) * sigma_convolution(d, t, pp, alpha, j, p.bxi, p.beta);
                }
                v += p.weight * k;
            });
    }
    return v;
}

double eval_double_layer(const Density& d, const SurfaceMesh& mesh, const Vec3& x, double t,
                         const KernelParams& params, const PotentialOptions& opts) {
    if (d.basis.q != 1) throw DiscretizationError("double layer potential needs a q = 1 density");
    check_point(mesh, x);
    const double alpha = opts.sigma ? params.real_alpha() : 0.0;
    const Setup st = retarded_grid(t, d.dt, opts.polar);
    if (!st.any) return 0.0;
    const auto& gq = gauss_legendre(opts.n_gauss);
    double v = 0.0;
    auto delta = [&](const PolarPoint& p, int j, const Vec3& n) {
        const double drdn = (p.y - x).dot(n) / p.r;
        const double s = t - p.r;
        return drdn * (-slope_at(d, s, j, p.bxi, p.beta) / (kFourPi * p.r) -
                       eval_density(d, s, j, p.bxi, p.beta) / (kFourPi * p.r * p.r));
    };
    for (int j = 0; j < static_cast<int>(mesh.num_triangles()); ++j) {
        const PanelGeometry Pj = mesh.panel(j);
        if (distance_range(x, Pj).first >= t) continue;
        const Vec3 nj = Pj.normal;
        const PanelGeometry Pr = reflect_panel(Pj);
        if (opts.free_space)
            integrate_polar(x, Pj, st.grid, st.polar, [&](const PolarPoint& p) { v += p.weight * delta(p, j, nj); });
        if (opts.image || alpha > 0.0)
            integrate_polar(x, Pr, st.grid, st.polar, [&](const PolarPoint& p) {
                double k = opts.image ? delta(p, j, Pr.normal) : 0.0;
                if (alpha > 0.0) {
                    const PointPair pp = PointPair::make(x, reflect(p.y));
                    const double rm = pp.r_minus;
                    double s = -sigma_profile(rm, pp, alpha) * r_minus_dn(pp, nj) * slope_at(d, t - rm, j, p.bxi, p.beta);
                    const int m_hi = static_cast<int>(std::floor((t - rm) / d.dt));
                    for (int c = 0; c <= m_hi; ++c) {
                        const double slope = slope_at(d, (c + 0.5) * d.dt, j, p.bxi, p.beta);
                        if (slope == 0.0) continue;
                        const double hi = t - c * d.dt, lo = std::max(rm, t - (c + 1) * d.dt);
                        if (hi <= lo) continue;
                        double acc = 0.0;
                        for (std::size_t g = 0; g < gq.nodes.size(); ++g)
                            acc += gq.weights[g] * sigma_profile_dn(lo + (hi - lo) * gq.nodes[g], pp, alpha, nj);
                        s += slope * acc * (hi - lo);
                    }
                    k -= (alpha / kTwoPi) * s;
                }
                v += p.weight * k;
            });
    }
    return v;
}

std::vector<double> observation_times(double dt, int nt, int oversample) {
    if (oversample < 1 || nt < 0 || !(dt > 0.0)) throw DiscretizationError("observation_times: invalid grid");
    std::vector<double> t;
    for (int n = 0; n <= nt * oversample; ++n) t.push_back(n * dt / oversample);
    return t;
}

void write_signal_csv(const std::filesystem::path& path, const std::vector<double>& t,
                      const std::vector<double>& value) {
    if (t.size() != value.size()) throw std::invalid_argument("signal: time and value lengths differ");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t,value\n" << std::setprecision(17);
    for (std::size_t i = 0; i < t.size(); ++i) out << t[i] << ',' << value[i] << '\n';
}

}  // namespace tdbem
