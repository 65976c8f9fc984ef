#pragma once

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <vector>

#include "tdbem/mesh.hpp"
#include "tdbem/quadrature.hpp"

namespace tdbem {

/// Radial breakpoints r_j = origin + j h; cell j is [r_j, r_{j+1}).
struct RadialGrid {
    double h = 1.0;
    double origin = 0.0;
};

struct PolarOptions {
    int n_radial = 4;          // Gauss points per radial piece
    int n_angular = 6;         // Gauss points per angular piece
    double max_width = 1.0;    // widest angular piece in the sinh-graded edge variable
    int max_cell = INT_MAX;    // radial cells beyond this index are skipped
};

/// One quadrature point of the polar decomposition of a panel around x.
struct PolarPoint {
    int cell;          // radial cell of r = |x - y|
    double xi_cell;    // local coordinate of r in its cell, in [0, 1]
    double r;          // |x - y|
    Vec3 y;
    double weight;     // area element (includes orientation sign of the sub-triangle)
    double bxi, beta;  // barycentrics of y: y = (1-bxi-beta) v0 + bxi v1 + beta v2
};

namespace detail {

struct PanelFrame {
    Vec3 x0, eu, ev;
    double d = 0.0;
    std::array<Eigen::Vector2d, 3> P;
    Eigen::Matrix2d to_bary;  // maps (y2d - P0) to (bxi, beta)
    double orient = 1.0;      // +1 when (P0, P1, P2) is counter-clockwise in the frame
};

PanelFrame make_frame(const Vec3& x, const PanelGeometry& panel);

}  // namespace detail

/// Integrates over the panel in polar coordinates centred at the projection of x
/// onto the panel plane. The panel is the signed sum of the three triangles
/// (x0, v_k, v_k+1). Each is parametrised by direction, with an asinh grading of
/// the edge coordinate, and by r = |x - y| so that dA = r dr dtheta. The r-range is
/// split at every radial breakpoint and the angular range where the edge distance
/// crosses one, so the integrand is smooth on each piece whenever it is smooth per
/// radial cell. Radial pieces use the variable s = sqrt(r - d), d = dist(x, plane),
/// which absorbs the square-root behaviour of rho(r) = sqrt(r^2 - d^2).
template <class Visit>
void integrate_polar(const Vec3& x, const PanelGeometry& panel, const RadialGrid& grid, const PolarOptions& opt,
                     Visit&& visit) {
    const detail::PanelFrame fr = detail::make_frame(x, panel);
    const double d = fr.d, d2 = d * d;
    const auto& gr = gauss_legendre(opt.n_radial);
    const auto& ga = gauss_legendre(opt.n_angular);
    const double scale = panel.diameter;
    // The signed sub-triangles cancel exactly inside the ball of radius dist(x, panel), so
    // radial pieces start there; this keeps causality exact instead of roundoff-small.
    double rho_min = 0.0;
    {
        const Eigen::Vector2d bc = fr.to_bary * (-fr.P[0]);
        if (!(bc.x() >= 0.0 && bc.y() >= 0.0 && bc.x() + bc.y() <= 1.0)) {
            rho_min = std::numeric_limits<double>::infinity();
            for (int k = 0; k < 3; ++k) {
                const Eigen::Vector2d a = fr.P[k], e = fr.P[(k + 1) % 3] - a;
                const double t = std::clamp(-a.dot(e) / e.squaredNorm(), 0.0, 1.0);
                rho_min = std::min(rho_min, (a + t * e).norm());
            }
        }
    }
    const double r_start = std::sqrt(rho_min * rho_min + d2);
    std::vector<double> cuts;
    for (int k = 0; k < 3; ++k) {
        Eigen::Vector2d A = fr.P[k], B = fr.P[(k + 1) % 3];
        double cr = A.x() * B.y() - A.y() * B.x();
        if (std::abs(cr) <= 1e-13 * scale * scale) continue;
        double sign = fr.orient;
        if (cr < 0.0) {
            std::swap(A, B);
            cr = -cr;
            sign = -fr.orient;
        }
        const Eigen::Vector2d edge = B - A;
        const double len = edge.norm();
        const Eigen::Vector2d t = edge / len;
        const double p = cr / len;  // distance from x0 to the edge line
        const Eigen::Vector2d n(t.y(), -t.x());  // unit normal towards the edge (n . A = p)
        const double lA = A.dot(t), lB = B.dot(t);
        const double uA = std::asinh(lA / p), uB = std::asinh(lB / p);

        // Edge distance rho_e(u) = p cosh u; breakpoints b give |u| = acosh(sqrt(b^2-d^2)/p).
        const double rho_max = std::max(A.norm(), B.norm());
        const double r_max = std::sqrt(rho_max * rho_max + d2);
        const double r_min_edge = std::sqrt(p * p + d2);
        cuts.assign({uA, uB});
        const int j_lo = static_cast<int>(std::floor((r_min_edge - grid.origin) / grid.h)) + 1;
        const int j_hi = static_cast<int>(std::ceil((r_max - grid.origin) / grid.h));
        for (int j = j_lo; j <= j_hi; ++j) {
            const double b = grid.origin + j * grid.h;
            if (b <= r_min_edge || b >= r_max) continue;
            const double rho_b = std::sqrt(b * b - d2);
            const double u = std::acosh(std::max(1.0, rho_b / p));
            if (u > uA && u < uB) cuts.push_back(u);
            if (-u > uA && -u < uB) cuts.push_back(-u);
        }
        std::sort(cuts.begin(), cuts.end());

        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double u0 = cuts[c], u1 = cuts[c + 1];
            if (u1 - u0 <= 1e-15) continue;
            const int sub = std::max(1, static_cast<int>(std::ceil((u1 - u0) / opt.max_width)));
            const double du = (u1 - u0) / sub;
            for (int s = 0; s < sub; ++s)
                for (std::size_t ia = 0; ia < ga.nodes.size(); ++ia) {
                    const double u = u0 + (s + ga.nodes[ia]) * du;
                    const double ch = std::cosh(u), sh = std::sinh(u);
                    const Eigen::Vector2d dir = (n + sh * t) / ch;
                    const double wa = sign * ga.weights[ia] * du / ch;
                    const double rho_e = p * ch;
                    const double R = std::sqrt(rho_e * rho_e + d2);
                    // radial pieces [d, b_1], [b_1, b_2], ..., [b_last, R]
                    double lo = std::max(d, r_start);
                    int cell = static_cast<int>(std::floor((lo - grid.origin) / grid.h));
                    while (lo < R && cell <= opt.max_cell) {
                        const double next = grid.origin + (cell + 1) * grid.h;
                        const double hi = std::min(next, R);
                        if (hi > lo) {
                            const double cell_lo = grid.origin + cell * grid.h;
                            const bool graded = d > 1e-12 * scale;
                            const double s_lo = graded ? std::sqrt(lo - d) : 0.0;
                            const double s_hi = graded ? std::sqrt(hi - d) : 0.0;
                            for (std::size_t ir = 0; ir < gr.nodes.size(); ++ir) {
                                double r, wr;
                                if (graded) {
                                    const double sv = s_lo + (s_hi - s_lo) * gr.nodes[ir];
                                    r = d + sv * sv;
                                    wr = gr.weights[ir] * 2.0 * (s_hi - s_lo) * sv;
                                } else {
                                    r = lo + (hi - lo) * gr.nodes[ir];
                                    wr = gr.weights[ir] * (hi - lo);
                                }
                                const double rho = std::sqrt(std::max(0.0, r * r - d2));
                                const Eigen::Vector2d q = rho * dir;
                                const Eigen::Vector2d bc = fr.to_bary * (q - fr.P[0]);
                                PolarPoint pt{cell,
                                              (r - cell_lo) / grid.h,
                                              r,
                                              fr.x0 + q.x() * fr.eu + q.y() * fr.ev,
                                              wa * wr * r,
                                              bc.x(),
                                              bc.y()};
                                visit(pt);
                            }
                        }
                        lo = hi;
                        ++cell;
                    }
                }
        }
    }
}

}  // namespace tdbem
