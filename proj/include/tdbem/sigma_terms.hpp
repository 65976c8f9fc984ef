#pragma once

#include <vector>

#include "tdbem/kernel.hpp"
#include "tdbem/piecewise_poly.hpp"
#include "tdbem/quadrature.hpp"

namespace tdbem {

/// Quadrature sample in retarded time u for the tail Int_{r-}^inf h(u) E(u - k dt) du.
/// `node` is the index into the fixed per-cell Gauss rule, or -1 for samples of a
/// partial cell [r-, cell end] whose local coordinate is `xi`.
struct USample {
    int cell;
    int node;
    double xi;
    double wh;  // quadrature weight times h(u)
};

/// Values of a piecewise polynomial on a dt grid, with the pieces pre-evaluated at
/// the fixed per-cell Gauss nodes.
class TimeTable {
public:
    TimeTable() = default;
    TimeTable(const PiecewisePoly& f, const QuadratureRule1D& rule);

    int origin() const noexcept { return origin_; }
    int end() const noexcept { return end_; }
    bool empty() const noexcept { return origin_ >= end_; }
    /// Value on absolute cell c at local coordinate xi.
    double value(int c, double xi) const;
    /// Value on absolute cell c at fixed node q.
    double node_value(int c, int q) const { return nodes_[(c - origin_) * nq_ + q]; }
    double sample(int c, const USample& s) const { return s.node >= 0 ? node_value(c, s.node) : value(c, s.xi); }

private:
    PiecewisePoly f_;
    int origin_ = 0, end_ = 0, nq_ = 0;
    std::vector<double> nodes_;
};

/// Appends samples of h over the partial cell [r_minus, end of its cell] (when
/// with_partial) and over the full cells [full_begin, full_end).
template <class H>
void sigma_samples(H&& h, double r_minus, bool with_partial, int full_begin, int full_end, double dt,
                   const QuadratureRule1D& rule, std::vector<USample>& out) {
    const int nq = static_cast<int>(rule.nodes.size());
    if (with_partial) {
        const int c = static_cast<int>(std::floor(r_minus / dt));
        const double lo = r_minus, hi = (c + 1) * dt;
        if (hi > lo)
            for (int q = 0; q < nq; ++q) {
                const double u = lo + (hi - lo) * rule.nodes[q];
                out.push_back({c, -1, u / dt - c, rule.weights[q] * (hi - lo) * h(u)});
            }
    }
    for (int c = full_begin; c < full_end; ++c)
        for (int q = 0; q < nq; ++q) {
            const double u = (c + rule.nodes[q]) * dt;
            out.push_back({c, q, rule.nodes[q], rule.weights[q] * dt * h(u)});
        }
}

/// Lower and upper bounds of |x - y| over the panel (exact maximum, exact minimum).
std::pair<double, double> distance_range(const Vec3& x, const PanelGeometry& panel);

}  // namespace tdbem
