#include "tdbem/sigma_terms.hpp"

#include <algorithm>
#include <cmath>

namespace tdbem {

TimeTable::TimeTable(const PiecewisePoly& f, const QuadratureRule1D& rule)
    : f_(f), origin_(f.origin()), end_(f.end()), nq_(static_cast<int>(rule.nodes.size())) {
    nodes_.resize(static_cast<std::size_t>(std::max(0, end_ - origin_)) * nq_);
    for (int c = origin_; c < end_; ++c)
        for (int q = 0; q < nq_; ++q) nodes_[(c - origin_) * nq_ + q] = poly::eval(f_.cell(c), rule.nodes[q]);
}

double TimeTable::value(int c, double xi) const {
    const Poly& p = f_.cell(c);
    return p.empty() ? 0.0 : poly::eval(p, xi);
}

namespace {

double segment_distance(const Vec3& x, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (a + t * ab - x).norm();
}

}  // namespace

std::pair<double, double> distance_range(const Vec3& x, const PanelGeometry& panel) {
    const auto& v = panel.vertices;
    double dmax = 0.0;
    for (const auto& p : v) dmax = std::max(dmax, (p - x).norm());
    const Vec3 e1 = v[1] - v[0], e2 = v[2] - v[0];
    const Vec3 w = x - v[0];
    const double a = e1.dot(e1), b = e1.dot(e2), c = e2.dot(e2), d = e1.dot(w), e = e2.dot(w);
    const double det = a * c - b * b;
    const double s = (c * d - b * e) / det, t = (a * e - b * d) / det;
    double dmin;
    if (s >= 0.0 && t >= 0.0 && s + t <= 1.0) {
        dmin = std::abs(w.dot(panel.normal));
    } else {
        dmin = std::min({segment_distance(x, v[0], v[1]), segment_distance(x, v[1], v[2]),
                         segment_distance(x, v[2], v[0])});
    }
    return {dmin, dmax};
}

}  // namespace tdbem
