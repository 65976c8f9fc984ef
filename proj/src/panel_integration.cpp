#include "tdbem/panel_integration.hpp"

namespace tdbem::detail {

PanelFrame make_frame(const Vec3& x, const PanelGeometry& panel) {
    PanelFrame f;
    const Vec3& n = panel.normal;
    const Vec3& v0 = panel.vertices[0];
    const double h = (x - v0).dot(n);
    f.x0 = x - h * n;
    f.d = std::abs(h);
    f.eu = (panel.vertices[1] - v0).normalized();
    f.ev = n.cross(f.eu);
    for (int k = 0; k < 3; ++k) {
        const Vec3 q = panel.vertices[k] - f.x0;
        f.P[k] = Eigen::Vector2d(q.dot(f.eu), q.dot(f.ev));
    }
    Eigen::Matrix2d E;
    E.col(0) = f.P[1] - f.P[0];
    E.col(1) = f.P[2] - f.P[0];
    f.to_bary = E.inverse();
    f.orient = E.determinant() > 0.0 ? 1.0 : -1.0;
    return f;
}

}  // namespace tdbem::detail
