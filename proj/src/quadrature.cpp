#include "tdbem/quadrature.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace tdbem {

const QuadratureRule1D& gauss_legendre(int n) {
    if (n < 1) throw QuadratureError("Gauss-Legendre rule needs n >= 1");
    static std::mutex mtx;
    static std::map<int, QuadratureRule1D> cache;
    std::lock_guard lock(mtx);
    if (auto it = cache.find(n); it != cache.end()) return it->second;

    QuadratureRule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

std::span<const TrianglePoint> triangle_rule_7() {
    static const std::array<TrianglePoint, 7> rule = [] {
        const double s15 = std::sqrt(15.0);
        const double a1 = (6.0 - s15) / 21.0, b1 = (9.0 + 2.0 * s15) / 21.0;
        const double a2 = (6.0 + s15) / 21.0, b2 = (9.0 - 2.0 * s15) / 21.0;
        const double w1 = (155.0 - s15) / 1200.0, w2 = (155.0 + s15) / 1200.0;
        return std::array<TrianglePoint, 7>{{{1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0},
                                             {a1, a1, w1},
                                             {b1, a1, w1},
                                             {a1, b1, w1},
                                             {a2, a2, w2},
                                             {b2, a2, w2},
                                             {a2, b2, w2}}};
    }();
    return rule;
}

std::vector<TrianglePoint> triangle_rule_subdivided(int levels) {
    // Sub-triangles are given by their reference vertex coordinates.
    using P = std::array<double, 2>;
    std::vector<std::array<P, 3>> tris{{P{0, 0}, P{1, 0}, P{0, 1}}};
    for (int l = 0; l < levels; ++l) {
        std::vector<std::array<P, 3>> next;
        for (const auto& t : tris) {
            auto m = [](const P& a, const P& b) { return P{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])}; };
            const P ab = m(t[0], t[1]), bc = m(t[1], t[2]), ca = m(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({ab, t[1], bc});
            next.push_back({ca, bc, t[2]});
            next.push_back({ab, bc, ca});
        }
        tris = std::move(next);
    }
    std::vector<TrianglePoint> out;
    const double scale = 1.0 / static_cast<double>(tris.size());
    for (const auto& t : tris)
        for (const auto& q : triangle_rule_7()) {
            const double l0 = 1.0 - q.xi - q.eta;
            out.push_back({l0 * t[0][0] + q.xi * t[1][0] + q.eta * t[2][0],
                           l0 * t[0][1] + q.xi * t[1][1] + q.eta * t[2][1], q.weight * scale});
        }
    return out;
}

std::vector<PhysicalPoint> map_rule(const PanelGeometry& panel, std::span<const TrianglePoint> rule) {
    std::vector<PhysicalPoint> out;
    out.reserve(rule.size());
    const auto& v = panel.vertices;
    for (const auto& q : rule)
        out.push_back({(1.0 - q.xi - q.eta) * v[0] + q.xi * v[1] + q.eta * v[2], q.weight * panel.area, q.xi, q.eta});
    return out;
}

namespace detail {
const double kKronrodX[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                             0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                             0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                             0.207784955007898467600689403773245, 0.0};
const double kKronrodW[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                             0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                             0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                             0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kGaussW[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace detail

std::complex<double> integrate_adaptive(const std::function<std::complex<double>(double)>& f, double a, double b,
                                        double abs_tol, int initial_segments, int max_intervals) {
    auto wrapped = [&](double x) { return std::array<std::complex<double>, 1>{f(x)}; };
    return integrate_adaptive_n<1>(wrapped, a, b, abs_tol, initial_segments, max_intervals)[0];
}

}  // namespace tdbem
