#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdbem/mesh.hpp"

namespace tdbem {

struct QuadratureRule1D {
    std::vector<double> nodes;    // on [0, 1]
    std::vector<double> weights;  // sum to 1
};

/// n-point Gauss-Legendre rule mapped to [0, 1]. Cached per n.
const QuadratureRule1D& gauss_legendre(int n);

struct TrianglePoint {
    double xi, eta, weight;  // barycentric (1-xi-eta, xi, eta); weights sum to 1
};

/// Symmetric 7-point rule, exact for polynomials of degree 5.
std::span<const TrianglePoint> triangle_rule_7();

/// The 7-point rule applied on each of 4^levels congruent sub-triangles.
std::vector<TrianglePoint> triangle_rule_subdivided(int levels);

struct PhysicalPoint {
    Vec3 x;
    double weight;  // includes the panel area
    double xi, eta;
};

std::vector<PhysicalPoint> map_rule(const PanelGeometry& panel, std::span<const TrianglePoint> rule);

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
extern const double kKronrodX[8];
extern const double kKronrodW[8];
extern const double kGaussW[4];
}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) integration on [a, b], split initially into
/// `initial_segments` equal pieces. Value is a fixed-size array of complex
/// numbers so several related integrals share one adaptive mesh; the error
/// used for refinement is the largest component error.
/// Throws QuadratureError when abs_tol is not met within max_intervals.
template <std::size_t N, class F>
std::array<std::complex<double>, N> integrate_adaptive_n(F&& f, double a, double b, double abs_tol,
                                                         int initial_segments = 1, int max_intervals = 20000);

std::complex<double> integrate_adaptive(const std::function<std::complex<double>(double)>& f, double a, double b,
                                        double abs_tol, int initial_segments = 1, int max_intervals = 20000);

template <std::size_t N, class F>
std::array<std::complex<double>, N> integrate_adaptive_n(F&& f, double a, double b, double abs_tol,
                                                         int initial_segments, int max_intervals) {
    using Value = std::array<std::complex<double>, N>;
    struct Segment {
        double a, b;
        Value value;
        double error;
        bool operator<(const Segment& o) const { return error < o.error; }
    };
    auto rule = [&](double lo, double hi) {
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        const Value fc = f(c);
        Value k{}, g{};
        for (std::size_t n = 0; n < N; ++n) {
            k[n] = fc[n] * detail::kKronrodW[7];
            g[n] = fc[n] * detail::kGaussW[3];
        }
        for (int i = 0; i < 7; ++i) {
            const Value fl = f(c - h * detail::kKronrodX[i]), fr = f(c + h * detail::kKronrodX[i]);
            for (std::size_t n = 0; n < N; ++n) {
                const std::complex<double> s = fl[n] + fr[n];
                k[n] += detail::kKronrodW[i] * s;
                if (i % 2 == 1) g[n] += detail::kGaussW[i / 2] * s;
            }
        }
        Segment seg{lo, hi, {}, 0.0};
        for (std::size_t n = 0; n < N; ++n) {
            seg.value[n] = k[n] * h;
            seg.error = std::max(seg.error, std::abs((k[n] - g[n]) * h));
        }
        return seg;
    };
    std::priority_queue<Segment> heap;
    double err = 0.0;
    const int m = std::max(1, initial_segments);
    for (int i = 0; i < m; ++i) {
        Segment s = rule(a + (b - a) * i / m, a + (b - a) * (i + 1) / m);
        err += s.error;
        heap.push(s);
    }
    int count = m;
    while (err > abs_tol) {
        if (count >= max_intervals)
            throw QuadratureError("adaptive quadrature did not reach tolerance " + std::to_string(abs_tol));
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Segment l = rule(worst.a, mid), r = rule(mid, worst.b);
        err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        ++count;
    }
    Value sum{};
    while (!heap.empty()) {
        for (std::size_t n = 0; n < N; ++n) sum[n] += heap.top().value[n];
        heap.pop();
    }
    return sum;
}

}  // namespace tdbem
