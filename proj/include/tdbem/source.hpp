#pragma once

#include "tdbem/kernel.hpp"

namespace tdbem {

/// lambda(t) = amplitude (t/tau)^4 e^{-t/tau} for t > 0, zero before. lambda(0) = lambda'(0) = 0.
struct Pulse {
    double amplitude = 1.0;
    double tau = 0.5;

    /// j-th derivative, j = 0..2.
    double operator()(double t, int j = 0) const;
};

/// Field of a point source z with pulse lambda in the absorbing half-space,
///   u(t, x) = Int G(t - s, x, z) lambda(s) ds,
/// i.e. lambda(t - r+)/(4 pi r+) + lambda(t - r-)/(4 pi r-) - (a/2pi) Int_{r-}^t f(u) lambda'(t - u) du.
class PointSourceField {
public:
    PointSourceField(Vec3 z, Pulse pulse, double alpha_inf, int pieces_per_tau = 4);

    double value(double t, const Vec3& x) const;
    double dt(double t, const Vec3& x) const;
    /// Derivative with respect to x along n.
    double dn(double t, const Vec3& x, const Vec3& n) const;

    const Vec3& location() const noexcept { return z_; }
    const Pulse& pulse() const noexcept { return pulse_; }

private:
    // Int_{r-}^t g(u) lambda^{(j)}(t - u) du by composite Gauss rules.
    template <class G>
    double tail(double t, double r_minus, int j, G&& g) const;

    Vec3 z_;
    Pulse pulse_;
    double alpha_;
    int pieces_;
};

}  // namespace tdbem
