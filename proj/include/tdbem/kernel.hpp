#pragma once

#include <complex>
#include <stdexcept>
#include <utility>

#include "tdbem/mesh.hpp"

namespace tdbem {

using cplx = std::complex<double>;

class KernelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Half-space absorption and the Laplace abscissa used by frequency diagnostics.
struct KernelParams {
    cplx alpha_inf = 0.0;  // Re >= 0; time-domain evaluation needs it real
    double sigma = 1.0;    // > 0

    void validate() const;
    /// Throws unless alpha_inf is real and non-negative.
    double real_alpha() const;
};

/// Source/target pair with the horizontal offset and the direct/reflected distances.
struct PointPair {
    Vec3 x, y;
    double R = 0.0;        // horizontal distance
    double z_plus = 0.0;   // x3 + y3
    double r_plus = 0.0;   // |x - y|
    double r_minus = 0.0;  // |x - y'|, y' mirrored in x3 = 0

    static PointPair make(const Vec3& x, const Vec3& y);
};

/// Arrival times (r+, r-) of the direct and the reflected wave at unit speed.
std::pair<double, double> retarded_times(const PointPair& pp);

/// Free-space Helmholtz kernel e^{i w r}/(4 pi r).
cplx helmholtz(double r, cplx omega);

/// The absorbing correction of G_omega, i.e. G_omega minus the two image
/// Helmholtz kernels, together with its partial derivatives.
///   value = 2 b Int_0^inf e^{b s} g(rho(s)) ds,  b = i omega alpha_inf,
///   rho(s) = sqrt(R^2 + (x3 + y3 + s)^2),  g(r) = e^{i omega r}/(4 pi r).
/// grad_x = d_per_R * (x - y)_horizontal + d_dz e3 and grad_y = -d_per_R * (x - y)_horizontal + d_dz e3.
struct CorrectionTerms {
    cplx value = 0.0;
    cplx d_per_R = 0.0;  // (1/R) d/dR
    cplx d_dz = 0.0;     // d/d(x3 + y3)
};

/// Adaptive evaluation of the correction integral. The integrand decays like
/// exp(-rate s) with rate = Im(omega) (1 + Re a) + Re(omega) Im(a); rate <= 0 is
/// rejected. Truncated at s = 40/rate.
CorrectionTerms g_omega_correction(const PointPair& pp, cplx omega, const KernelParams& params,
                                   bool with_derivatives = false);

/// Half-space Green's function of the Helmholtz problem at complex frequency omega.
cplx eval_G_omega(const PointPair& pp, cplx omega, const KernelParams& params);

/// Gradient of G_omega with respect to x and to y.
struct KernelGradient {
    Eigen::Vector3cd grad_x, grad_y;
};
KernelGradient eval_G_omega_gradient(const PointPair& pp, cplx omega, const KernelParams& params);

// Time domain. The absorbing part of the Green's function is
//   Sigma(u) = -(a/2pi) d/du [ H(u - r-) f(u) ],   f(u) = Q(u)^{-1/2},
//   Q(u) = (u + a (x3+y3))^2 + (a^2 - 1) R^2,
// so Sigma splits into a jump  -(a/2pi) f(r-) delta(u - r-)  and a smooth part
// -(a/2pi) f'(u) for u > r-. Note Q(r-) = (x3 + y3 + a r-)^2.

/// f(u) = Q(u)^{-1/2}, for u >= r-.
double sigma_profile(double u, const PointPair& pp, double alpha);

/// Coefficient of delta(u - r-) in Sigma: -(a/2pi) / (x3 + y3 + a r-).
double sigma_jump(const PointPair& pp, double alpha);

/// Smooth part of Sigma for u > r-: (a/2pi) (u + a z+) Q(u)^{-3/2}.
double eval_sigma_smooth(double tau, const PointPair& pp, double alpha);

/// Derivative of f(u) = Q(u)^{-1/2} with respect to y along the unit vector n.
double sigma_profile_dn(double u, const PointPair& pp, double alpha, const Vec3& n);

/// Derivative of r- = |x - y'| with respect to y along n.
double r_minus_dn(const PointPair& pp, const Vec3& n);

}  // namespace tdbem
