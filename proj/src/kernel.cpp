#include "tdbem/kernel.hpp"

#include <cmath>
#include <numbers>

#include "tdbem/quadrature.hpp"

namespace tdbem {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};
}  // namespace

void KernelParams::validate() const {
    if (alpha_inf.real() < 0.0) throw KernelError("Re alpha_inf must be >= 0");
    if (!(sigma > 0.0)) throw KernelError("sigma must be > 0");
}

double KernelParams::real_alpha() const {
    if (alpha_inf.imag() != 0.0) throw KernelError("time-domain kernels need a real alpha_inf");
    if (alpha_inf.real() < 0.0) throw KernelError("alpha_inf must be >= 0");
    return alpha_inf.real();
}

PointPair PointPair::make(const Vec3& x, const Vec3& y) {
    PointPair pp;
    pp.x = x;
    pp.y = y;
    const double dx = x.x() - y.x(), dy = x.y() - y.y();
    pp.R = std::hypot(dx, dy);
    pp.z_plus = x.z() + y.z();
    pp.r_plus = std::hypot(pp.R, x.z() - y.z());
    pp.r_minus = std::hypot(pp.R, pp.z_plus);
    return pp;
}

std::pair<double, double> retarded_times(const PointPair& pp) { return {pp.r_plus, pp.r_minus}; }

cplx helmholtz(double r, cplx omega) { return std::exp(kI * omega * r) / (4.0 * kPi * r); }

CorrectionTerms g_omega_correction(const PointPair& pp, cplx omega, const KernelParams& params,
                                   bool with_derivatives) {
    CorrectionTerms out;
    const cplx alpha = params.alpha_inf;
    if (alpha == 0.0) return out;
    if (alpha.real() < 0.0) throw KernelError("Re alpha_inf must be >= 0");
    const double rate = omega.imag() * (1.0 + alpha.real()) + omega.real() * alpha.imag();
    if (!(rate > 0.0)) throw KernelError("correction integrand does not decay for this omega and alpha_inf");

    const cplx beta = kI * omega * alpha;
    const double R2 = pp.R * pp.R, z = pp.z_plus;
    const double length = 40.0 / rate;
    // Scale the tolerance with the size of the reflected term so the relative
    // accuracy does not degrade for strongly damped frequencies.
    const double scale = std::abs(helmholtz(pp.r_minus, omega));
    const double tol = std::min(1e-10, 1e-11 * std::max(scale, 1e-200));
    const int segments = 1 + static_cast<int>(length * std::abs(omega) / 4.0);

    if (!with_derivatives) {
        auto f = [&](double s) {
            const double rho = std::sqrt(R2 + (z + s) * (z + s));
            return std::array<cplx, 1>{std::exp(beta * s + kI * omega * rho) / (4.0 * kPi * rho)};
        };
        out.value = 2.0 * beta * integrate_adaptive_n<1>(f, 0.0, length, tol / std::abs(2.0 * beta), segments)[0];
        return out;
    }
    auto f = [&](double s) {
        const double rho = std::sqrt(R2 + (z + s) * (z + s));
        const cplx e = std::exp(beta * s + kI * omega * rho);
        const cplx g = e / (4.0 * kPi * rho);
        const cplx dg = e * (kI * omega * rho - 1.0) / (4.0 * kPi * rho * rho);
        return std::array<cplx, 3>{g, dg / rho, dg * (z + s) / rho};
    };
    const auto v = integrate_adaptive_n<3>(f, 0.0, length, tol / std::abs(2.0 * beta), segments);
    out.value = 2.0 * beta * v[0];
    out.d_per_R = 2.0 * beta * v[1];
    out.d_dz = 2.0 * beta * v[2];
    return out;
}

cplx eval_G_omega(const PointPair& pp, cplx omega, const KernelParams& params) {
    if (!(pp.r_plus > 0.0)) throw KernelError("G_omega is singular at x = y");
    if (!(omega.imag() > 0.0)) throw KernelError("G_omega needs Im omega > 0");
    return helmholtz(pp.r_plus, omega) + helmholtz(pp.r_minus, omega) + g_omega_correction(pp, omega, params).value;
}

KernelGradient eval_G_omega_gradient(const PointPair& pp, cplx omega, const KernelParams& params) {
    if (!(pp.r_plus > 0.0)) throw KernelError("G_omega is singular at x = y");
    auto dhelm = [&](double r) { return std::exp(kI * omega * r) * (kI * omega * r - 1.0) / (4.0 * kPi * r * r); };
    const Vec3 d = pp.x - pp.y;
    const Vec3 dm(d.x(), d.y(), pp.z_plus);  // x - y'
    KernelGradient g;
    const cplx a = dhelm(pp.r_plus) / pp.r_plus, b = dhelm(pp.r_minus) / pp.r_minus;
    g.grad_x = a * d.cast<cplx>() + b * dm.cast<cplx>();
    // d/dy of |x - y'|: horizontal components flip sign, the vertical one does not.
    const Vec3 dmy(-d.x(), -d.y(), pp.z_plus);
    g.grad_y = -a * d.cast<cplx>() + b * dmy.cast<cplx>();
    if (params.alpha_inf != 0.0) {
        const CorrectionTerms c = g_omega_correction(pp, omega, params, true);
        const Eigen::Vector3cd hx(c.d_per_R * d.x(), c.d_per_R * d.y(), c.d_dz);
        const Eigen::Vector3cd hy(-c.d_per_R * d.x(), -c.d_per_R * d.y(), c.d_dz);
        g.grad_x += hx;
        g.grad_y += hy;
    }
    return g;
}

double sigma_profile(double u, const PointPair& pp, double alpha) {
    const double a = u + alpha * pp.z_plus;
    const double q = a * a + (alpha * alpha - 1.0) * pp.R * pp.R;
    return 1.0 / std::sqrt(q);
}

double sigma_jump(const PointPair& pp, double alpha) {
    if (alpha == 0.0) return 0.0;
    return -(alpha / (2.0 * kPi)) / (pp.z_plus + alpha * pp.r_minus);
}

double eval_sigma_smooth(double tau, const PointPair& pp, double alpha) {
    if (!(tau > pp.r_minus)) throw KernelError("smooth part of Sigma is defined for tau > r-");
    if (alpha < 0.0) throw KernelError("alpha_inf must be >= 0");
    if (alpha == 0.0) return 0.0;
    const double a = tau + alpha * pp.z_plus;
    const double q = a * a + (alpha * alpha - 1.0) * pp.R * pp.R;
    if (!(q > 0.0)) throw KernelError("negative discriminant in Sigma (inside the reflected cone)");
    return (alpha / (2.0 * kPi)) * a / (q * std::sqrt(q));
}

double sigma_profile_dn(double u, const PointPair& pp, double alpha, const Vec3& n) {
    const double a = u + alpha * pp.z_plus;
    const double q = a * a + (alpha * alpha - 1.0) * pp.R * pp.R;
    const double hx = pp.y.x() - pp.x.x(), hy = pp.y.y() - pp.x.y();
    const double dq = 2.0 * a * alpha * n.z() + 2.0 * (alpha * alpha - 1.0) * (hx * n.x() + hy * n.y());
    return -0.5 * dq / (q * std::sqrt(q));
}

double r_minus_dn(const PointPair& pp, const Vec3& n) {
    const double hx = pp.y.x() - pp.x.x(), hy = pp.y.y() - pp.x.y();
    return (hx * n.x() + hy * n.y() + pp.z_plus * n.z()) / pp.r_minus;
}

}  // namespace tdbem
