#include "tdbem/source.hpp"

#include <cmath>
#include <numbers>

#include "tdbem/quadrature.hpp"

namespace tdbem {

namespace {
constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double Pulse::operator()(double t, int j) const {
    if (t <= 0.0) return 0.0;
    const double s = t / tau, e = amplitude * std::exp(-s);
    switch (j) {
        case 0: return e * std::pow(s, 4);
        case 1: return e * (4.0 * std::pow(s, 3) - std::pow(s, 4)) / tau;
        case 2: return e * (12.0 * s * s - 8.0 * std::pow(s, 3) + std::pow(s, 4)) / (tau * tau);
        default: throw std::invalid_argument("Pulse: derivative order above 2");
    }
}

PointSourceField::PointSourceField(Vec3 z, Pulse pulse, double alpha_inf, int pieces_per_tau)
    : z_(std::move(z)), pulse_(pulse), alpha_(alpha_inf), pieces_(pieces_per_tau) {
    if (!(z_.z() > 0.0)) throw std::invalid_argument("point source must lie above the plane");
    if (!(alpha_ >= 0.0)) throw std::invalid_argument("point source needs real alpha_inf >= 0");
    if (!(pulse_.tau > 0.0)) throw std::invalid_argument("pulse: tau must be positive");
}

template <class G>
double PointSourceField::tail(double t, double r_minus, int j, G&& g) const {
    if (t <= r_minus) return 0.0;
    const auto& rule = gauss_legendre(10);
    const int n = std::max(1, static_cast<int>(std::ceil((t - r_minus) * pieces_ / pulse_.tau)));
    const double L = (t - r_minus) / n;
    double s = 0.0;
    for (int c = 0; c < n; ++c)
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double u = r_minus + (c + rule.nodes[q]) * L;
            s += rule.weights[q] * g(u) * pulse_(t - u, j);
        }
    return s * L;
}

// The pair is built as (z, x) so that the y-derivatives of the kernel helpers act on x.
double PointSourceField::value(double t, const Vec3& x) const {
    const PointPair pp = PointPair::make(z_, x);
    double v = pulse_(t - pp.r_plus) / (kFourPi * pp.r_plus) + pulse_(t - pp.r_minus) / (kFourPi * pp.r_minus);
    if (alpha_ > 0.0)
        v -= alpha_ / kTwoPi * tail(t, pp.r_minus, 1, [&](double u) { return sigma_profile(u, pp, alpha_); });
    return v;
}

double PointSourceField::dt(double t, const Vec3& x) const {
    const PointPair pp = PointPair::make(z_, x);
    double v = pulse_(t - pp.r_plus, 1) / (kFourPi * pp.r_plus) + pulse_(t - pp.r_minus, 1) / (kFourPi * pp.r_minus);
    if (alpha_ > 0.0)
        v -= alpha_ / kTwoPi * tail(t, pp.r_minus, 2, [&](double u) { return sigma_profile(u, pp, alpha_); });
    return v;
}

double PointSourceField::dn(double t, const Vec3& x, const Vec3& n) const {
    const PointPair pp = PointPair::make(z_, x);
    auto radial = [&](double r) { return -pulse_(t - r, 1) / (kFourPi * r) - pulse_(t - r) / (kFourPi * r * r); };
    const double drp = (x - z_).dot(n) / pp.r_plus;
    const double drm = r_minus_dn(pp, n);
    double v = radial(pp.r_plus) * drp + radial(pp.r_minus) * drm;
    if (alpha_ > 0.0) {
        double s = -sigma_profile(pp.r_minus, pp, alpha_) * pulse_(t - pp.r_minus, 1) * drm;
        s += tail(t, pp.r_minus, 1, [&](double u) { return sigma_profile_dn(u, pp, alpha_, n); });
        v -= alpha_ / kTwoPi * s;
    }
    return v;
}

}  // namespace tdbem
