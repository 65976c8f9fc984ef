#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace tdbem {

using Poly = std::vector<double>;  // monomial coefficients, lowest degree first

/// Piecewise polynomial on the uniform grid t = (origin + i + xi) h, xi in [0, 1),
/// i = 0..n-1, and zero outside [origin h, (origin + n) h). Each piece is a
/// polynomial in the local variable xi.
class PiecewisePoly {
public:
    PiecewisePoly() = default;
    PiecewisePoly(double h, int origin, std::vector<Poly> pieces);

    double h() const noexcept { return h_; }
    int origin() const noexcept { return origin_; }
    int num_pieces() const noexcept { return static_cast<int>(pieces_.size()); }
    int end() const noexcept { return origin_ + num_pieces(); }  // one past the last cell
    int degree() const noexcept;
    bool empty() const noexcept { return pieces_.empty(); }

    /// Coefficients of the piece on absolute cell c (empty outside the support).
    const Poly& cell(int c) const;
    const std::vector<Poly>& pieces() const noexcept { return pieces_; }

    /// Right-continuous point evaluation.
    double operator()(double t) const;

    double integral() const;
    /// Int f(t) e^{i w t} dt by Gauss quadrature per piece.
    std::complex<double> fourier(std::complex<double> omega) const;

    /// Piecewise derivative. Throws std::domain_error when the function jumps
    /// at an interior breakpoint by more than tol (the derivative would carry
    /// a Dirac mass).
    PiecewisePoly derivative(double tol = 1e-9) const;
    /// t -> f(-t).
    PiecewisePoly reflected() const;
    /// t -> f(t - k h).
    PiecewisePoly shifted(int k) const;
    PiecewisePoly scaled(double c) const;
    /// Pointwise product with another function on the same grid spacing.
    PiecewisePoly multiplied(const PiecewisePoly& other) const;
    /// Maximal jump across breakpoints, including the two support ends.
    double max_jump() const;

    PiecewisePoly operator+(const PiecewisePoly& other) const;

private:
    double h_ = 1.0;
    int origin_ = 0;
    std::vector<Poly> pieces_;
};

/// R(tau) = Int f(s) g(s + tau) ds, exact.
PiecewisePoly correlate(const PiecewisePoly& f, const PiecewisePoly& g);

/// Box on [0, h).
PiecewisePoly box_function(double h);
/// Hat on [0, 2h) peaking at h.
PiecewisePoly hat_function(double h);
/// Box on [0, h) times the degree-n Taylor polynomial of e^{-2 sigma t}.
/// The weighted test function of row n is e^{-2 sigma n h} times this, shifted.
PiecewisePoly exp_weighted_box(double h, double sigma, int degree);

namespace poly {
double eval(const Poly& p, double x);
Poly add(const Poly& a, const Poly& b);
Poly mul(const Poly& a, const Poly& b);
Poly scale(const Poly& a, double c);
/// q(x) = p(x + c).
Poly shift(const Poly& p, double c);
Poly derivative(const Poly& p);
/// Int_0^1 p.
double integral01(const Poly& p);
}  // namespace poly

}  // namespace tdbem
