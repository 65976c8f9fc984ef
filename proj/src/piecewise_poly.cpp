#include "tdbem/piecewise_poly.hpp"

#include <algorithm>
#include <cmath>

#include "tdbem/quadrature.hpp"

namespace tdbem {

namespace poly {

double eval(const Poly& p, double x) {
    double v = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
    return v;
}

Poly add(const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

Poly mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Poly scale(const Poly& a, double c) {
    Poly r = a;
    for (double& v : r) v *= c;
    return r;
}

Poly shift(const Poly& p, double c) {
    // Horner in polynomial arithmetic: p(x + c) = (...(p_n (x+c) + p_{n-1})(x+c) ...).
    Poly r;
    const Poly lin{c, 1.0};
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        r = mul(r, lin);
        if (r.empty()) r.push_back(0.0);
        r[0] += *it;
    }
    return r;
}

Poly derivative(const Poly& p) {
    if (p.size() <= 1) return {0.0};
    Poly r(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) r[i - 1] = static_cast<double>(i) * p[i];
    return r;
}

double integral01(const Poly& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += p[i] / static_cast<double>(i + 1);
    return s;
}

}  // namespace poly

namespace {

Poly power(const Poly& base, int e) {
    Poly r{1.0};
    for (int i = 0; i < e; ++i) r = poly::mul(r, base);
    return r;
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

const Poly kEmpty{};

}  // namespace

PiecewisePoly::PiecewisePoly(double h, int origin, std::vector<Poly> pieces)
    : h_(h), origin_(origin), pieces_(std::move(pieces)) {
    if (!(h > 0.0)) throw std::invalid_argument("piecewise polynomial needs h > 0");
    for (auto& p : pieces_)
        if (p.empty()) p.push_back(0.0);
}

int PiecewisePoly::degree() const noexcept {
    int d = 0;
    for (const auto& p : pieces_) d = std::max(d, static_cast<int>(p.size()) - 1);
    return d;
}

const Poly& PiecewisePoly::cell(int c) const {
    const int i = c - origin_;
    if (i < 0 || i >= num_pieces()) return kEmpty;
    return pieces_[i];
}

double PiecewisePoly::operator()(double t) const {
    const double s = t / h_;
    const int c = static_cast<int>(std::floor(s));
    const Poly& p = cell(c);
    if (p.empty()) return 0.0;
    return poly::eval(p, s - c);
}

double PiecewisePoly::integral() const {
    double s = 0.0;
    for (const auto& p : pieces_) s += poly::integral01(p);
    return s * h_;
}

std::complex<double> PiecewisePoly::fourier(std::complex<double> omega) const {
    const auto& g = gauss_legendre(std::max(12, degree() + 8));
    std::complex<double> s = 0.0;
    const std::complex<double> iw(0.0, 1.0);
    for (int i = 0; i < num_pieces(); ++i)
        for (std::size_t q = 0; q < g.nodes.size(); ++q) {
            const double t = (origin_ + i + g.nodes[q]) * h_;
            s += g.weights[q] * poly::eval(pieces_[i], g.nodes[q]) * std::exp(iw * omega * t);
        }
    return s * h_;
}

double PiecewisePoly::max_jump() const {
    if (pieces_.empty()) return 0.0;
    double j = std::abs(poly::eval(pieces_.front(), 0.0));
    j = std::max(j, std::abs(poly::eval(pieces_.back(), 1.0)));
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i)
        j = std::max(j, std::abs(poly::eval(pieces_[i], 1.0) - poly::eval(pieces_[i + 1], 0.0)));
    return j;
}

PiecewisePoly PiecewisePoly::derivative(double tol) const {
    double scale = 0.0;
    for (const auto& p : pieces_)
        for (double c : p) scale = std::max(scale, std::abs(c));
    if (max_jump() > tol * std::max(scale, 1.0))
        throw std::domain_error("derivative of a discontinuous piecewise polynomial");
    std::vector<Poly> d;
    d.reserve(pieces_.size());
    for (const auto& p : pieces_) d.push_back(poly::scale(poly::derivative(p), 1.0 / h_));
    return {h_, origin_, std::move(d)};
}

PiecewisePoly PiecewisePoly::reflected() const {
    // Cell c maps to cell -c-1 with xi -> 1 - xi.
    std::vector<Poly> r(pieces_.rbegin(), pieces_.rend());
    for (auto& p : r) {
        p = poly::shift(p, 1.0);  // p(xi + 1), then xi -> -xi
        for (std::size_t k = 1; k < p.size(); k += 2) p[k] = -p[k];
    }
    return {h_, -end(), std::move(r)};
}

PiecewisePoly PiecewisePoly::shifted(int k) const { return {h_, origin_ + k, pieces_}; }

PiecewisePoly PiecewisePoly::scaled(double c) const {
    std::vector<Poly> r = pieces_;
    for (auto& p : r) p = poly::scale(p, c);
    return {h_, origin_, std::move(r)};
}

PiecewisePoly PiecewisePoly::multiplied(const PiecewisePoly& other) const {
    if (std::abs(other.h_ - h_) > 1e-14 * h_) throw std::invalid_argument("grid spacings differ");
    const int lo = std::max(origin_, other.origin_), hi = std::min(end(), other.end());
    if (hi <= lo) return {h_, 0, {}};
    std::vector<Poly> r;
    for (int c = lo; c < hi; ++c) r.push_back(poly::mul(cell(c), other.cell(c)));
    return {h_, lo, std::move(r)};
}

PiecewisePoly PiecewisePoly::operator+(const PiecewisePoly& other) const {
    if (empty()) return other;
    if (other.empty()) return *this;
    if (std::abs(other.h_ - h_) > 1e-14 * h_) throw std::invalid_argument("grid spacings differ");
    const int lo = std::min(origin_, other.origin_), hi = std::max(end(), other.end());
    std::vector<Poly> r;
    for (int c = lo; c < hi; ++c) r.push_back(poly::add(cell(c), other.cell(c)));
    return {h_, lo, std::move(r)};
}

PiecewisePoly correlate(const PiecewisePoly& f, const PiecewisePoly& g) {
    if (std::abs(f.h() - g.h()) > 1e-14 * f.h()) throw std::invalid_argument("grid spacings differ");
    const double h = f.h();
    const int nf = f.num_pieces(), ng = g.num_pieces();
    if (nf == 0 || ng == 0) return {h, 0, {}};
    const int df = f.degree(), dg = g.degree();
    const int origin = g.origin() - f.origin() - nf;
    std::vector<Poly> out(nf + ng, Poly(df + dg + 2, 0.0));

    // Basis pieces independent of the data: u^k, (1-u)^k, (w-1)^k.
    const int maxp = df + dg + 2;
    std::vector<Poly> upow(maxp + 1), one_minus(maxp + 1), w_minus(maxp + 1);
    for (int k = 0; k <= maxp; ++k) {
        upow[k] = power({0.0, 1.0}, k);
        one_minus[k] = power({1.0, -1.0}, k);
        w_minus[k] = power({-1.0, 1.0}, k);
    }
    for (int i = 0; i < nf; ++i) {
        const Poly& P = f.pieces()[i];
        for (int j = 0; j < ng; ++j) {
            const Poly& Q = g.pieces()[j];
            const int m = (g.origin() + j) - (f.origin() + i);
            Poly t0(maxp, 0.0), t1(maxp, 0.0);
            for (std::size_t a = 0; a < P.size(); ++a) {
                if (P[a] == 0.0) continue;
                for (std::size_t b = 0; b < Q.size(); ++b) {
                    if (Q[b] == 0.0) continue;
                    for (std::size_t c = 0; c <= b; ++c) {
                        const int n = static_cast<int>(a + c);
                        const double coef = P[a] * Q[b] * binom(static_cast<int>(b), static_cast<int>(c)) / (n + 1);
                        // u in [0,1): Int_0^{1-u} xi^n dxi = (1-u)^{n+1}/(n+1)
                        t0 = poly::add(t0, poly::scale(poly::mul(upow[b - c], one_minus[n + 1]), coef));
                        // u = w - 1 in [-1,0): Int_{-u}^1 xi^n dxi = (1 - (1-w)^{n+1})/(n+1)
                        Poly inner = poly::scale(one_minus[n + 1], -1.0);
                        inner[0] += 1.0;
                        t1 = poly::add(t1, poly::scale(poly::mul(w_minus[b - c], inner), coef));
                    }
                }
            }
            out[m - origin] = poly::add(out[m - origin], poly::scale(t0, h));
            out[m - 1 - origin] = poly::add(out[m - 1 - origin], poly::scale(t1, h));
        }
    }
    for (auto& p : out) p.resize(df + dg + 2, 0.0);
    return {h, origin, std::move(out)};
}

PiecewisePoly box_function(double h) { return {h, 0, {Poly{1.0}}}; }

PiecewisePoly hat_function(double h) { return {h, 0, {Poly{0.0, 1.0}, Poly{1.0, -1.0}}}; }

PiecewisePoly exp_weighted_box(double h, double sigma, int degree) {
    Poly p(degree + 1);
    double term = 1.0;
    const double a = -2.0 * sigma * h;
    for (int k = 0; k <= degree; ++k) {
        p[k] = term;
        term *= a / (k + 1);
    }
    return {h, 0, {p}};
}

}  // namespace tdbem
