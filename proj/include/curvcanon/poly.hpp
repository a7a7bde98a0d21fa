#ifndef CURVCANON_POLY_HPP
#define CURVCANON_POLY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "curvcanon/errors.hpp"

namespace curvcanon {

using cplx = std::complex<double>;

// Dense univariate polynomial over C, coefficients in ascending powers.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<cplx> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Poly monomial(int degree, cplx coeff = 1.0)
    {
        std::vector<cplx> c(static_cast<std::size_t>(degree) + 1, cplx(0.0));
        c.back() = coeff;
        return Poly(std::move(c));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool zero() const { return c_.empty(); }
    const std::vector<cplx>& coeffs() const { return c_; }
    cplx coeff(int k) const
    {
        return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(k)] : cplx(0.0);
    }
    cplx lead() const { return c_.empty() ? cplx(0.0) : c_.back(); }

    cplx operator()(cplx x) const
    {
        cplx acc(0.0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    Poly derivative() const
    {
        if (c_.size() <= 1) return Poly{};
        std::vector<cplx> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
        return Poly(std::move(d));
    }

    // coefficients reversed: z^deg * p(1/z)
    Poly reversed() const
    {
        std::vector<cplx> r(c_.rbegin(), c_.rend());
        return Poly(std::move(r));
    }

    // Taylor shift: coefficients of p(b + t) in powers of t, by repeated
    // synthetic division. Evaluating the shifted form near t = 0 avoids the
    // cancellation that plain Horner at x = b + t suffers when p(b) ~ 0.
    Poly shifted(cplx b) const
    {
        std::vector<cplx> work = c_;
        std::vector<cplx> out(c_.size(), cplx(0.0));
        for (std::size_t k = 0; k < c_.size(); ++k) {
            for (std::size_t i = work.size() - 1; i > k; --i) work[i - 1] += b * work[i];
            out[k] = work[k];
        }
        Poly p;
        p.c_ = std::move(out); // keep trailing zeros so degree bookkeeping stays simple
        return p;
    }

    Poly operator*(const Poly& o) const
    {
        if (zero() || o.zero()) return Poly{};
        std::vector<cplx> p(c_.size() + o.c_.size() - 1, cplx(0.0));
        for (std::size_t i = 0; i < c_.size(); ++i)
            for (std::size_t j = 0; j < o.c_.size(); ++j) p[i + j] += c_[i] * o.c_[j];
        return Poly(std::move(p));
    }

    Poly operator*(cplx s) const
    {
        Poly p = *this;
        for (auto& v : p.c_) v *= s;
        p.trim();
        return p;
    }

    double coeff_scale() const
    {
        double m = 0.0;
        for (const auto& v : c_) m = std::max(m, std::abs(v));
        return m;
    }

    // sum |c_k| t^k, the natural magnitude scale of p at |x| = t
    double abs_eval(double t) const
    {
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + std::abs(*it);
        return acc;
    }

private:
    void trim()
    {
        while (!c_.empty() && c_.back() == cplx(0.0)) c_.pop_back();
    }

    std::vector<cplx> c_;
};

namespace detail {

inline void polish_root(const Poly& p, const Poly& dp, cplx& r)
{
    for (int it = 0; it < 3; ++it) {
        cplx d = dp(r);
        if (std::abs(d) == 0.0) return;
        cplx step = p(r) / d;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return;
        r -= step;
    }
}

} // namespace detail

// All complex roots via the companion-matrix eigenproblem, Newton-polished.
// Fine for the small degrees this library sees (curve models and resultants).
inline std::vector<cplx> poly_roots(const Poly& p)
{
    int n = p.degree();
    if (n < 0) fail(errc::validation_error, "roots of the zero polynomial");
    if (n == 0) return {};
    const auto& c = p.coeffs();
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(n)];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, /*computeEigenvectors=*/false);
    std::vector<cplx> roots(static_cast<std::size_t>(n));
    Poly dp = p.derivative();
    for (int i = 0; i < n; ++i) {
        cplx r = es.eigenvalues()(i);
        detail::polish_root(p, dp, r);
        roots[static_cast<std::size_t>(i)] = r;
    }
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

// Monic quartic t^4 + a t^3 + b t^2 + c t + d = 0 by Ferrari resolvent with a
// Newton polish; used in the inner quadrature loops where an eigensolver per
// sample would dominate the runtime.
inline std::array<cplx, 4> quartic_roots_monic(cplx a, cplx b, cplx c, cplx d)
{
    // depressed quartic y^4 + p y^2 + q y + r, t = y - a/4
    const cplx a2 = a * a;
    const cplx p = b - 3.0 / 8.0 * a2;
    const cplx q = c - 0.5 * a * b + a2 * a / 8.0;
    const cplx r = d - 0.25 * a * c + a2 * b / 16.0 - 3.0 / 256.0 * a2 * a2;

    std::array<cplx, 4> ys;
    if (std::abs(q) < 1e-14 * (1.0 + std::abs(p) + std::abs(r))) {
        // biquadratic
        cplx disc = std::sqrt(p * p - 4.0 * r);
        cplx z1 = (-p + disc) * 0.5, z2 = (-p - disc) * 0.5;
        cplx s1 = std::sqrt(z1), s2 = std::sqrt(z2);
        ys = {s1, -s1, s2, -s2};
    } else {
        // resolvent cubic z^3 + 2p z^2 + (p^2-4r) z - q^2 = 0 for z = w^2 in the
        // factorization (y^2 + wy + A)(y^2 - wy + B)
        const cplx A = 2.0 * p, B = p * p - 4.0 * r, C = -q * q;
        const cplx Q = (A * A - 3.0 * B) / 9.0;
        const cplx R = (2.0 * A * A * A - 9.0 * A * B + 27.0 * C) / 54.0;
        cplx sq = std::sqrt(R * R - Q * Q * Q);
        if (std::real(std::conj(R) * sq) < 0.0) sq = -sq;
        cplx S = std::pow(R + sq, 1.0 / 3.0);
        cplx z = (std::abs(S) == 0.0) ? -A / 3.0 : -(S + Q / S) - A / 3.0;
        cplx w = std::sqrt(z);
        if (std::abs(w) == 0.0) w = 1e-150; // q != 0 makes z = 0 impossible up to rounding
        cplx u = (p + z) * 0.5;
        cplx v = q / (2.0 * w);
        auto quad = [](cplx bb, cplx cc, cplx* out) {
            // y^2 + bb y + cc = 0
            cplx disc = std::sqrt(bb * bb - 4.0 * cc);
            if (std::real(std::conj(bb) * disc) < 0.0) disc = -disc;
            cplx r1 = (-bb - disc) * 0.5;
            cplx r2 = (std::abs(r1) > 0.0) ? cc / r1 : (-bb + disc) * 0.5;
            out[0] = r1;
            out[1] = r2;
        };
        quad(w, u - v, ys.data());
        quad(-w, u + v, ys.data() + 2);
    }

    std::array<cplx, 4> ts;
    for (int i = 0; i < 4; ++i) {
        cplx t = ys[static_cast<std::size_t>(i)] - a * 0.25;
        // two Newton steps on the original quartic
        for (int it = 0; it < 2; ++it) {
            cplx f = (((t + a) * t + b) * t + c) * t + d;
            cplx df = ((4.0 * t + 3.0 * a) * t + 2.0 * b) * t + c;
            if (std::abs(df) == 0.0) break;
            t -= f / df;
        }
        ts[static_cast<std::size_t>(i)] = t;
    }
    return ts;
}

// Bivariate polynomial sum c[i][j] x^i y^j, stored densely per x-power.
class Poly2 {
public:
    Poly2() = default;
    explicit Poly2(std::vector<std::vector<cplx>> c) : c_(std::move(c)) {}

    // graded-lex coefficient order (1; x, y; x^2, xy, y^2; ...), total degree deg
    static Poly2 from_graded_lex(const std::vector<cplx>& coeffs, int deg)
    {
        std::vector<std::vector<cplx>> c(static_cast<std::size_t>(deg) + 1,
                                         std::vector<cplx>(static_cast<std::size_t>(deg) + 1, cplx(0.0)));
        std::size_t idx = 0;
        for (int d = 0; d <= deg; ++d)
            for (int i = d; i >= 0; --i) {
                if (idx >= coeffs.size()) fail(errc::parse_error, "too few bivariate coefficients");
                c[static_cast<std::size_t>(i)][static_cast<std::size_t>(d - i)] = coeffs[idx++];
            }
        if (idx != coeffs.size()) fail(errc::parse_error, "too many bivariate coefficients");
        return Poly2(std::move(c));
    }

    int max_degree() const { return static_cast<int>(c_.size()) - 1; }

    cplx coeff(int i, int j) const
    {
        if (i < 0 || j < 0 || i >= static_cast<int>(c_.size())) return 0.0;
        const auto& row = c_[static_cast<std::size_t>(i)];
        return j < static_cast<int>(row.size()) ? row[static_cast<std::size_t>(j)] : cplx(0.0);
    }

    cplx operator()(cplx x, cplx y) const
    {
        cplx acc(0.0);
        for (auto i = c_.size(); i-- > 0;) {
            cplx row(0.0);
            const auto& r = c_[i];
            for (auto j = r.size(); j-- > 0;) row = row * y + r[j];
            acc = acc * x + row;
        }
        return acc;
    }

    Poly2 dx() const
    {
        if (c_.size() <= 1) return Poly2{};
        std::vector<std::vector<cplx>> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) {
            d[i - 1] = c_[i];
            for (auto& v : d[i - 1]) v *= static_cast<double>(i);
        }
        return Poly2(std::move(d));
    }

    Poly2 dy() const
    {
        std::vector<std::vector<cplx>> d(c_.size());
        for (std::size_t i = 0; i < c_.size(); ++i) {
            const auto& r = c_[i];
            if (r.size() <= 1) {
                d[i] = {};
                continue;
            }
            d[i].resize(r.size() - 1);
            for (std::size_t j = 1; j < r.size(); ++j) d[i][j - 1] = static_cast<double>(j) * r[j];
        }
        return Poly2(std::move(d));
    }

    // restriction to a vertical line: polynomial in y at fixed x
    Poly at_x(cplx x) const
    {
        std::size_t ylen = 0;
        for (const auto& r : c_) ylen = std::max(ylen, r.size());
        std::vector<cplx> out(ylen, cplx(0.0));
        cplx xp(1.0);
        for (const auto& r : c_) {
            for (std::size_t j = 0; j < r.size(); ++j) out[j] += r[j] * xp;
            xp *= x;
        }
        return Poly(std::move(out));
    }

    // restriction to y = const, polynomial in x
    Poly at_y(cplx y) const
    {
        std::vector<cplx> out(c_.size(), cplx(0.0));
        for (std::size_t i = 0; i < c_.size(); ++i) {
            cplx acc(0.0);
            const auto& r = c_[i];
            for (auto j = r.size(); j-- > 0;) acc = acc * y + r[j];
            out[i] = acc;
        }
        return Poly(std::move(out));
    }

    double coeff_scale() const
    {
        double m = 0.0;
        for (const auto& r : c_)
            for (const auto& v : r) m = std::max(m, std::abs(v));
        return m;
    }

    // sum |c_ij| s^i t^j
    double abs_eval(double s, double t) const
    {
        double acc = 0.0;
        double sp = 1.0;
        for (const auto& r : c_) {
            double row = 0.0;
            for (auto j = r.size(); j-- > 0;) row = row * t + std::abs(r[j]);
            acc += sp * row;
            sp *= s;
        }
        return acc;
    }

private:
    std::vector<std::vector<cplx>> c_;
};

// Resultant of two univariate polynomials via the Sylvester determinant.
inline cplx resultant(const Poly& p, const Poly& q)
{
    int m = p.degree(), n = q.degree();
    if (m < 0 || n < 0) return 0.0;
    if (m == 0) return std::pow(p.coeff(0), n);
    if (n == 0) return std::pow(q.coeff(0), m);
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(m + n, m + n);
    for (int row = 0; row < n; ++row)
        for (int k = 0; k <= m; ++k) S(row, row + k) = p.coeff(m - k);
    for (int row = 0; row < m; ++row)
        for (int k = 0; k <= n; ++k) S(n + row, row + k) = q.coeff(n - k);
    return S.determinant();
}

// Coefficients of x -> resultant_y(P(x,.), Q(x,.)) recovered by evaluation at
// scaled roots of unity followed by an inverse DFT. degree_bound must be at
// least the true degree.
inline Poly resultant_in_x(const Poly2& P, const Poly2& Q, int degree_bound)
{
    const int N = degree_bound + 1;
    const double radius = 1.0; // unit circle keeps the Vandermonde perfectly conditioned
    std::vector<cplx> vals(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        cplx x = radius * std::polar(1.0, 2.0 * M_PI * i / N);
        vals[static_cast<std::size_t>(i)] = resultant(P.at_x(x), Q.at_x(x));
    }
    std::vector<cplx> coeffs(static_cast<std::size_t>(N), cplx(0.0));
    for (int k = 0; k < N; ++k) {
        cplx acc(0.0);
        for (int i = 0; i < N; ++i) acc += vals[static_cast<std::size_t>(i)] * std::polar(1.0, -2.0 * M_PI * k * i / N);
        coeffs[static_cast<std::size_t>(k)] = acc / static_cast<double>(N);
    }
    // kill DFT noise so degree/trailing tests behave
    double scale = 0.0;
    for (const auto& v : coeffs) scale = std::max(scale, std::abs(v));
    for (auto& v : coeffs)
        if (std::abs(v) < 1e-11 * scale) v = 0.0;
    return Poly(std::move(coeffs));
}

} // namespace curvcanon

#endif
