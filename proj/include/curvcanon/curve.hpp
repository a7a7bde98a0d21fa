#ifndef CURVCANON_CURVE_HPP
#define CURVCANON_CURVE_HPP

#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curvcanon/errors.hpp"
#include "curvcanon/poly.hpp"

namespace curvcanon {

enum class CurveKind { hyperelliptic, plane_quartic };

enum class ChartKind { x_chart, y_chart, inf_chart };

inline const char* chart_name(ChartKind c)
{
    switch (c) {
        case ChartKind::x_chart: return "x";
        case ChartKind::y_chart: return "y";
        case ChartKind::inf_chart: return "inf";
    }
    return "?";
}

struct Tolerances {
    double root_sep_rel = 1e-8;   // squarefree / smoothness root separation
    double residual = 1e-8;       // |defining equation| gate for points
    double chart_min = 1e-8;      // partial-derivative floor for chart validity
    double point_sep = 1e-6;      // divisor point distinctness
    double rank_rel = 1e-10;      // sigma_d > rank_rel * sigma_1
    double degeneracy = 1e-6;     // degenerate-locus detection
    double theta_pos = 1e-9;      // nonpositivity slack for scans
};

struct CurvePoint {
    cplx x;
    cplx y;
    ChartKind chart = ChartKind::x_chart;
};

// Values of the standard monomial basis of holomorphic 1-forms at a point:
// u[k] is the coefficient of the k-th basis form in the chart coordinate,
// du[k] its derivative with respect to that coordinate.
struct RawCoeffVector {
    Eigen::VectorXcd u;
    Eigen::VectorXcd du;
    ChartKind chart = ChartKind::x_chart;
};

// An x-value over which the projection to the x-line ramifies, together with
// the local grading exponent the quadrature needs there (lcm of the sheet
// multiplicities in the fiber).
struct CriticalPoint {
    cplx x;
    int grading = 2;
};

class CurveSpec {
public:
    CurveKind kind() const { return kind_; }
    int genus() const { return genus_; }
    int gonality_lower() const { return gonality_lower_; }
    const Tolerances& tol() const { return tol_; }

    // hyperelliptic data
    const Poly& f() const { return f_; }
    const Poly& fp() const { return fp_; }
    const Poly& fpp() const { return fpp_; }
    bool has_infinite_branch_point() const { return infinite_branch_; }
    const std::vector<cplx>& branch_points() const { return branch_points_; }

    // quartic data
    const Poly2& F() const { return F_; }
    const Poly2& Fx() const { return Fx_; }
    const Poly2& Fy() const { return Fy_; }
    const Poly2& Fxx() const { return Fxx_; }
    const Poly2& Fxy() const { return Fxy_; }
    const Poly2& Fyy() const { return Fyy_; }

    // x-projection structure shared by quadrature and scanning
    int sheet_count() const { return kind_ == CurveKind::hyperelliptic ? 2 : 4; }
    const std::vector<CriticalPoint>& critical_points() const { return critical_; }
    int grading_at_infinity() const { return grading_inf_; }
    double min_critical_separation() const { return min_crit_sep_; }
    double coeff_scale() const { return coeff_scale_; }

    // defining equation and its two partials
    cplx defining(cplx x, cplx y) const
    {
        if (kind_ == CurveKind::hyperelliptic) return y * y - f_(x);
        return F_(x, y);
    }
    cplx eq_dx(cplx x, cplx y) const
    {
        if (kind_ == CurveKind::hyperelliptic) return -fp_(x);
        return Fx_(x, y);
    }
    cplx eq_dy(cplx x, cplx y) const
    {
        if (kind_ == CurveKind::hyperelliptic) return 2.0 * y;
        return Fy_(x, y);
    }

    // magnitude scale of the defining equation at (x, y), for residual gating
    double eq_scale(cplx x, cplx y) const
    {
        double ax = std::abs(x), ay = std::abs(y);
        if (kind_ == CurveKind::hyperelliptic) return ay * ay + f_.abs_eval(ax) + 1.0;
        return F_.abs_eval(ax, ay) + 1.0;
    }

    // magnitude scales of the two partials, so chart validity is judged
    // relative to the size each partial could have at the point
    double dx_scale(cplx x, cplx y) const
    {
        double ax = std::abs(x), ay = std::abs(y);
        if (kind_ == CurveKind::hyperelliptic) return fp_.abs_eval(ax) + 1.0;
        return Fx_.abs_eval(ax, ay) + 1.0;
    }
    double dy_scale(cplx x, cplx y) const
    {
        double ax = std::abs(x), ay = std::abs(y);
        (void)ax;
        if (kind_ == CurveKind::hyperelliptic) return 2.0 * ay + 1.0;
        return Fy_.abs_eval(ax, ay) + 1.0;
    }

    // all sheets above x, in a deterministic order
    std::vector<cplx> sheets(cplx x) const
    {
        if (kind_ == CurveKind::hyperelliptic) {
            cplx s = std::sqrt(f_(x));
            return {s, -s};
        }
        Poly col = F_.at_x(x);
        return sheets_from_column(col.coeff(0), col.coeff(1), col.coeff(2), col.coeff(3));
    }

    // defining value and sheets near the i-th critical fiber, evaluated from
    // Taylor-shifted coefficients so tiny displacements keep full accuracy
    cplx f_near_critical(std::size_t i, cplx delta) const { return crit_f_shift_[i](delta); }

    std::vector<cplx> sheets_near_critical(std::size_t i, cplx delta) const
    {
        if (kind_ == CurveKind::hyperelliptic) {
            cplx s = std::sqrt(crit_f_shift_[i](delta));
            return {s, -s};
        }
        const auto& cs = crit_col_shift_[i];
        return sheets_from_column(cs[0](delta), cs[1](delta), cs[2](delta), cs[3](delta));
    }

    friend CurveSpec construct_curve(CurveKind, const std::vector<cplx>&, const Tolerances&);

private:
    CurveKind kind_ = CurveKind::hyperelliptic;
    int genus_ = 0;
    int gonality_lower_ = 2;
    Tolerances tol_;
    double coeff_scale_ = 1.0;

    Poly f_, fp_, fpp_;
    std::vector<cplx> branch_points_;
    bool infinite_branch_ = false;

    Poly2 F_, Fx_, Fy_, Fxx_, Fxy_, Fyy_;

    std::vector<CriticalPoint> critical_;
    std::vector<Poly> crit_f_shift_;                   // hyperelliptic: f(b + t)
    std::vector<std::array<Poly, 5>> crit_col_shift_;  // quartic: y-column coeffs at x = b + t
    int grading_inf_ = 1;
    double min_crit_sep_ = 0.0;

    std::vector<cplx> sheets_from_column(cplx c0, cplx c1, cplx c2, cplx c3) const
    {
        // total degree 4 forces the y^4 coefficient to be the constant c(0,4)
        cplx lead = F_.coeff(0, 4);
        auto rts = quartic_roots_monic(c3 / lead, c2 / lead, c1 / lead, c0 / lead);
        std::vector<cplx> out(rts.begin(), rts.end());
        std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
            if (a.real() != b.real()) return a.real() < b.real();
            return a.imag() < b.imag();
        });
        return out;
    }
};

namespace detail {

// group nearly-equal complex values; returns (representative, count) pairs
inline std::vector<std::pair<cplx, int>> cluster_values(std::vector<cplx> vals, double radius)
{
    std::vector<std::pair<cplx, int>> out;
    std::sort(vals.begin(), vals.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    std::vector<bool> used(vals.size(), false);
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (used[i]) continue;
        cplx sum = vals[i];
        int cnt = 1;
        used[i] = true;
        for (std::size_t j = i + 1; j < vals.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(vals[j] - sum / static_cast<double>(cnt)) < radius) {
                sum += vals[j];
                ++cnt;
                used[j] = true;
            }
        }
        out.emplace_back(sum / static_cast<double>(cnt), cnt);
    }
    return out;
}

inline double min_pairwise_distance(const std::vector<cplx>& pts)
{
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) m = std::min(m, std::abs(pts[i] - pts[j]));
    return m;
}

} // namespace detail

inline CurveSpec construct_curve(CurveKind kind, const std::vector<cplx>& coeffs, const Tolerances& tol = {})
{
    if (coeffs.empty()) fail(errc::parse_error, "empty coefficient list");
    CurveSpec spec;
    spec.kind_ = kind;
    spec.tol_ = tol;

    if (kind == CurveKind::hyperelliptic) {
        Poly f{std::vector<cplx>(coeffs)};
        if (f.degree() != static_cast<int>(coeffs.size()) - 1)
            fail(errc::unsupported_degree, "leading coefficient of f is zero");
        int n = f.degree();
        if (n < 5) fail(errc::unsupported_degree, "deg f = " + std::to_string(n) + " gives genus < 2 (need deg >= 5)");
        spec.f_ = f;
        spec.fp_ = f.derivative();
        spec.fpp_ = spec.fp_.derivative();
        spec.genus_ = (n - 1) / 2;
        spec.gonality_lower_ = 2;
        spec.coeff_scale_ = f.coeff_scale();

        auto roots = poly_roots(f);
        double scale = 1.0;
        for (const auto& r : roots) scale = std::max(scale, std::abs(r));
        double minsep = detail::min_pairwise_distance(roots);
        if (minsep <= tol.root_sep_rel * scale) {
            std::ostringstream os;
            os << "f has a repeated root near " << roots.front() << " (min separation " << minsep << ")";
            fail(errc::not_squarefree, os.str());
        }
        spec.branch_points_ = roots;
        spec.infinite_branch_ = (n % 2 == 1);
        spec.min_crit_sep_ = minsep;
        for (const auto& r : roots) {
            spec.critical_.push_back({r, 2});
            spec.crit_f_shift_.push_back(f.shifted(r));
        }
        spec.grading_inf_ = spec.infinite_branch_ ? 2 : 1;
        return spec;
    }

    // plane quartic, graded-lex coefficients, 15 entries
    if (coeffs.size() != 15) fail(errc::unsupported_degree, "plane quartic needs 15 graded-lex coefficients");
    Poly2 F = Poly2::from_graded_lex(coeffs, 4);
    if (F.coeff(0, 4) == cplx(0.0))
        fail(errc::unsupported_degree, "y^4 coefficient must be nonzero (projection to the x-line in general position)");
    bool deg4 = false;
    for (int i = 0; i <= 4; ++i)
        if (F.coeff(i, 4 - i) != cplx(0.0)) deg4 = true;
    if (!deg4) fail(errc::unsupported_degree, "total degree of F must be exactly 4");

    spec.F_ = F;
    spec.Fx_ = F.dx();
    spec.Fy_ = F.dy();
    spec.Fxx_ = spec.Fx_.dx();
    spec.Fxy_ = spec.Fx_.dy();
    spec.Fyy_ = spec.Fy_.dy();
    spec.genus_ = 3;
    spec.gonality_lower_ = 3;
    spec.coeff_scale_ = F.coeff_scale();

    const double cs = spec.coeff_scale_;

    // affine smoothness sweep: common zeros of F_x and F_y must not lie on F
    Poly crit = resultant_in_x(spec.Fx_, spec.Fy_, 25);
    if (crit.zero()) fail(errc::singular_curve, "F_x and F_y share a component");
    for (const auto& xc : poly_roots(crit)) {
        Poly gx = spec.Fx_.at_x(xc);
        Poly gy = spec.Fy_.at_x(xc);
        // candidate y values: roots of whichever restriction is a nonzero
        // polynomial (a vanishing restriction is satisfied by every y)
        std::vector<cplx> cands;
        if (gx.degree() >= 1 && (gy.degree() < 1 || gx.degree() <= gy.degree()))
            cands = poly_roots(gx);
        else if (gy.degree() >= 1)
            cands = poly_roots(gy);
        else if (gx.degree() <= 0 && gy.degree() <= 0 && std::abs(gx.coeff(0)) + std::abs(gy.coeff(0)) <
                                                             1e-9 * cs * std::pow(1.0 + std::abs(xc), 3.0))
            cands = poly_roots(F.at_x(xc)); // both partials vanish on the whole fiber
        for (const auto& yc : cands) {
            double ps = std::max(1.0, std::abs(xc)) * std::max(1.0, std::abs(yc));
            double pscale = cs * ps * ps * ps;
            if (std::abs(gx(yc)) < 1e-6 * pscale && std::abs(gy(yc)) < 1e-6 * pscale &&
                std::abs(F(xc, yc)) < 1e-6 * cs * ps * ps * ps * ps) {
                std::ostringstream os;
                os << "singular point near (" << xc << ", " << yc << ")";
                fail(errc::singular_curve, os.str());
            }
        }
    }

    // smoothness along the line at infinity: [1:t:0] with F4(1,t) = 0 is
    // singular iff t is a multiple root of F4 and the degree-3 part vanishes
    std::vector<cplx> f4c(5), f3c(4);
    for (int j = 0; j <= 4; ++j) f4c[static_cast<std::size_t>(j)] = F.coeff(4 - j, j);
    for (int j = 0; j <= 3; ++j) f3c[static_cast<std::size_t>(j)] = F.coeff(3 - j, j);
    Poly f4{std::move(f4c)}, f3{std::move(f3c)};
    auto inf_roots = poly_roots(f4);
    double rscale = 1.0;
    for (const auto& r : inf_roots) rscale = std::max(rscale, std::abs(r));
    auto clusters = detail::cluster_values(inf_roots, std::max(1e-5, tol.root_sep_rel * 10.0) * rscale);
    int lcm_inf = 1;
    for (const auto& [t0, mult] : clusters) {
        if (mult > 1 && std::abs(f3(t0)) < 1e-6 * cs * std::pow(std::max(1.0, std::abs(t0)), 3.0)) {
            std::ostringstream os;
            os << "singular point at infinity in direction y/x = " << t0;
            fail(errc::singular_curve, os.str());
        }
        lcm_inf = std::lcm(lcm_inf, mult);
    }
    spec.grading_inf_ = lcm_inf;

    // ramification of the x-projection: roots of the y-discriminant, merged so
    // a multiple discriminant root averages to its true location, then the
    // fiber multiplicities fix the local grading exponent
    Poly disc = resultant_in_x(F, spec.Fy_, 25);
    std::vector<cplx> crit_x;
    if (!disc.zero()) {
        auto droots = poly_roots(disc);
        double dscale = 1.0;
        for (const auto& r : droots) dscale = std::max(dscale, std::abs(r));
        for (const auto& [xc, m] : detail::cluster_values(droots, 1e-3 * dscale)) {
            (void)m;
            crit_x.push_back(xc);
        }
    }
    std::array<Poly, 5> columns;
    for (int j = 0; j <= 4; ++j) {
        std::vector<cplx> cj(5, cplx(0.0));
        for (int i = 0; i + j <= 4; ++i) cj[static_cast<std::size_t>(i)] = F.coeff(i, j);
        columns[static_cast<std::size_t>(j)] = Poly{std::move(cj)};
    }
    for (const auto& xc : crit_x) {
        auto ys = spec.sheets(xc);
        double yscale = 1.0;
        for (const auto& y : ys) yscale = std::max(yscale, std::abs(y));
        // colliding sheets split like (x-error)^{1/e}; the generous radius
        // only risks overestimating the grading, which is harmless
        int lcm = 1;
        for (const auto& [y0, mult] : detail::cluster_values(ys, 5e-2 * yscale)) {
            (void)y0;
            lcm = std::lcm(lcm, mult);
        }
        spec.critical_.push_back({xc, std::max(2, lcm)});
        std::array<Poly, 5> shifted;
        for (int j = 0; j <= 4; ++j) shifted[static_cast<std::size_t>(j)] = columns[static_cast<std::size_t>(j)].shifted(xc);
        spec.crit_col_shift_.push_back(std::move(shifted));
    }
    std::vector<cplx> cxs;
    for (const auto& c : spec.critical_) cxs.push_back(c.x);
    spec.min_crit_sep_ = cxs.size() > 1 ? detail::min_pairwise_distance(cxs) : 1.0;
    return spec;
}

inline int genus(const CurveSpec& spec) { return spec.genus(); }

struct GateResult {
    bool pass = false;
    std::string certificate;
};

// d < gonality lower bound is the precondition everything downstream of the
// symmetric product relies on; fail is a value, not an error.
inline GateResult gonality_gate(const CurveSpec& spec, int d)
{
    if (d < 1) fail(errc::validation_error, "divisor degree must be >= 1");
    GateResult r;
    r.pass = d < spec.gonality_lower();
    std::ostringstream os;
    if (spec.kind() == CurveKind::hyperelliptic)
        os << "gonality = 2 (hyperelliptic), d = " << d << (r.pass ? " < 2: pass" : " >= 2: fail");
    else
        os << "gonality >= 3 (smooth plane quartic is non-hyperelliptic), d = " << d
           << (r.pass ? " < 3: pass" : " >= 3: fail");
    r.certificate = os.str();
    return r;
}

inline bool chart_valid(const CurveSpec& spec, cplx x, cplx y, ChartKind chart)
{
    double rx = std::abs(spec.eq_dx(x, y)) / spec.dx_scale(x, y);
    double ry = std::abs(spec.eq_dy(x, y)) / spec.dy_scale(x, y);
    switch (chart) {
        case ChartKind::x_chart: return ry > spec.tol().chart_min;
        case ChartKind::y_chart: return rx > spec.tol().chart_min;
        case ChartKind::inf_chart:
            return spec.kind() == CurveKind::hyperelliptic && !spec.has_infinite_branch_point() &&
                   ry > spec.tol().chart_min && std::abs(x) > 0.0;
    }
    return false;
}

// the better-conditioned of the two finite charts (scale-free comparison)
inline ChartKind auto_chart(const CurveSpec& spec, cplx x, cplx y)
{
    double rx = std::abs(spec.eq_dx(x, y)) / spec.dx_scale(x, y);
    double ry = std::abs(spec.eq_dy(x, y)) / spec.dy_scale(x, y);
    return ry >= rx ? ChartKind::x_chart : ChartKind::y_chart;
}

inline CurvePoint make_point(const CurveSpec& spec, cplx x, cplx y, std::optional<ChartKind> chart = {})
{
    if (std::abs(spec.defining(x, y)) > spec.tol().residual * spec.eq_scale(x, y)) {
        std::ostringstream os;
        os << "(" << x << ", " << y << ") does not satisfy the curve equation (residual "
           << std::abs(spec.defining(x, y)) << ")";
        fail(errc::not_on_curve, os.str());
    }
    ChartKind c = chart ? *chart : auto_chart(spec, x, y);
    if (!chart_valid(spec, x, y, c)) {
        std::ostringstream os;
        os << chart_name(c) << "-chart invalid at (" << x << ", " << y << ")";
        fail(errc::chart_invalid, os.str());
    }
    return CurvePoint{x, y, c};
}

namespace detail {

// basis values in the x-chart (coefficients of forms against dx)
inline void basis_x_chart(const CurveSpec& spec, cplx x, cplx y, Eigen::VectorXcd& u, Eigen::VectorXcd& du)
{
    int g = spec.genus();
    u.resize(g);
    du.resize(g);
    if (spec.kind() == CurveKind::hyperelliptic) {
        // w_k = x^{k-1} dx / y
        cplx fpx = spec.fp()(x);
        cplx inv_y = 1.0 / y;
        cplx xp = 1.0; // x^{k-1}
        cplx xpm = 0.0; // (k-1) x^{k-2}
        for (int k = 1; k <= g; ++k) {
            u(k - 1) = xp * inv_y;
            du(k - 1) = xpm * inv_y - xp * fpx * 0.5 * inv_y * inv_y * inv_y;
            xpm = static_cast<double>(k) * xp;
            xp *= x;
        }
        return;
    }
    // adjoint basis {1, x, y} dx / F_y
    cplx fy = spec.Fy()(x, y);
    cplx fx = spec.Fx()(x, y);
    cplx yp = -fx / fy;
    cplx dfy = spec.Fxy()(x, y) + spec.Fyy()(x, y) * yp;
    cplx inv = 1.0 / fy;
    cplx m[3] = {1.0, x, y};
    cplx dm[3] = {0.0, 1.0, yp};
    for (int k = 0; k < 3; ++k) {
        u(k) = m[k] * inv;
        du(k) = dm[k] * inv - m[k] * dfy * inv * inv;
    }
}

// basis values in the y-chart (coefficients against dy)
inline void basis_y_chart(const CurveSpec& spec, cplx x, cplx y, Eigen::VectorXcd& u, Eigen::VectorXcd& du)
{
    int g = spec.genus();
    u.resize(g);
    du.resize(g);
    if (spec.kind() == CurveKind::hyperelliptic) {
        // dx = 2 y dy / f'(x): w_k = 2 x^{k-1} dy / f'(x), regular at branch points
        cplx fpx = spec.fp()(x);
        cplx fppx = spec.fpp()(x);
        cplx inv = 1.0 / fpx;
        cplx xp = 1.0, xpm = 0.0;
        for (int k = 1; k <= g; ++k) {
            u(k - 1) = 2.0 * xp * inv;
            du(k - 1) = 4.0 * y * (xpm * fpx - xp * fppx) * inv * inv * inv;
            xpm = static_cast<double>(k) * xp;
            xp *= x;
        }
        return;
    }
    // dx = -F_y dy / F_x: w_k = -m_k dy / F_x
    cplx fx = spec.Fx()(x, y);
    cplx fy = spec.Fy()(x, y);
    cplx xp = -fy / fx;
    cplx dfx = spec.Fxx()(x, y) * xp + spec.Fxy()(x, y);
    cplx inv = 1.0 / fx;
    cplx m[3] = {1.0, x, y};
    cplx dm[3] = {0.0, xp, 1.0};
    for (int k = 0; k < 3; ++k) {
        u(k) = -m[k] * inv;
        du(k) = -dm[k] * inv + m[k] * dfx * inv * inv;
    }
}

} // namespace detail

struct Transition {
    cplx J;  // d(coord_a) / d(coord_b)
    cplx dJ; // derivative of J with respect to coord_b
};

// Chart transition data at a point: u_b = u_a * J and du_b = du_a * J^2 + u_a * dJ.
inline Transition transition_scale(const CurveSpec& spec, const CurvePoint& p, ChartKind a, ChartKind b)
{
    if (!chart_valid(spec, p.x, p.y, a) || !chart_valid(spec, p.x, p.y, b))
        fail(errc::chart_invalid, "transition requested between charts not both valid at the point");
    if (a == b) return {1.0, 0.0};

    auto x_to_y = [&]() -> Transition {
        // J = dx/dy
        if (spec.kind() == CurveKind::hyperelliptic) {
            cplx fpx = spec.fp()(p.x);
            cplx J = 2.0 * p.y / fpx;
            cplx dJ = 2.0 / fpx - 4.0 * p.y * p.y * spec.fpp()(p.x) / (fpx * fpx * fpx);
            return {J, dJ};
        }
        cplx fx = spec.Fx()(p.x, p.y), fy = spec.Fy()(p.x, p.y);
        cplx J = -fy / fx;
        cplx xp = J; // dx/dy along the curve
        cplx dfy = spec.Fxy()(p.x, p.y) * xp + spec.Fyy()(p.x, p.y);
        cplx dfx = spec.Fxx()(p.x, p.y) * xp + spec.Fxy()(p.x, p.y);
        cplx dJ = -(dfy * fx - fy * dfx) / (fx * fx);
        return {J, dJ};
    };
    auto y_to_x = [&]() -> Transition {
        // J = dy/dx
        if (spec.kind() == CurveKind::hyperelliptic) {
            cplx fpx = spec.fp()(p.x);
            cplx J = fpx / (2.0 * p.y);
            cplx dJ = spec.fpp()(p.x) / (2.0 * p.y) - fpx * fpx / (4.0 * p.y * p.y * p.y);
            return {J, dJ};
        }
        cplx fx = spec.Fx()(p.x, p.y), fy = spec.Fy()(p.x, p.y);
        cplx J = -fx / fy;
        cplx yp = J;
        cplx dfx = spec.Fxx()(p.x, p.y) + spec.Fxy()(p.x, p.y) * yp;
        cplx dfy = spec.Fxy()(p.x, p.y) + spec.Fyy()(p.x, p.y) * yp;
        cplx dJ = -(dfx * fy - fx * dfy) / (fy * fy);
        return {J, dJ};
    };
    // t = 1/x
    auto x_to_inf = [&]() -> Transition { return {-p.x * p.x, 2.0 * p.x * p.x * p.x}; };
    auto inf_to_x = [&]() -> Transition { return {-1.0 / (p.x * p.x), 2.0 / (p.x * p.x * p.x)}; };

    if (a == ChartKind::x_chart && b == ChartKind::y_chart) return x_to_y();
    if (a == ChartKind::y_chart && b == ChartKind::x_chart) return y_to_x();
    if (a == ChartKind::x_chart && b == ChartKind::inf_chart) return x_to_inf();
    if (a == ChartKind::inf_chart && b == ChartKind::x_chart) return inf_to_x();

    // remaining pairs go through the x-chart: J_ab = J_ax * J_xb,
    // dJ_ab/db = dJ_ax/dx * J_xb^2 + J_ax * dJ_xb/db
    Transition ax = (a == ChartKind::y_chart) ? y_to_x() : inf_to_x();
    Transition xb = (b == ChartKind::y_chart) ? x_to_y() : x_to_inf();
    cplx J = ax.J * xb.J;
    // ax.dJ is d(J_ax)/dx; chain through x(b): d/db = J_xb * d/dx
    cplx dJ = ax.dJ * xb.J * xb.J + ax.J * xb.dJ;
    return {J, dJ};
}

// Standard monomial basis values in the point's chart.
inline RawCoeffVector standard_basis_eval(const CurveSpec& spec, const CurvePoint& p)
{
    if (std::abs(spec.defining(p.x, p.y)) > spec.tol().residual * spec.eq_scale(p.x, p.y))
        fail(errc::not_on_curve, "point does not satisfy the curve equation");
    if (!chart_valid(spec, p.x, p.y, p.chart)) {
        std::ostringstream os;
        os << chart_name(p.chart) << "-chart invalid at (" << p.x << ", " << p.y << ")";
        fail(errc::chart_invalid, os.str());
    }
    RawCoeffVector out;
    out.chart = p.chart;
    switch (p.chart) {
        case ChartKind::x_chart: detail::basis_x_chart(spec, p.x, p.y, out.u, out.du); break;
        case ChartKind::y_chart: detail::basis_y_chart(spec, p.x, p.y, out.u, out.du); break;
        case ChartKind::inf_chart: {
            Eigen::VectorXcd ux, dux;
            detail::basis_x_chart(spec, p.x, p.y, ux, dux);
            Transition tr = transition_scale(spec, p, ChartKind::x_chart, ChartKind::inf_chart);
            out.u = ux * tr.J;
            out.du = dux * tr.J * tr.J + ux * tr.dJ;
            break;
        }
    }
    for (int k = 0; k < out.u.size(); ++k)
        if (!std::isfinite(std::abs(out.u(k))) || !std::isfinite(std::abs(out.du(k))))
            fail(errc::chart_invalid, "non-finite basis values (chart unusable at this point)");
    return out;
}

} // namespace curvcanon

#endif
