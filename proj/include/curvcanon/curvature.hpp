#ifndef CURVCANON_CURVATURE_HPP
#define CURVCANON_CURVATURE_HPP

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "curvcanon/curve.hpp"
#include "curvcanon/errors.hpp"
#include "curvcanon/gram.hpp"
#include "curvcanon/quadrature.hpp"

namespace curvcanon {

// Orthonormal-frame coefficients of the 1-form basis at a point: u = T u_raw,
// du = T du_raw in the point's chart. [u] in P^{g-1} is the canonical image of
// the point; |u|^2 is the pulled-back metric density in the chart coordinate.
struct FrameVector {
    Eigen::VectorXcd u;
    Eigen::VectorXcd du;
    ChartKind chart = ChartKind::x_chart;
};

struct CurvatureSample {
    CurvePoint point;
    double lambda = 0.0;     // metric density per |d(coord)|^2
    double theta = 0.0;      // Gaussian curvature, chart independent, <= 0
    double degeneracy = 0.0; // sigma_2 of rows {u, du}, normalized by |u|^2
};

inline FrameVector frame_at(const CurveSpec& spec, const GramData& gram, const CurvePoint& p)
{
    RawCoeffVector raw = standard_basis_eval(spec, p);
    FrameVector f;
    f.chart = raw.chart;
    f.u = gram.T * raw.u;
    f.du = gram.T * raw.du;
    if (f.u.norm() == 0.0)
        fail(errc::validation_error, "frame vector vanished; the canonical bundle is base-point free, so this "
                                     "signals numerical failure");
    return f;
}

// Projective canonical image of the point; the returned vector is the frame
// representative (any nonzero scalar multiple names the same point).
inline Eigen::VectorXcd canonical_map_point(const CurveSpec& spec, const GramData& gram, const CurvePoint& p)
{
    return frame_at(spec, gram, p).u;
}

inline double metric_density(const CurveSpec& spec, const GramData& gram, const CurvePoint& p)
{
    return frame_at(spec, gram, p).u.squaredNorm();
}

namespace detail {

// |u ^ du|^2 as an explicit sum of 2x2 minors; free of the cancellation the
// norm-product form suffers when du is nearly parallel to u
inline double wedge_norm_sq(const Eigen::VectorXcd& u, const Eigen::VectorXcd& du)
{
    double s = 0.0;
    for (int j = 0; j < u.size(); ++j)
        for (int k = j + 1; k < u.size(); ++k) s += std::norm(u(j) * du(k) - u(k) * du(j));
    return s;
}

inline CurvatureSample sample_from_frame(const CurvePoint& p, const FrameVector& f)
{
    CurvatureSample s;
    s.point = p;
    const double nu2 = f.u.squaredNorm();
    const double ndu2 = f.du.squaredNorm();
    const double wedge2 = wedge_norm_sq(f.u, f.du);
    s.lambda = nu2;
    s.theta = -2.0 * wedge2 / (nu2 * nu2);
    // second singular value of the 2 x g matrix with rows u, du:
    // sigma1^2 sigma2^2 = wedge2, sigma1^2 + sigma2^2 = nu2 + ndu2
    const double tr = nu2 + ndu2;
    const double disc = std::max(0.0, tr * tr - 4.0 * wedge2);
    const double sig2_sq = 2.0 * wedge2 / (tr + std::sqrt(disc));
    s.degeneracy = std::sqrt(std::max(0.0, sig2_sq)) / nu2;
    return s;
}

} // namespace detail

// Closed-form curvature of the pulled-back metric at a point:
//   theta = -2 |u ^ du|^2 / |u|^4
// with the convention curvature form = theta * (Kaehler form), i.e. theta is
// the Gaussian curvature of the density |u|^2 in the chart coordinate.
inline CurvatureSample curvature_at(const CurveSpec& spec, const GramData& gram, const CurvePoint& p)
{
    return detail::sample_from_frame(p, frame_at(spec, gram, p));
}

struct GridParams {
    int nx = 200;
    int ny = 200;
    double hull_factor = 1.5;    // rectangle = hull_factor * critical-point hull
    int disk_radii = 8;          // per-critical-point polar samples
    int disk_angles = 32;
    double disk_rho_min_rel = 1e-14;
    bool rect_set = false; // explicit window overrides the hull
    double rect_re_lo = 0.0, rect_re_hi = 0.0, rect_im_lo = 0.0, rect_im_hi = 0.0;
};

namespace detail {

struct Rect {
    double re_lo, re_hi, im_lo, im_hi;
    double extent() const { return std::max(re_hi - re_lo, im_hi - im_lo); }
};

inline Rect scan_rect(const CurveSpec& spec, const GridParams& grid)
{
    if (grid.rect_set) return {grid.rect_re_lo, grid.rect_re_hi, grid.rect_im_lo, grid.rect_im_hi};
    double re_lo = -1.0, re_hi = 1.0, im_lo = -1.0, im_hi = 1.0;
    if (!spec.critical_points().empty()) {
        re_lo = im_lo = std::numeric_limits<double>::infinity();
        re_hi = im_hi = -std::numeric_limits<double>::infinity();
        for (const auto& c : spec.critical_points()) {
            re_lo = std::min(re_lo, c.x.real());
            re_hi = std::max(re_hi, c.x.real());
            im_lo = std::min(im_lo, c.x.imag());
            im_hi = std::max(im_hi, c.x.imag());
        }
    }
    double cre = 0.5 * (re_lo + re_hi), cim = 0.5 * (im_lo + im_hi);
    double hre = std::max(0.5 * (re_hi - re_lo), 0.5), him = std::max(0.5 * (im_hi - im_lo), 0.5);
    double f = grid.hull_factor;
    return {cre - f * hre, cre + f * hre, cim - f * him, cim + f * him};
}

template <class Fn>
void for_each_scan_point(const CurveSpec& spec, const GridParams& grid, Fn&& emit)
{
    const Rect rect = scan_rect(spec, grid);
    auto visit_x = [&](cplx x) {
        for (const auto& y : spec.sheets(x)) {
            if (std::abs(spec.defining(x, y)) > spec.tol().residual * spec.eq_scale(x, y)) continue;
            CurvePoint p{x, y, auto_chart(spec, x, y)};
            emit(p);
        }
    };
    for (int iy = 0; iy < grid.ny; ++iy) {
        double im = rect.im_lo + (rect.im_hi - rect.im_lo) * (iy + 0.5) / grid.ny;
        for (int ix = 0; ix < grid.nx; ++ix) {
            double re = rect.re_lo + (rect.re_hi - rect.re_lo) * (ix + 0.5) / grid.nx;
            visit_x(cplx(re, im));
        }
    }
    // polar rings around every ramified fiber, radii graded down to the
    // quadratic-vanishing scale of theta
    for (const auto& c : spec.critical_points()) {
        double rho_max = 0.45 * spec.min_critical_separation();
        double rho_min = grid.disk_rho_min_rel * std::max(1.0, std::abs(c.x));
        for (int ir = 0; ir < grid.disk_radii; ++ir) {
            double t = grid.disk_radii == 1 ? 0.0 : static_cast<double>(ir) / (grid.disk_radii - 1);
            double rho = rho_max * std::pow(rho_min / rho_max, t);
            for (int ia = 0; ia < grid.disk_angles; ++ia) {
                double ang = 2.0 * M_PI * ia / grid.disk_angles;
                visit_x(c.x + std::polar(rho, ang));
            }
        }
    }
}

} // namespace detail

// Deterministic sweep: row-major rectangle grid over the x-chart window (all
// sheets), then the critical-fiber rings. Output order never depends on the
// thread count.
inline std::vector<CurvatureSample> scan_curvature(const CurveSpec& spec, const GramData& gram,
                                                   const GridParams& grid = {})
{
    std::vector<CurvePoint> pts;
    detail::for_each_scan_point(spec, grid, [&](const CurvePoint& p) { pts.push_back(p); });
    std::vector<CurvatureSample> out(pts.size());
    parallel_for(pts.size(), 0, [&](std::size_t i) { out[i] = curvature_at(spec, gram, pts[i]); });
    return out;
}

struct DegenerateCluster {
    CurvePoint center;
    int count = 0;
    double min_degeneracy = 0.0;
    double theta_at_center = 0.0;
};

// Grid points where the rank of {u, du} collapses, merged into clusters. For
// even hyperelliptic models these sit at the 2(g+1) branch points; for a
// smooth quartic the list is empty.
inline std::vector<DegenerateCluster> degenerate_points(const CurveSpec& spec, const GramData& gram,
                                                        const GridParams& grid = {})
{
    auto samples = scan_curvature(spec, gram, grid);
    const double tol = spec.tol().degeneracy;
    const double merge_radius = 1e-3 * std::max(1.0, detail::scan_rect(spec, grid).extent());

    std::vector<DegenerateCluster> clusters;
    for (const auto& s : samples) {
        if (s.degeneracy >= tol) continue;
        bool merged = false;
        for (auto& c : clusters) {
            if (std::abs(s.point.x - c.center.x) < merge_radius) {
                ++c.count;
                if (s.degeneracy < c.min_degeneracy) {
                    c.center = s.point;
                    c.min_degeneracy = s.degeneracy;
                }
                merged = true;
                break;
            }
        }
        if (!merged) clusters.push_back({s.point, 1, s.degeneracy, 0.0});
    }
    for (auto& c : clusters) c.theta_at_center = curvature_at(spec, gram, c.center).theta;
    return clusters;
}

struct GaussBonnetResult {
    double value = 0.0;
    double expected = 0.0;
    double rel_error = 0.0;
    QuadReport report;
};

namespace detail {

// per-sheet theta * lambda in the x-chart density; the sum over sheets is a
// single-valued function of x
struct GaussBonnetIntegrand {
    const CurveSpec* spec;
    const GramData* gram;

    double from_sheets(cplx x, const std::vector<cplx>& ys) const
    {
        double total = 0.0;
        for (const auto& y : ys) {
            CurvePoint p{x, y, auto_chart(*spec, x, y)};
            FrameVector f = frame_at(*spec, *gram, p);
            CurvatureSample s = sample_from_frame(p, f);
            double lambda_x = s.lambda;
            if (f.chart != ChartKind::x_chart) {
                Transition tr = transition_scale(*spec, p, f.chart, ChartKind::x_chart);
                lambda_x *= std::norm(tr.J);
            }
            total += s.theta * lambda_x;
        }
        return total;
    }

    double operator()(cplx x) const { return from_sheets(x, spec->sheets(x)); }
    double operator()(std::size_t patch, cplx x, cplx delta) const
    {
        return from_sheets(x, spec->sheets_near_critical(patch, delta));
    }
};

} // namespace detail

// Total curvature Int theta dA over all sheets of the x-plane; a global
// consistency check, the value is pinned to 2 pi (2 - 2g).
inline GaussBonnetResult gauss_bonnet_total(const CurveSpec& spec, const GramData& gram, QuadParams params = {})
{
    PlaneLayout lay = make_plane_layout(spec, params);
    detail::GaussBonnetIntegrand integrand{&spec, &gram};
    auto res = integrate_plane(lay, integrand, 0.0, params);
    if (!res.report.converged) {
        std::ostringstream os;
        os << "Gauss-Bonnet quadrature stalled with relative change " << res.report.est_rel_error;
        fail(errc::no_convergence, os.str());
    }
    GaussBonnetResult out;
    out.value = res.value;
    out.expected = 2.0 * M_PI * (2.0 - 2.0 * spec.genus());
    out.rel_error = std::abs(out.value - out.expected) / std::abs(out.expected);
    out.report = res.report;
    return out;
}

} // namespace curvcanon

#endif
