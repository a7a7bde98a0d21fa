#ifndef CURVCANON_QUADRATURE_HPP
#define CURVCANON_QUADRATURE_HPP

#include <atomic>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "curvcanon/curve.hpp"
#include "curvcanon/errors.hpp"

namespace curvcanon {

// ---------------------------------------------------------------------------
// deterministic parallel reduction helpers

inline unsigned hardware_threads_cap()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CURVCANON_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

// Runs fn(i) for i in [0, n). Work items write only to their own slot, so the
// result is independent of the thread count.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn)
{
    if (n == 0) return;
    unsigned t = threads == 0 ? hardware_threads_cap() : threads;
    t = static_cast<unsigned>(std::min<std::size_t>(t, n));
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned k = 0; k < t; ++k)
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    for (auto& th : pool) th.join();
}

// Neumaier compensated accumulator; works for scalars and Eigen matrices.
template <class V>
struct Accum {
    V sum;
    V comp;

    explicit Accum(const V& zero) : sum(zero), comp(zero) {}

    void add(const V& x)
    {
        V t = sum + x;
        comp += (sum - t) + x;
        sum = t;
    }

    V total() const { return sum + comp; }
};

inline double norm_of(double v) { return std::abs(v); }
inline double norm_of(const std::complex<double>& v) { return std::abs(v); }
inline double norm_of(const Eigen::MatrixXcd& m) { return m.norm(); }

// ---------------------------------------------------------------------------
// 1D rules

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
// three-term recurrence.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[static_cast<std::size_t>(i)] = -z;
        x[static_cast<std::size_t>(n - 1 - i)] = z;
        w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
    }
}

// C^4 smoothstep: 0 at s <= 0, 1 at s >= 1 (exact at the ends).
inline double smoothstep4(double s)
{
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    double s2 = s * s;
    return s2 * s2 * s * (126.0 + s * (-420.0 + s * (540.0 + s * (-315.0 + s * 70.0))));
}

// ---------------------------------------------------------------------------
// plane decomposition

struct QuadParams {
    double target_rel = 1e-7;  // level-to-level relative change to accept
    int max_level = 7;
    double radius_factor = 1.0 / 3.0; // singular-patch radius / min critical separation
    double far_radius = 0.0;          // 0 = automatic
    double far_phase = 0.0;           // angular offset of the far-field nodes
    unsigned threads = 0;             // 0 = CURVCANON_THREADS / hardware
};

struct SingularPatch {
    cplx center;
    double radius = 0.0;
    int grading = 2; // rho = s^grading removes |x - center|^{-k/grading} singularities
};

struct PlaneLayout {
    std::vector<SingularPatch> patches;
    double far_R = 2.0;   // far field lives on |x| > far_R via w = 1/x
    int far_grading = 1;  // grading of the w-patch at w = 0
    double far_phase = 0.0;

    double chi_patch(std::size_t i, double rho) const
    {
        const double r = patches[i].radius;
        return 1.0 - smoothstep4((2.0 * rho - r) / r);
    }
    double chi_far(double rho) const { return smoothstep4(rho / far_R - 1.0); }
    double chi_mid(cplx x) const
    {
        double c = 1.0 - chi_far(std::abs(x));
        for (std::size_t i = 0; i < patches.size(); ++i) {
            double rho = std::abs(x - patches[i].center);
            if (rho < patches[i].radius) c -= chi_patch(i, rho);
        }
        return c;
    }
};

// Patches around each ramified fiber, sized off the minimum separation, plus
// the inversion chart beyond far_R. The cutoffs overlap nowhere, so the three
// weight families sum to one exactly.
inline PlaneLayout make_plane_layout(const CurveSpec& spec, const QuadParams& params)
{
    PlaneLayout lay;
    double sep = spec.min_critical_separation();
    double scale = 1.0;
    for (const auto& c : spec.critical_points()) scale = std::max(scale, std::abs(c.x));
    double factor = std::min(params.radius_factor, 0.45);
    double radius = factor * sep;
    if (radius < 1e-9 * scale)
        fail(errc::singularity_saturation,
             "critical fibers separated by " + std::to_string(sep) + " leave no room for singular patches");
    for (const auto& c : spec.critical_points()) lay.patches.push_back({c.x, radius, c.grading});
    double autoR = 1.25 * (scale + radius);
    lay.far_R = std::max({1.5, autoR, params.far_radius});
    lay.far_grading = std::max(1, spec.grading_at_infinity());
    lay.far_phase = params.far_phase;
    return lay;
}

struct QuadLevel {
    int level = 0;
    double value_norm = 0.0;
    double rel_change = 0.0;
};

struct QuadReport {
    std::vector<QuadLevel> levels;
    double est_rel_error = 0.0;
    bool converged = false;
    std::size_t evaluations = 0;
};

namespace detail {

// Integrands may provide a patch-aware overload f(patch_index, x, delta) with
// x = center + delta; near a singular fiber the displacement carries the full
// precision that recomputing x - center would destroy.
template <class V, class F>
V call_integrand(F&& f, std::size_t ip, cplx x, cplx delta)
{
    if constexpr (requires { { f(ip, x, delta) } -> std::convertible_to<V>; })
        return f(ip, x, delta);
    else
        return f(x);
}

// radial nodes: Gauss-Legendre per panel, panels split at the cutoff
// junctions so every panel integrand is smooth
inline void panel_nodes(const std::vector<double>& breaks, int ns_per_panel, std::vector<double>& s,
                        std::vector<double>& w)
{
    std::vector<double> gx, gw;
    gauss_legendre(ns_per_panel, gx, gw);
    s.clear();
    w.clear();
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p], b = breaks[p + 1];
        if (b <= a) continue;
        for (int i = 0; i < ns_per_panel; ++i) {
            s.push_back(0.5 * (b - a) * (gx[static_cast<std::size_t>(i)] + 1.0) + a);
            w.push_back(0.5 * (b - a) * gw[static_cast<std::size_t>(i)]);
        }
    }
}

// one polar patch: x = center + s^E e^{i psi}, panelled GL in s, trapezoid in psi
template <class V, class F>
V integrate_patch(const PlaneLayout& lay, std::size_t ip, F&& f, const V& zero, int ns, int npsi, unsigned threads,
                  std::size_t& evals)
{
    const auto& p = lay.patches[ip];
    const double E = p.grading;
    std::vector<double> sn, sw;
    panel_nodes({0.0, std::pow(0.5 * p.radius, 1.0 / E), std::pow(p.radius, 1.0 / E)}, ns, sn, sw);
    std::vector<V> lines(static_cast<std::size_t>(npsi), zero);
    parallel_for(static_cast<std::size_t>(npsi), threads, [&](std::size_t j) {
        const double psi = 2.0 * M_PI * static_cast<double>(j) / npsi;
        const cplx dir = std::polar(1.0, psi);
        Accum<V> acc(zero);
        for (std::size_t i = 0; i < sn.size(); ++i) {
            const double s = sn[i];
            const double rho = std::pow(s, E);
            const double jac = E * std::pow(s, 2.0 * E - 1.0) * sw[i] * (2.0 * M_PI / npsi);
            const double chi = lay.chi_patch(ip, rho);
            if (chi == 0.0) continue;
            const cplx delta = rho * dir;
            V val = call_integrand<V>(f, ip, p.center + delta, delta);
            val *= (jac * chi);
            acc.add(val);
        }
        lines[j] = acc.total();
    });
    evals += sn.size() * static_cast<std::size_t>(npsi);
    Accum<V> out(zero);
    for (const auto& v : lines) out.add(v);
    return out.total();
}

// midfield: global polar coordinates on |x| <= 2 far_R with the blended weight
template <class V, class F>
V integrate_mid(const PlaneLayout& lay, F&& f, const V& zero, int nr, int nphi, unsigned threads, std::size_t& evals)
{
    const double rmax = 2.0 * lay.far_R;
    std::vector<double> gx, gw;
    gauss_legendre(nr, gx, gw);
    std::vector<V> lines(static_cast<std::size_t>(nphi), zero);
    parallel_for(static_cast<std::size_t>(nphi), threads, [&](std::size_t j) {
        const double phi = 2.0 * M_PI * static_cast<double>(j) / nphi;
        const cplx dir = std::polar(1.0, phi);
        Accum<V> acc(zero);
        for (int i = 0; i < nr; ++i) {
            const double r = 0.5 * rmax * (gx[static_cast<std::size_t>(i)] + 1.0);
            const cplx x = r * dir;
            const double chi = lay.chi_mid(x);
            if (chi == 0.0) continue;
            const double jac = r * 0.5 * rmax * gw[static_cast<std::size_t>(i)] * (2.0 * M_PI / nphi);
            V val = f(x);
            val *= (jac * chi);
            acc.add(val);
        }
        lines[j] = acc.total();
    });
    evals += static_cast<std::size_t>(nr) * static_cast<std::size_t>(nphi);
    Accum<V> out(zero);
    for (const auto& v : lines) out.add(v);
    return out.total();
}

// far field via w = 1/x on |w| < 1/far_R, graded at w = 0
template <class V, class F>
V integrate_far(const PlaneLayout& lay, F&& f, const V& zero, int ns, int nphi, unsigned threads, std::size_t& evals)
{
    const double E = lay.far_grading;
    std::vector<double> sn, sw;
    panel_nodes({0.0, std::pow(0.5 / lay.far_R, 1.0 / E), std::pow(1.0 / lay.far_R, 1.0 / E)}, ns, sn, sw);
    std::vector<V> lines(static_cast<std::size_t>(nphi), zero);
    parallel_for(static_cast<std::size_t>(nphi), threads, [&](std::size_t j) {
        const double phi = lay.far_phase + 2.0 * M_PI * static_cast<double>(j) / nphi;
        const cplx dir = std::polar(1.0, phi);
        Accum<V> acc(zero);
        for (std::size_t i = 0; i < sn.size(); ++i) {
            const double s = sn[i];
            const double rho = std::pow(s, E);
            const cplx w = rho * dir;
            const cplx x = 1.0 / w;
            const double chi = lay.chi_far(std::abs(x));
            if (chi == 0.0) continue;
            // dA(x) = |w|^{-4} dA(w)
            const double jac = E * std::pow(s, 2.0 * E - 1.0) * sw[i] * (2.0 * M_PI / nphi) /
                               (rho * rho * rho * rho);
            V val = f(x);
            val *= (jac * chi);
            acc.add(val);
        }
        lines[j] = acc.total();
    });
    evals += sn.size() * static_cast<std::size_t>(nphi);
    Accum<V> out(zero);
    for (const auto& v : lines) out.add(v);
    return out.total();
}

} // namespace detail

template <class V>
struct IntegrateResult {
    V value;
    std::vector<V> level_values;
    QuadReport report;

    explicit IntegrateResult(const V& zero) : value(zero) {}
};

// Whole-plane integral of f with refinement until two consecutive levels agree
// to target_rel. f must be smooth away from the layout's singular fibers.
template <class V, class F>
IntegrateResult<V> integrate_plane(const PlaneLayout& lay, F&& f, const V& zero, const QuadParams& params)
{
    IntegrateResult<V> res(zero);
    constexpr int base_patch_s = 12, base_patch_psi = 24;
    constexpr int base_mid_r = 64, base_mid_phi = 128;
    constexpr int base_far_s = 12, base_far_phi = 24;

    for (int level = 0; level <= params.max_level; ++level) {
        const int scale = 1 << level;
        V total = zero;
        {
            Accum<V> acc(zero);
            for (std::size_t i = 0; i < lay.patches.size(); ++i)
                acc.add(detail::integrate_patch(lay, i, f, zero, base_patch_s * scale, base_patch_psi * scale,
                                                params.threads, res.report.evaluations));
            acc.add(detail::integrate_mid(lay, f, zero, base_mid_r * scale, base_mid_phi * scale, params.threads,
                                          res.report.evaluations));
            acc.add(detail::integrate_far(lay, f, zero, base_far_s * scale, base_far_phi * scale, params.threads,
                                          res.report.evaluations));
            total = acc.total();
        }
        res.level_values.push_back(total);
        QuadLevel ql;
        ql.level = level;
        ql.value_norm = norm_of(total);
        if (level > 0) {
            V diff = total - res.level_values[static_cast<std::size_t>(level - 1)];
            double denom = std::max(norm_of(total), 1e-300);
            ql.rel_change = norm_of(diff) / denom;
        }
        res.report.levels.push_back(ql);
        res.value = total;
        if (level > 0 && ql.rel_change <= params.target_rel) {
            res.report.converged = true;
            res.report.est_rel_error = ql.rel_change;
            return res;
        }
    }
    res.report.converged = false;
    res.report.est_rel_error = res.report.levels.back().rel_change;
    return res;
}

} // namespace curvcanon

#endif
