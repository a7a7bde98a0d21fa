#ifndef CURVCANON_SYMPROD_HPP
#define CURVCANON_SYMPROD_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "curvcanon/curvature.hpp"
#include "curvcanon/curve.hpp"
#include "curvcanon/errors.hpp"
#include "curvcanon/gram.hpp"

namespace curvcanon {

// d distinct points with d below the gonality bound; the regime where the
// symmetric product embeds into the degree-d Picard torus.
struct DivisorConfig {
    std::vector<CurvePoint> points;
    int d() const { return static_cast<int>(points.size()); }
};

inline DivisorConfig make_divisor(const CurveSpec& spec, std::vector<CurvePoint> points)
{
    if (points.empty()) fail(errc::validation_error, "divisor needs at least one point");
    int d = static_cast<int>(points.size());
    auto gate = gonality_gate(spec, d);
    if (!gate.pass) fail(errc::gate_failed, gate.certificate);
    double scale = 1.0;
    for (const auto& p : points) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            double sep = std::abs(points[i].x - points[j].x) + std::abs(points[i].y - points[j].y);
            if (sep <= spec.tol().point_sep * scale) {
                std::ostringstream os;
                os << "divisor points " << i << " and " << j << " coincide within tolerance (separation " << sep
                   << ")";
                fail(errc::points_not_distinct, os.str());
            }
        }
    return DivisorConfig{std::move(points)};
}

// Column i holds the orthonormal-frame vector u(p_i) in that point's chart;
// the matrix of the Picard differential on the coordinate tangent frame.
struct EvaluationMatrix {
    Eigen::MatrixXcd A; // g x d
    Eigen::VectorXd singular_values;
};

inline EvaluationMatrix evaluation_matrix(const CurveSpec& spec, const GramData& gram, const DivisorConfig& div)
{
    const int g = spec.genus();
    const int d = div.d();
    EvaluationMatrix em;
    em.A.resize(g, d);
    for (int i = 0; i < d; ++i) em.A.col(i) = frame_at(spec, gram, div.points[static_cast<std::size_t>(i)]).u;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(em.A);
    em.singular_values = svd.singularValues();
    const double tol = spec.tol().rank_rel * em.singular_values(0);
    if (em.singular_values(d - 1) <= tol) {
        std::ostringstream os;
        os << "evaluation matrix rank deficient (sigma_" << d << " = " << em.singular_values(d - 1)
           << "); with d below the gonality the sections of the divisor are constants only, so this signals "
              "numerical failure, not geometry";
        fail(errc::rank_deficient, os.str());
    }
    return em;
}

// Pulled-back cotangent metric on the coordinate frame at the divisor:
// tangent Gram is A^H A, the dual frame carries its inverse.
inline Eigen::MatrixXcd phi_cotangent_metric(const EvaluationMatrix& em)
{
    Eigen::MatrixXcd M = (em.A.adjoint() * em.A).inverse();
    return 0.5 * (M + M.adjoint());
}

// Independent route: treat C^d as the quotient of C^g by the kernel of the
// evaluation map, identify it with the kernel's orthogonal complement, and
// read the induced norm off least-norm lifts of the frame covectors. The
// frame identification with the cotangent side is linear (residue pairing),
// which conjugates the lift Gram once.
inline Eigen::MatrixXcd grassmann_quotient_metric(const EvaluationMatrix& em)
{
    const Eigen::Index g = em.A.rows(), d = em.A.cols();
    Eigen::MatrixXcd B = em.A.transpose(); // the quotient map C^g -> C^d
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sig = svd.singularValues();

    // orthogonal projector onto the complement of ker B
    Eigen::MatrixXcd range = svd.matrixV().leftCols(d);
    Eigen::MatrixXcd proj = range * range.adjoint();

    Eigen::MatrixXcd lifts(g, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        Eigen::VectorXcd rhs = svd.matrixU().adjoint() * Eigen::VectorXcd::Unit(d, i);
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(g);
        for (Eigen::Index k = 0; k < d; ++k) c += (rhs(k) / sig(k)) * svd.matrixV().col(k);
        lifts.col(i) = proj * c; // already in the complement; projection is a no-op up to rounding
    }
    Eigen::MatrixXcd M = (lifts.adjoint() * lifts).transpose();
    return 0.5 * (M + M.adjoint());
}

struct TrialResult {
    double rel_dev = 0.0;
    double sigma_d = 0.0;
    std::vector<CurvePoint> points;
};

struct Theorem1Report {
    int d = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    double max_rel_dev = 0.0;
    double min_sigma_d = 0.0;
    double eig_min = 0.0; // over all trials, spectrum of the cotangent metric
    double eig_max = 0.0;
    double tol_agree = 1e-8;
    std::vector<TrialResult> per_trial;
    std::vector<int> failures;
};

namespace detail {

inline double unit_double(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// uniform divisor on the scan window; resamples on chart trouble or proximity
inline DivisorConfig random_divisor(const CurveSpec& spec, int d, std::mt19937_64& rng, const GridParams& grid = {})
{
    const Rect rect = scan_rect(spec, grid);
    for (int attempt = 0; attempt < 2000; ++attempt) {
        std::vector<CurvePoint> pts;
        bool ok = true;
        for (int i = 0; i < d && ok; ++i) {
            cplx x(rect.re_lo + (rect.re_hi - rect.re_lo) * unit_double(rng),
                   rect.im_lo + (rect.im_hi - rect.im_lo) * unit_double(rng));
            auto ys = spec.sheets(x);
            std::size_t si = static_cast<std::size_t>(rng() % ys.size());
            cplx y = ys[si];
            if (std::abs(spec.defining(x, y)) > spec.tol().residual * spec.eq_scale(x, y)) {
                ok = false;
                break;
            }
            if (!chart_valid(spec, x, y, ChartKind::x_chart)) {
                ok = false;
                break;
            }
            pts.push_back(CurvePoint{x, y, ChartKind::x_chart});
        }
        if (!ok) continue;
        double scale = 1.0;
        for (const auto& p : pts) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
        bool distinct = true;
        for (std::size_t i = 0; i < pts.size() && distinct; ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                if (std::abs(pts[i].x - pts[j].x) + std::abs(pts[i].y - pts[j].y) <=
                    10.0 * spec.tol().point_sep * scale) {
                    distinct = false;
                    break;
                }
        if (!distinct) continue;
        return DivisorConfig{std::move(pts)};
    }
    fail(errc::validation_error, "could not sample a valid divisor (window too hostile?)");
}

} // namespace detail

inline TrialResult check_divisor(const CurveSpec& spec, const GramData& gram, const DivisorConfig& div)
{
    EvaluationMatrix em = evaluation_matrix(spec, gram, div);
    Eigen::MatrixXcd Mphi = phi_cotangent_metric(em);
    Eigen::MatrixXcd Mrho = grassmann_quotient_metric(em);
    TrialResult t;
    t.rel_dev = (Mphi - Mrho).norm() / Mphi.norm();
    t.sigma_d = em.singular_values(div.d() - 1);
    t.points = div.points;
    return t;
}

// Seeded random-divisor agreement run between the two metric constructions.
// Never throws on disagreement; callers inspect `failures`.
inline Theorem1Report run_theorem1_trials(const CurveSpec& spec, const GramData& gram, int d, int trials,
                                          std::uint64_t seed, double tol_agree = 1e-8)
{
    auto gate = gonality_gate(spec, d);
    if (!gate.pass) fail(errc::gate_failed, gate.certificate);
    Theorem1Report rep;
    rep.d = d;
    rep.trials = trials;
    rep.seed = seed;
    rep.tol_agree = tol_agree;
    rep.eig_min = std::numeric_limits<double>::infinity();
    rep.eig_max = 0.0;
    rep.min_sigma_d = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);
    for (int i = 0; i < trials; ++i) {
        DivisorConfig div = detail::random_divisor(spec, d, rng);
        EvaluationMatrix em = evaluation_matrix(spec, gram, div);
        Eigen::MatrixXcd Mphi = phi_cotangent_metric(em);
        Eigen::MatrixXcd Mrho = grassmann_quotient_metric(em);
        TrialResult t;
        t.rel_dev = (Mphi - Mrho).norm() / Mphi.norm();
        t.sigma_d = em.singular_values(d - 1);
        t.points = div.points;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Mphi);
        rep.eig_min = std::min(rep.eig_min, es.eigenvalues().minCoeff());
        rep.eig_max = std::max(rep.eig_max, es.eigenvalues().maxCoeff());
        rep.max_rel_dev = std::max(rep.max_rel_dev, t.rel_dev);
        rep.min_sigma_d = std::min(rep.min_sigma_d, t.sigma_d);
        if (t.rel_dev >= tol_agree) rep.failures.push_back(i);
        rep.per_trial.push_back(std::move(t));
    }
    return rep;
}

// Same run, but a disagreement is an error carrying the offending divisor.
inline Theorem1Report theorem1_check(const CurveSpec& spec, const GramData& gram, int d, int trials,
                                     std::uint64_t seed, double tol_agree = 1e-8)
{
    Theorem1Report rep = run_theorem1_trials(spec, gram, d, trials, seed, tol_agree);
    if (!rep.failures.empty()) {
        const TrialResult& t = rep.per_trial[static_cast<std::size_t>(rep.failures.front())];
        std::ostringstream os;
        os << "metric agreement failed at trial " << rep.failures.front() << " (relative deviation " << t.rel_dev
           << "); divisor:";
        for (const auto& p : t.points) os << " (" << p.x << ", " << p.y << ")";
        fail(errc::agreement_failed, os.str());
    }
    return rep;
}

} // namespace curvcanon

#endif
