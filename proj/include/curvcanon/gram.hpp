#ifndef CURVCANON_GRAM_HPP
#define CURVCANON_GRAM_HPP

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "curvcanon/curve.hpp"
#include "curvcanon/errors.hpp"
#include "curvcanon/quadrature.hpp"

namespace curvcanon {

// L2 structure of the 1-form basis. The inner product is
//   <w_j, w_k> = (i/2) Int_X w_j ^ conj(w_k),
// the (i/2) making (i/2) dx ^ d(conj x) the plane area element, so G is
// Hermitian positive definite. T is upper triangular with T G T^H = I; rows of
// T give the orthonormal frame in terms of the monomial basis.
struct GramData {
    Eigen::MatrixXcd G;
    Eigen::MatrixXcd T;
    QuadReport quad_report;
    std::vector<Eigen::MatrixXcd> level_values;
    double min_eigenvalue = 0.0;
    double condition = 0.0;
};

// Factor G = U U^H with U upper triangular (positive diagonal) and return
// T = U^{-1}. Done as a Cholesky on the index-reversed matrix so the pivot
// test stays explicit.
inline Eigen::MatrixXcd orthonormalizer(const Eigen::MatrixXcd& G)
{
    const Eigen::Index n = G.rows();
    if (G.cols() != n) fail(errc::validation_error, "Gram matrix must be square");
    Eigen::MatrixXcd R(n, n); // reversed-order copy
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) R(i, j) = G(n - 1 - i, n - 1 - j);

    const double pivot_floor = 1e-13 * std::max(1e-300, R.diagonal().real().maxCoeff());
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        cplx diag = R(j, j);
        for (Eigen::Index k = 0; k < j; ++k) diag -= L(j, k) * std::conj(L(j, k));
        double dr = diag.real();
        if (dr <= pivot_floor) {
            std::ostringstream os;
            os << "pivot " << dr << " at step " << j << " (matrix not positive definite)";
            fail(errc::not_positive_definite, os.str());
        }
        L(j, j) = std::sqrt(dr);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            cplx s = R(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= L(i, k) * std::conj(L(j, k));
            L(i, j) = s / L(j, j).real();
        }
    }
    Eigen::MatrixXcd U(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) U(i, j) = L(n - 1 - i, n - 1 - j);
    // U is upper triangular; invert by back substitution
    Eigen::MatrixXcd T = U.triangularView<Eigen::Upper>().solve(Eigen::MatrixXcd::Identity(n, n));
    return T;
}

namespace detail {

// pointwise Gram integrand: sum over sheets of u(x,y) u(x,y)^H in the x-chart
struct GramIntegrand {
    const CurveSpec* spec;
    int g;

    Eigen::MatrixXcd from_abs_f(cplx x, double abs_f) const
    {
        Eigen::VectorXcd v(g);
        cplx xp = 1.0;
        for (int k = 0; k < g; ++k) {
            v(k) = xp;
            xp *= x;
        }
        // both sheets contribute x^{j-1} conj(x)^{k-1} / |f|
        return (2.0 / abs_f) * (v * v.adjoint());
    }

    Eigen::MatrixXcd from_sheets(cplx x, const std::vector<cplx>& ys) const
    {
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(g, g);
        for (const auto& y : ys) {
            Eigen::Vector3cd m(1.0, x, y);
            double inv = 1.0 / std::norm(spec->Fy()(x, y));
            M += inv * (m * m.adjoint());
        }
        return M;
    }

    Eigen::MatrixXcd operator()(cplx x) const
    {
        if (spec->kind() == CurveKind::hyperelliptic) return from_abs_f(x, std::abs(spec->f()(x)));
        return from_sheets(x, spec->sheets(x));
    }

    // near a critical fiber, the defining data is evaluated in shifted form
    Eigen::MatrixXcd operator()(std::size_t patch, cplx x, cplx delta) const
    {
        if (spec->kind() == CurveKind::hyperelliptic)
            return from_abs_f(x, std::abs(spec->f_near_critical(patch, delta)));
        return from_sheets(x, spec->sheets_near_critical(patch, delta));
    }
};

} // namespace detail

inline GramData gram_matrix(const CurveSpec& spec, const QuadParams& params = {})
{
    const int g = spec.genus();
    PlaneLayout lay = make_plane_layout(spec, params);
    detail::GramIntegrand f{&spec, g};
    Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(g, g);
    auto res = integrate_plane(lay, f, zero, params);
    if (!res.report.converged) {
        std::ostringstream os;
        os << "Gram quadrature stalled at level " << res.report.levels.back().level << " with relative change "
           << res.report.est_rel_error << "; best estimate norm " << norm_of(res.value);
        fail(errc::no_convergence, os.str());
    }

    GramData out;
    out.G = 0.5 * (res.value + res.value.adjoint());
    out.quad_report = res.report;
    out.level_values = std::move(res.level_values);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.G);
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    double max_eig = es.eigenvalues().maxCoeff();
    if (out.min_eigenvalue <= 0.0)
        fail(errc::not_positive_definite, "computed Gram matrix has min eigenvalue " +
                                              std::to_string(out.min_eigenvalue));
    out.condition = max_eig / out.min_eigenvalue;
    out.T = orthonormalizer(out.G);
    return out;
}

} // namespace curvcanon

#endif
