#ifndef CURVCANON_TESTS_TEST_CURVES_HPP
#define CURVCANON_TESTS_TEST_CURVES_HPP

#include <vector>

#include "curvcanon/curve.hpp"

namespace curvcanon::testing {

// y^2 = x^n - 1
inline CurveSpec unit_hyperelliptic(int n, const Tolerances& tol = {})
{
    std::vector<cplx> c(static_cast<std::size_t>(n) + 1, cplx(0.0));
    c[0] = -1.0;
    c.back() = 1.0;
    return construct_curve(CurveKind::hyperelliptic, c, tol);
}

// graded-lex coefficients of x^4 + y^4 - 1
inline std::vector<cplx> fermat_quartic_coeffs()
{
    std::vector<cplx> c(15, cplx(0.0));
    c[0] = -1.0; // 1
    c[10] = 1.0; // x^4
    c[14] = 1.0; // y^4
    return c;
}

inline CurveSpec fermat_quartic(const Tolerances& tol = {})
{
    return construct_curve(CurveKind::plane_quartic, fermat_quartic_coeffs(), tol);
}

// Frozen L2 Gram diagonals (inner product (i/2) Int w ^ conj(w)), computed from
// the closed angular-average series
//   (1/2pi) Int |1 - w|^{-2s} dphi = sum_m [(s)_m/m!]^2 |w|^{2m}
// summed radially in hypergeometric closed form, evaluated at 40 digits:
//   y^2 = x^n - 1:  G_kk = 4 pi sum_m a_m^2 [1/(2k+2nm) + 1/(n-2k+2nm)]
//   x^4 + y^4 = 1:  G_11 = G_22 = (pi/16)[S(3/4,1/4) + S(3/4,1/2)],
//                   G_33 = (pi/8) S(1/2,1/4)
// The coordinate symmetries force G_11 = G_22 (n = 6), G_11 = G_33 (n = 8) and
// all three diagonals equal on the Fermat quartic; the frozen values agree.
inline constexpr double gram_x5_g11 = 11.4200895567304497122;
inline constexpr double gram_x5_g22 = 16.6634804520514050255;
inline constexpr double gram_x6_g11 = 10.21623143566511307024;
inline constexpr double gram_x6_g22 = 10.21623143566511307024;
inline constexpr double gram_x8_g11 = 8.973175814411088600662;
inline constexpr double gram_x8_g22 = 6.87518581802037282749;
inline constexpr double gram_x8_g33 = 8.973175814411088600662;
inline constexpr double gram_fermat_g11 = 1.718796454505093206873;
inline constexpr double gram_fermat_g22 = 1.718796454505093206873;
inline constexpr double gram_fermat_g33 = 1.718796454505093206873;

} // namespace curvcanon::testing

#endif
