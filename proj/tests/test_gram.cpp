#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "curvcanon/gram.hpp"
#include "support/oracles.hpp"
#include "support/test_curves.hpp"

using namespace curvcanon;
namespace tc = curvcanon::testing;

TEST_CASE("orthonormalizer on pinned matrices")
{
    Eigen::MatrixXcd I2 = Eigen::MatrixXcd::Identity(2, 2);
    CHECK((orthonormalizer(I2) - I2).norm() < 1e-14);

    Eigen::MatrixXcd D(2, 2);
    D << 4.0, 0.0, 0.0, 9.0;
    Eigen::MatrixXcd T = orthonormalizer(D);
    CHECK(std::abs(T(0, 0) - 0.5) < 1e-14);
    CHECK(std::abs(T(1, 1) - 1.0 / 3.0) < 1e-14);
    CHECK(std::abs(T(0, 1)) < 1e-14);
    CHECK(std::abs(T(1, 0)) < 1e-14);
}

TEST_CASE("orthonormalizer is upper triangular and inverts the Gram form")
{
    std::mt19937_64 rng(11);
    auto u = [&]() { return cplx(2.0 * (rng() >> 11) * 0x1.0p-53 - 1.0, 2.0 * (rng() >> 11) * 0x1.0p-53 - 1.0); };
    for (int trial = 0; trial < 25; ++trial) {
        Eigen::MatrixXcd A(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) A(i, j) = u();
        Eigen::MatrixXcd G = A * A.adjoint() + 0.1 * Eigen::MatrixXcd::Identity(3, 3);
        Eigen::MatrixXcd T = orthonormalizer(G);
        CHECK((T * G * T.adjoint() - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-12);
        CHECK(std::abs(T(1, 0)) + std::abs(T(2, 0)) + std::abs(T(2, 1)) < 1e-14);
        CHECK(T(0, 0).imag() == 0.0);
    }
}

TEST_CASE("orthonormalizer rejects indefinite matrices")
{
    Eigen::MatrixXcd M(2, 2);
    M << 1.0, 2.0, 2.0, 1.0; // eigenvalues 3, -1
    CHECK_THROWS_MATCHES(orthonormalizer(M), error, Catch::Matchers::Predicate<error>([](const error& e) {
                             return e.kind() == errc::not_positive_definite;
                         }));
}

TEST_CASE("Gram matrix of y^2 = x^6 - 1 matches the frozen oracle values")
{
    auto spec = tc::unit_hyperelliptic(6);
    GramData gd = gram_matrix(spec);

    CHECK(gd.quad_report.converged);
    CHECK((gd.G - gd.G.adjoint()).norm() < 1e-12 * gd.G.norm());
    CHECK(gd.min_eigenvalue > 0.0);

    CHECK(std::abs(gd.G(0, 0).real() - tc::gram_x6_g11) < 2e-6 * tc::gram_x6_g11);
    CHECK(std::abs(gd.G(1, 1).real() - tc::gram_x6_g22) < 2e-6 * tc::gram_x6_g22);
    // rotational symmetry forces orthogonality of the basis
    CHECK(std::abs(gd.G(0, 1)) < 1e-6 * std::sqrt(tc::gram_x6_g11 * tc::gram_x6_g22));

    CHECK((gd.T * gd.G * gd.T.adjoint() - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-10);
}

TEST_CASE("Gram diagonals for the odd model y^2 = x^5 - 1")
{
    auto spec = tc::unit_hyperelliptic(5);
    GramData gd = gram_matrix(spec);
    CHECK(std::abs(gd.G(0, 0).real() - tc::gram_x5_g11) < 2e-6 * tc::gram_x5_g11);
    CHECK(std::abs(gd.G(1, 1).real() - tc::gram_x5_g22) < 2e-6 * tc::gram_x5_g22);
    CHECK(std::abs(gd.G(0, 1)) < 1e-6 * std::sqrt(tc::gram_x5_g11 * tc::gram_x5_g22));
}

TEST_CASE("Gram diagonals for y^2 = x^8 - 1")
{
    auto spec = tc::unit_hyperelliptic(8);
    GramData gd = gram_matrix(spec);
    CHECK(std::abs(gd.G(0, 0).real() - tc::gram_x8_g11) < 2e-6 * tc::gram_x8_g11);
    CHECK(std::abs(gd.G(1, 1).real() - tc::gram_x8_g22) < 2e-6 * tc::gram_x8_g22);
    CHECK(std::abs(gd.G(2, 2).real() - tc::gram_x8_g33) < 2e-6 * tc::gram_x8_g33);
    for (int j = 0; j < 3; ++j)
        for (int k = j + 1; k < 3; ++k)
            CHECK(std::abs(gd.G(j, k)) < 1e-6 * std::sqrt(gd.G(j, j).real() * gd.G(k, k).real()));
}

TEST_CASE("Gram matrix of the Fermat quartic is the frozen multiple of the identity")
{
    auto spec = tc::fermat_quartic();
    GramData gd = gram_matrix(spec);
    CHECK(std::abs(gd.G(0, 0).real() - tc::gram_fermat_g11) < 2e-6 * tc::gram_fermat_g11);
    CHECK(std::abs(gd.G(1, 1).real() - tc::gram_fermat_g22) < 2e-6 * tc::gram_fermat_g22);
    CHECK(std::abs(gd.G(2, 2).real() - tc::gram_fermat_g33) < 2e-6 * tc::gram_fermat_g33);
    double geo = std::cbrt(gd.G(0, 0).real() * gd.G(1, 1).real() * gd.G(2, 2).real());
    for (int j = 0; j < 3; ++j)
        for (int k = j + 1; k < 3; ++k) CHECK(std::abs(gd.G(j, k)) < 1e-6 * geo);
    CHECK((gd.T * gd.G * gd.T.adjoint() - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-10);
}

TEST_CASE("scaling law: replacing f by c f scales G by 1/|c|")
{
    auto base = tc::unit_hyperelliptic(6);
    GramData g1 = gram_matrix(base);
    std::vector<cplx> scaled(7, cplx(0.0));
    scaled[0] = -7.0;
    scaled[6] = 7.0; // 7 (x^6 - 1)
    auto spec7 = construct_curve(CurveKind::hyperelliptic, scaled);
    GramData g7 = gram_matrix(spec7);
    CHECK((7.0 * g7.G - g1.G).norm() < 1e-6 * g1.G.norm());
}

TEST_CASE("quadrature consistency under layout knobs")
{
    auto spec = tc::unit_hyperelliptic(6);
    QuadParams base;
    GramData g0 = gram_matrix(spec, base);

    QuadParams doubled = base;
    doubled.radius_factor = 2.0 / 3.0; // capped internally, still a different decomposition
    GramData g1 = gram_matrix(spec, doubled);
    CHECK((g1.G - g0.G).norm() < 1e-6 * g0.G.norm());

    QuadParams rotated = base;
    rotated.far_phase = 0.7;
    GramData g2 = gram_matrix(spec, rotated);
    CHECK((g2.G - g0.G).norm() < 1e-6 * g0.G.norm());

    // permuted singular-patch processing order, same integrand
    PlaneLayout lay = make_plane_layout(spec, base);
    detail::GramIntegrand f{&spec, 2};
    Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(2, 2);
    auto direct = integrate_plane(lay, f, zero, base);
    PlaneLayout rev = lay;
    std::reverse(rev.patches.begin(), rev.patches.end());
    auto reversed = integrate_plane(rev, f, zero, base);
    CHECK((direct.value - reversed.value).norm() < 1e-6 * direct.value.norm());
}

TEST_CASE("Hermitian positivity on random coefficient vectors")
{
    auto spec = tc::unit_hyperelliptic(8);
    GramData gd = gram_matrix(spec);
    std::mt19937_64 rng(5);
    auto u = [&]() { return cplx(2.0 * (rng() >> 11) * 0x1.0p-53 - 1.0, 2.0 * (rng() >> 11) * 0x1.0p-53 - 1.0); };
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::Vector3cd v(u(), u(), u());
        double q = std::real((v.adjoint() * gd.G * v)(0));
        CHECK(q > 0.0);
    }
}

TEST_CASE("non-convergence is reported, with the best estimate in the message")
{
    auto spec = tc::unit_hyperelliptic(6);
    QuadParams q;
    q.max_level = 0;
    CHECK_THROWS_MATCHES(gram_matrix(spec, q), error, Catch::Matchers::Predicate<error>([](const error& e) {
                             return e.kind() == errc::no_convergence;
                         }));
}

TEST_CASE("singularity saturation on nearly-colliding branch points")
{
    // (x - 1e-10)(x + 1e-10) x^3 ... use f = (x^2 - 1e-20) (x^3 + 2): separations ~ 2e-10
    Poly f = Poly{{-1e-20, 0.0, 1.0}} * Poly{{2.0, 0.0, 0.0, 1.0}};
    Tolerances tol;
    tol.root_sep_rel = 1e-12;
    auto spec = construct_curve(CurveKind::hyperelliptic, f.coeffs(), tol);
    CHECK_THROWS_MATCHES(make_plane_layout(spec, QuadParams{}), error,
                         Catch::Matchers::Predicate<error>(
                             [](const error& e) { return e.kind() == errc::singularity_saturation; }));
}

TEST_CASE("dense-grid oracle reproduces the series values at moderate resolution")
{
    auto in = tc::oracle_input_x_n_minus_1(6);
    in.n_psi = 2048;
    in.n_s = 512;
    Eigen::MatrixXcd G = tc::dense_grid_gram(in);
    CHECK(std::abs(G(0, 0).real() - tc::gram_x6_g11) < 3e-5 * tc::gram_x6_g11);
    CHECK(std::abs(G(1, 1).real() - tc::gram_x6_g22) < 3e-5 * tc::gram_x6_g22);
}
