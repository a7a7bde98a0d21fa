#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include "curvcanon/curve.hpp"
#include "support/test_curves.hpp"

using namespace curvcanon;
using curvcanon::testing::fermat_quartic;
using curvcanon::testing::fermat_quartic_coeffs;
using curvcanon::testing::unit_hyperelliptic;

namespace {

std::mt19937_64 rng(42);

double unit()
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

CurvePoint random_smooth_point(const CurveSpec& spec, double span = 2.2)
{
    for (;;) {
        cplx x(span * (2.0 * unit() - 1.0), span * (2.0 * unit() - 1.0));
        auto ys = spec.sheets(x);
        cplx y = ys[rng() % ys.size()];
        if (std::abs(spec.defining(x, y)) > spec.tol().residual * spec.eq_scale(x, y)) continue;
        double gx = std::abs(spec.eq_dx(x, y)), gy = std::abs(spec.eq_dy(x, y));
        if (gx < 0.05 || gy < 0.05) continue; // want both charts comfortably valid
        return CurvePoint{x, y, ChartKind::x_chart};
    }
}

} // namespace

TEST_CASE("construct_curve derives genus and branch data")
{
    auto c6 = unit_hyperelliptic(6);
    CHECK(genus(c6) == 2);
    CHECK(c6.gonality_lower() == 2);
    REQUIRE(c6.branch_points().size() == 6);
    CHECK_FALSE(c6.has_infinite_branch_point());
    for (const auto& b : c6.branch_points()) CHECK(std::abs(std::pow(b, 6) - 1.0) < 1e-12);

    auto c5 = unit_hyperelliptic(5);
    CHECK(genus(c5) == 2);
    CHECK(c5.branch_points().size() == 5);
    CHECK(c5.has_infinite_branch_point());

    auto c7 = construct_curve(CurveKind::hyperelliptic, {1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
    CHECK(genus(c7) == 3); // x^7 + x + 1

    auto q = fermat_quartic();
    CHECK(genus(q) == 3);
    CHECK(q.gonality_lower() == 3);
}

TEST_CASE("branch points count 2(g+1) with the infinite one for odd degree")
{
    for (int n : {5, 6, 7, 8}) {
        auto c = unit_hyperelliptic(n);
        int count = static_cast<int>(c.branch_points().size()) + (c.has_infinite_branch_point() ? 1 : 0);
        CHECK(count == 2 * (genus(c) + 1));
    }
}

TEST_CASE("construct_curve rejects bad input")
{
    // repeated root: (x-1)^2 (x^3+2) has degree 5
    Poly sq = Poly{{-1.0, 1.0}} * Poly{{-1.0, 1.0}} * Poly{{2.0, 0.0, 0.0, 1.0}};
    CHECK_THROWS_MATCHES(construct_curve(CurveKind::hyperelliptic, sq.coeffs()), error,
                         Catch::Matchers::Predicate<error>(
                             [](const error& e) { return e.kind() == errc::not_squarefree; }));

    CHECK_THROWS_MATCHES(construct_curve(CurveKind::hyperelliptic, {1.0, 0.0, 0.0, 0.0, 1.0}), error,
                         Catch::Matchers::Predicate<error>(
                             [](const error& e) { return e.kind() == errc::unsupported_degree; }));

    // x^4 + y^4 is a cone over the origin
    std::vector<cplx> cone(15, cplx(0.0));
    cone[10] = 1.0;
    cone[14] = 1.0;
    CHECK_THROWS_MATCHES(construct_curve(CurveKind::plane_quartic, cone), error,
                         Catch::Matchers::Predicate<error>(
                             [](const error& e) { return e.kind() == errc::singular_curve; }));

    CHECK_THROWS_AS(construct_curve(CurveKind::hyperelliptic, {}), error);
}

TEST_CASE("gonality gate")
{
    auto c6 = unit_hyperelliptic(6);
    CHECK(gonality_gate(c6, 1).pass);
    CHECK_FALSE(gonality_gate(c6, 2).pass);
    CHECK(gonality_gate(c6, 2).certificate.find("gonality") != std::string::npos);

    auto q = fermat_quartic();
    CHECK(gonality_gate(q, 2).pass);
    CHECK_FALSE(gonality_gate(q, 3).pass);
}

TEST_CASE("standard basis values at pinned points")
{
    auto c6 = unit_hyperelliptic(6);

    // (0, i) in the x-chart: u = (1/y, x/y) = (-i, 0), du = (0, -i)
    CurvePoint p0{cplx(0, 0), cplx(0, 1), ChartKind::x_chart};
    auto v0 = standard_basis_eval(c6, p0);
    CHECK(std::abs(v0.u(0) - cplx(0, -1)) < 1e-14);
    CHECK(std::abs(v0.u(1)) < 1e-14);
    CHECK(std::abs(v0.du(0)) < 1e-14);
    CHECK(std::abs(v0.du(1) - cplx(0, -1)) < 1e-14);

    // branch point (1, 0) in the y-chart: u_k = 2 x^{k-1}/f'(x) = 1/3, du = 0
    CurvePoint pb{cplx(1, 0), cplx(0, 0), ChartKind::y_chart};
    auto vb = standard_basis_eval(c6, pb);
    CHECK(std::abs(vb.u(0) - 1.0 / 3.0) < 1e-14);
    CHECK(std::abs(vb.u(1) - 1.0 / 3.0) < 1e-14);
    CHECK(std::abs(vb.du(0)) < 1e-14);
    CHECK(std::abs(vb.du(1)) < 1e-14);

    // Fermat quartic at (0, 1): u = (1, x, y)/F_y = (1/4, 0, 1/4)
    auto q = fermat_quartic();
    CurvePoint pq{cplx(0, 0), cplx(1, 0), ChartKind::x_chart};
    auto vq = standard_basis_eval(q, pq);
    CHECK(std::abs(vq.u(0) - 0.25) < 1e-14);
    CHECK(std::abs(vq.u(1)) < 1e-14);
    CHECK(std::abs(vq.u(2) - 0.25) < 1e-14);
}

TEST_CASE("basis eval error paths")
{
    auto c6 = unit_hyperelliptic(6);
    CHECK_THROWS_MATCHES(standard_basis_eval(c6, CurvePoint{cplx(0, 0), cplx(1, 0), ChartKind::x_chart}), error,
                         Catch::Matchers::Predicate<error>(
                             [](const error& e) { return e.kind() == errc::not_on_curve; }));
    // x-chart at a branch point
    CHECK_THROWS_MATCHES(standard_basis_eval(c6, CurvePoint{cplx(1, 0), cplx(0, 0), ChartKind::x_chart}), error,
                         Catch::Matchers::Predicate<error>(
                             [](const error& e) { return e.kind() == errc::chart_invalid; }));
}

TEST_CASE("transition scale matches implicit differentiation")
{
    auto c6 = unit_hyperelliptic(6);
    auto p = random_smooth_point(c6);
    auto tr = transition_scale(c6, p, ChartKind::x_chart, ChartKind::y_chart);
    cplx expect = 2.0 * p.y / c6.fp()(p.x);
    CHECK(std::abs(tr.J - expect) < 1e-12 * std::abs(expect));

    auto same = transition_scale(c6, p, ChartKind::x_chart, ChartKind::x_chart);
    CHECK(std::abs(same.J - 1.0) < 1e-15);
    CHECK(std::abs(same.dJ) < 1e-15);

    auto q = fermat_quartic();
    auto pq = random_smooth_point(q, 1.4);
    auto trq = transition_scale(q, pq, ChartKind::x_chart, ChartKind::y_chart);
    cplx expectq = -q.Fy()(pq.x, pq.y) / q.Fx()(pq.x, pq.y);
    CHECK(std::abs(trq.J - expectq) < 1e-12 * std::abs(expectq));
}

TEST_CASE("chart covariance of u and du")
{
    // u_b = u_a J and du_b = du_a J^2 + u_a dJ on chart overlaps
    for (int model = 0; model < 3; ++model) {
        CurveSpec spec = model == 0 ? unit_hyperelliptic(6) : model == 1 ? unit_hyperelliptic(5) : fermat_quartic();
        for (int trial = 0; trial < 40; ++trial) {
            auto p = random_smooth_point(spec, model == 2 ? 1.4 : 2.2);
            CurvePoint px = p, py = p;
            px.chart = ChartKind::x_chart;
            py.chart = ChartKind::y_chart;
            auto vx = standard_basis_eval(spec, px);
            auto vy = standard_basis_eval(spec, py);
            auto tr = transition_scale(spec, p, ChartKind::x_chart, ChartKind::y_chart);
            for (int k = 0; k < spec.genus(); ++k) {
                cplx u_expect = vx.u(k) * tr.J;
                cplx du_expect = vx.du(k) * tr.J * tr.J + vx.u(k) * tr.dJ;
                CHECK(std::abs(vy.u(k) - u_expect) <= 1e-9 * std::max(1.0, std::abs(u_expect)));
                CHECK(std::abs(vy.du(k) - du_expect) <= 1e-9 * std::max(1.0, std::abs(du_expect)));
            }
        }
    }
}

TEST_CASE("infinity chart covariance on the even model")
{
    auto c6 = unit_hyperelliptic(6);
    for (int trial = 0; trial < 20; ++trial) {
        auto p = random_smooth_point(c6);
        if (std::abs(p.x) < 0.3) continue;
        CurvePoint pi = p;
        pi.chart = ChartKind::inf_chart;
        auto vx = standard_basis_eval(c6, CurvePoint{p.x, p.y, ChartKind::x_chart});
        auto vi = standard_basis_eval(c6, pi);
        auto tr = transition_scale(c6, p, ChartKind::x_chart, ChartKind::inf_chart);
        for (int k = 0; k < 2; ++k) {
            cplx u_expect = vx.u(k) * tr.J;
            cplx du_expect = vx.du(k) * tr.J * tr.J + vx.u(k) * tr.dJ;
            CHECK(std::abs(vi.u(k) - u_expect) <= 1e-9 * std::max(1.0, std::abs(u_expect)));
            CHECK(std::abs(vi.du(k) - du_expect) <= 1e-9 * std::max(1.0, std::abs(du_expect)));
        }
    }
    // odd models do not support the infinity chart
    auto c5 = unit_hyperelliptic(5);
    auto p5 = random_smooth_point(c5);
    p5.chart = ChartKind::inf_chart;
    CHECK_THROWS_AS(standard_basis_eval(c5, p5), error);
}

TEST_CASE("infinity-chart values stay bounded toward x = infinity")
{
    auto c6 = unit_hyperelliptic(6);
    for (double R : {10.0, 100.0, 1000.0, 10000.0}) {
        cplx x(R, 0.3 * R);
        cplx y = c6.sheets(x)[0];
        auto v = standard_basis_eval(c6, CurvePoint{x, y, ChartKind::inf_chart});
        CHECK(v.u.norm() < 10.0);
    }
}

TEST_CASE("hyperelliptic involution flips the sign of u")
{
    auto c8 = unit_hyperelliptic(8);
    for (int trial = 0; trial < 20; ++trial) {
        auto p = random_smooth_point(c8);
        auto vp = standard_basis_eval(c8, CurvePoint{p.x, p.y, ChartKind::x_chart});
        auto vm = standard_basis_eval(c8, CurvePoint{p.x, -p.y, ChartKind::x_chart});
        for (int k = 0; k < 3; ++k) CHECK(std::abs(vp.u(k) + vm.u(k)) < 1e-12 * (1.0 + std::abs(vp.u(k))));
    }
}

TEST_CASE("branch-point regularity along radial approaches")
{
    auto c6 = unit_hyperelliptic(6);
    const cplx b(1.0, 0.0);
    for (int ray = 0; ray < 8; ++ray) {
        double ang = 2.0 * M_PI * ray / 8;
        double prev_norm = 0.0;
        for (double rho : {1e-3, 1e-5, 1e-7, 1e-9}) {
            cplx x = b + std::polar(rho, ang);
            cplx y = c6.sheets(x)[0];
            auto vy = standard_basis_eval(c6, CurvePoint{x, y, ChartKind::y_chart});
            CHECK(vy.u.norm() < 10.0); // bounded in the y-chart
            prev_norm = vy.u.norm();

            // x-chart value times dx/dy converges to the y-chart value
            auto vx = standard_basis_eval(c6, CurvePoint{x, y, ChartKind::x_chart});
            auto tr = transition_scale(c6, CurvePoint{x, y, ChartKind::x_chart}, ChartKind::x_chart,
                                       ChartKind::y_chart);
            for (int k = 0; k < 2; ++k) CHECK(std::abs(vx.u(k) * tr.J - vy.u(k)) < 1e-7);
        }
        CHECK(prev_norm > 0.0);
    }
}

TEST_CASE("quartic critical fibers carry grading 4 at the Fermat points")
{
    auto q = fermat_quartic();
    REQUIRE(q.critical_points().size() == 4);
    for (const auto& c : q.critical_points()) {
        CHECK(std::abs(std::pow(c.x, 4) - 1.0) < 1e-6);
        CHECK(c.grading == 4);
    }
    CHECK(q.grading_at_infinity() == 1);
}

TEST_CASE("make_point validates residual and picks a chart")
{
    auto q = fermat_quartic();
    auto p = make_point(q, cplx(1.0, 0.0), cplx(0.0, 0.0));
    CHECK(p.chart == ChartKind::y_chart); // F_y = 0 there, F_x = 4
    CHECK_THROWS_AS(make_point(q, cplx(1.0, 0.0), cplx(0.5, 0.0)), error);
}
