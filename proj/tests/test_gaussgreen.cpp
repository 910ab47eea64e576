#include <doctest.h>

#include <cmath>

#include "dmpair/gaussgreen.hpp"
#include "dmpair/oracle.hpp"
#include "builders.hpp"

using namespace dmpair;
using namespace dmpair::testing;

TEST_CASE("radial field on the unit square: both sides equal 2") {
    const auto dom = dom_grid_2d();
    const PiecewiseField f = field_radial_2d(dom, 1.5);
    const PiecewiseBV one = u_const(dom, 1.0);
    const auto E = unit_square_set();
    const BalanceReport rep = gauss_green(f, one, E);
    CHECK(rep.lhs_interior == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(rep.rhs_interior == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::abs(rep.residual_interior()) <= 1e-8);
    CHECK(std::abs(rep.residual_closure()) <= 1e-8);
    // weakly regular variant reproduces the same closed form
    const BalanceReport wrep = gauss_green_weakly_regular(f, one, E);
    CHECK(wrep.lhs_interior == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::abs(wrep.residual_interior()) <= 1e-8);
}

TEST_CASE("constant field: both sides vanish") {
    const auto dom = dom_grid_2d();
    const PiecewiseField f = field_const_2d(dom, {0.3, 0.4}, 2.0);
    const PiecewiseBV c = u_const(dom, 1.7);
    for (const auto& E :
         {unit_square_set(),
          FinitePerimeterSet::from_polygon(box_polygon({-1.5, -1.0}, {0.5, 1.5}))}) {
        const BalanceReport rep = gauss_green(f, c, E);
        CHECK(rep.lhs_interior == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(rep.rhs_interior == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(rep.lhs_closure == doctest::Approx(0.0).epsilon(1e-10));
    }
}

TEST_CASE("1d step: interval balance equals 1") {
    const auto dom = dom_sign_1d();
    const PiecewiseField f = field_sign_1d(dom, 1.0);  // B = t·sign
    const PiecewiseBV u = u_step_1d(dom);
    const auto E = FinitePerimeterSet::from_intervals({{-1.0, 1.0}});
    const BalanceReport rep = gauss_green(f, u, E);
    CHECK(rep.lhs_interior == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.rhs_interior == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.lhs_closure == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.rhs_closure == doctest::Approx(1.0).epsilon(1e-12));

    // interval missing the jump: everything is zero
    const auto E0 = FinitePerimeterSet::from_intervals({{0.25, 1.75}});
    const BalanceReport zero = gauss_green(f, u, E0);
    CHECK(zero.lhs_interior == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(zero.rhs_interior == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("closure and interior differ by the boundary flux") {
    const auto dom = dom_grid_2d();
    // field with a jump across the square boundary: b = g(x)(x₁,x₂)
    std::vector<std::vector<Poly>> comps(dom->cell_count());
    for (std::size_t c = 0; c < comps.size(); ++c) {
        const double g = int(c) == kCenterCell2d ? 2.0 : 1.0;
        comps[c] = {Poly::var_x().scaled(g), Poly::var_y().scaled(g)};
    }
    const PiecewiseField f(dom, comps, 4.0);
    std::vector<Poly> up(dom->cell_count(), Poly::var_x().scaled(0.25));
    up[kCenterCell2d] = Poly(3.0) + Poly::var_x().scaled(0.25);
    const PiecewiseBV u(dom, up);

    const auto E = unit_square_set();
    const BalanceReport rep = gauss_green(f, u, E);
    CHECK(std::abs(rep.residual_interior()) <= 1e-8);
    CHECK(std::abs(rep.residual_closure()) <= 1e-8);
    CHECK(rep.lhs_closure - rep.lhs_interior ==
          doctest::Approx(rep.interface_flux).epsilon(1e-8));

    // a polygon crossing cell interiors exercises the continuous-trace path
    const auto tilted = FinitePerimeterSet::from_polygon(
        Polygon{{{-0.6, 0.3}, {0.5, -0.6}, {1.4, 0.5}, {0.4, 1.4}}});
    const BalanceReport rep2 = gauss_green(f, u, tilted);
    CHECK(std::abs(rep2.residual_interior()) <= 1e-6);
    CHECK(std::abs(rep2.residual_closure()) <= 1e-6);
}

TEST_CASE("gauss-green rejects sets leaving the domain") {
    const auto dom = dom_grid_2d();
    const PiecewiseField f = field_radial_2d(dom, 1.5);
    const PiecewiseBV one = u_const(dom, 1.0);
    const auto big = FinitePerimeterSet::from_polygon(
        box_polygon({-3.0, -3.0}, {3.0, 3.0}));
    CHECK_THROWS_AS((void)gauss_green(f, one, big), std::domain_error);
}

TEST_CASE("matching-data gluing reproduces the global divergence") {
    const auto dom = dom_grid_2d();
    std::vector<std::vector<Poly>> comps(dom->cell_count());
    for (std::size_t c = 0; c < comps.size(); ++c) {
        const double g = int(c) == kCenterCell2d ? 2.0 : 1.0;
        comps[c] = {Poly::var_x().scaled(g), Poly::var_y().scaled(g)};
    }
    const PiecewiseField f(dom, comps, 4.0);
    const PiecewiseBV u = u_chi_square(dom);
    const HybridMeasure global = composite_divergence(f, u);

    const GluedDivergence g = glue(f, u, f, u, unit_square_set());
    for (const Vec2 c : {Vec2{0.5, 0.5}, Vec2{0.2, -0.4}, Vec2{1.1, 1.0}}) {
        const TestFunction phi = TestFunction::bump(c, 0.8, 2);
        CHECK(g.apply(phi) == doctest::Approx(global.apply(phi)).epsilon(1e-8));
    }
    // 1d version across the jump
    const auto dom1 = dom_sign_1d();
    const PiecewiseField f1 = field_tsign_1d(dom1, 1.0);
    const PiecewiseBV u1 = u_step_1d(dom1);
    const GluedDivergence g1 =
        glue(f1, u1, f1, u1, FinitePerimeterSet::from_intervals({{-0.5, 0.5}}));
    const HybridMeasure global1 = composite_divergence(f1, u1);
    const TestFunction phi1 = TestFunction::bump({0.1, 0.0}, 1.0, 1);
    CHECK(g1.apply(phi1) == doctest::Approx(global1.apply(phi1)).epsilon(1e-9));
}

TEST_CASE("zero extension produces the boundary flux measure") {
    // v₁ = A inside E (u₁ ≡ 1, B = tA), zero outside:
    // Div v = A·ν_E^int H¹⌐∂*E.
    const auto dom = dom_grid_2d();
    const Vec2 A{0.8, -0.6};
    const PiecewiseField f1 = field_const_2d(dom, A, 1.5);
    const PiecewiseBV one = u_const(dom, 1.0);
    std::vector<std::vector<Poly>> zero(dom->cell_count());
    const PiecewiseField f2(dom, zero, 1.5);
    const PiecewiseBV u2 = u_const(dom, 0.0);
    const auto E = unit_square_set();
    const GluedDivergence g = glue(f1, one, f2, u2, E);

    for (const Vec2 c : {Vec2{0.5, 0.5}, Vec2{0.0, 0.7}}) {
        const TestFunction phi = TestFunction::bump(c, 0.9, 2);
        double expected = 0.0;
        for (const auto& piece : E.reduced_boundary()) {
            const Vec2 dir = (piece.p1 - piece.p0) * (1.0 / piece.length());
            expected += quad::integrate(
                [&](double s) {
                    const Vec2 x = piece.p0 + dir * s;
                    return phi.value(x) * (A.dot(piece.nu_int));
                },
                0.0, piece.length());
        }
        CHECK(g.apply(phi) == doctest::Approx(expected).epsilon(1e-9));
        // and the glued field's oracle agrees
        const auto wd = oracle::weak_divergence(*dom, g.v, phi);
        CHECK(g.apply(phi) == doctest::Approx(wd.value).epsilon(1e-7));
    }
}

TEST_CASE("extension theorem variants") {
    const auto dom = dom_grid_2d();
    const PiecewiseField f = field_radial_2d(dom, 2.0);
    const PiecewiseBV u = u_const(dom, 1.0);
    const auto E = unit_square_set();
    const auto W = FinitePerimeterSet::from_polygon(box_polygon({0.3, 0.3}, {0.7, 0.7}));
    const auto U = FinitePerimeterSet::from_polygon(box_polygon({-0.5, -0.5}, {1.5, 1.5}));

    // identical data on both sides: traces cancel, the global measure returns
    const GluedDivergence same = extend(f, u, f, u, E, W, U);
    const HybridMeasure global = composite_divergence(f, u);
    const TestFunction phi = TestFunction::bump({0.4, 0.6}, 1.0, 2);
    CHECK(same.apply(phi) == doctest::Approx(global.apply(phi)).epsilon(1e-8));

    // degenerate W = empty is allowed through the overload without W
    const GluedDivergence no_w = extend(f, u, f, u, E);
    CHECK(no_w.apply(phi) == doctest::Approx(global.apply(phi)).epsilon(1e-8));

    // nesting violations are rejected
    CHECK_THROWS_AS((void)extend(f, u, f, u, E, U, std::nullopt), std::domain_error);
    CHECK_THROWS_AS((void)extend(f, u, f, u, E, std::nullopt, W), std::domain_error);
}
