#include <doctest.h>

#include <cmath>

#include "dmpair/field.hpp"
#include "dmpair/bvfunc.hpp"
#include "dmpair/oracle.hpp"
#include "builders.hpp"

using namespace dmpair;
using namespace dmpair::testing;

TEST_CASE("field evaluation and t range") {
    const auto dom = dom_sign_1d();
    const PiecewiseField f = field_sign_1d(dom, 1.0);
    CHECK_THROWS_AS((void)f.eval_b({0.5, 0.0}, 7.0), std::domain_error);
    CHECK(f.eval_b({0.5, 0.0}, 0.3).x == doctest::Approx(1.0));
    CHECK(f.eval_b({-0.5, 0.0}, 0.3).x == doctest::Approx(-1.0));

    const auto dom2 = dom_grid_2d();
    std::vector<std::vector<Poly>> comps(dom2->cell_count());
    for (auto& c : comps)
        c = {Poly::var_t() * Poly::var_x(), Poly::var_t() * Poly::var_y()};
    const PiecewiseField tf(dom2, comps, 1.0);
    const Vec2 v = tf.eval_b({1.0, 2.0 - 1e-9}, 0.5);
    CHECK(v.x == doctest::Approx(0.5));
    CHECK(v.y == doctest::Approx(1.0));
}

TEST_CASE("antiderivative B") {
    const auto dom = dom_sign_1d();
    const PiecewiseField f = field_sign_1d(dom, 1.0);
    // B(x,t) = t sign(x)
    CHECK(f.eval_B({-0.2, 0.0}, 0.5).x == doctest::Approx(-0.5));
    CHECK(f.eval_B({0.7, 0.0}, 0.0).x == doctest::Approx(0.0));

    // b = 2t ⇒ B = t², exact at t = 3
    const auto dom1 = make_domain_1d(-1.0, 1.0, {{-1.0, 1.0}});
    const PiecewiseField g(dom1, {{Poly::var_t().scaled(2.0)}}, 4.0);
    CHECK(g.eval_B({0.0, 0.0}, 3.0).x == doctest::Approx(9.0));

    // ∂_t B = b against central differences
    const double h = 1e-5;
    for (double t : {-0.5, 0.1, 0.8}) {
        const double fd =
            (g.eval_B({0.2, 0.0}, t + h).x - g.eval_B({0.2, 0.0}, t - h).x) / (2.0 * h);
        CHECK(fd == doctest::Approx(g.eval_b({0.2, 0.0}, t).x).epsilon(1e-8));
    }
}

TEST_CASE("divergence measure of the field") {
    const auto dom = dom_sign_1d();
    const PiecewiseField f = field_sign_1d(dom, 1.0);
    // Div sign = 2δ₀: verified against the weak-divergence oracle
    const TestFunction phi = TestFunction::bump({0.3, 0.0}, 1.2, 1);
    const HybridMeasure div = f.div_b(0.5);
    auto vfun = [&](const Vec2& x) { return f.eval_b(x, 0.5); };
    const auto wd = oracle::weak_divergence(*dom, vfun, phi);
    CHECK(div.apply(phi) == doctest::Approx(wd.value).epsilon(1e-8));
    CHECK(div.apply(phi) == doctest::Approx(2.0 * phi.value({0.0, 0.0})).epsilon(1e-10));

    // b = t(x₁,x₂) on one cell: Div = 2t L²
    const auto dom2 = make_domain_2d({-2.0, -2.0}, {2.0, 2.0},
                                     {box_polygon({-2.0, -2.0}, {2.0, 2.0})});
    const PiecewiseField rad(dom2,
                             {{Poly::var_t() * Poly::var_x(), Poly::var_t() * Poly::var_y()}},
                             1.0);
    const TestFunction phi2 = TestFunction::bump({0.0, 0.0}, 1.0, 2);
    const double mass = quad::integrate_polygon(
        [&](const Vec2& x) { return phi2.value(x); }, box_polygon({-1.0, -1.0}, {1.0, 1.0}));
    CHECK(rad.div_b(0.5).apply(phi2) == doctest::Approx(2.0 * 0.5 * mass).epsilon(1e-9));

    // constant field: zero divergence
    const PiecewiseField cf = field_const_2d(dom_grid_2d());
    CHECK(cf.div_b(0.7).apply(TestFunction::bump({0.5, 0.5}, 1.0, 2)) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("least upper bound sigma") {
    const auto dom = dom_sign_1d();
    // b = t·sign(x), T=1: σ = 2δ₀
    const PiecewiseField f = field_tsign_1d(dom, 1.0);
    CHECK(f.sigma_edge_density(0, 0.0) == doctest::Approx(2.0));
    // t-independent sign: σ = 2δ₀ again
    const PiecewiseField g = field_sign_1d(dom, 1.0);
    CHECK(g.sigma_edge_density(0, 0.0) == doctest::Approx(2.0));
    // zero field
    const PiecewiseField z(dom, {{Poly()}, {Poly()}}, 1.0);
    CHECK(z.sigma().empty());

    // σ dominates |Div b(·,t)| on a t grid
    const auto E = FinitePerimeterSet::from_intervals({{-1.0, 1.0}});
    for (int k = 0; k <= 8; ++k) {
        const double t = -1.0 + 0.25 * k;
        CHECK(f.div_b(t).total_variation(E, BorelSelection::Interior) <=
              f.sigma().total_variation(E, BorelSelection::Interior) + 1e-9);
    }
}

TEST_CASE("density f and potential F") {
    const auto dom = dom_sign_1d();
    const PiecewiseField f = field_tsign_1d(dom, 1.0);
    // Div density 2t over σ density 2 ⇒ f(0,t) = t, F(0,t) = t²/2
    for (double t : {-1.0, -0.3, 0.0, 0.5, 1.0}) {
        CHECK(f.f_edge(0, 0.0, t) == doctest::Approx(t));
        CHECK(f.F_edge(0, 0.0, t) == doctest::Approx(0.5 * t * t));
    }
    CHECK(f.F_at({0.0, 0.0}, 0.0) == doctest::Approx(0.0));

    const PiecewiseField g = field_sign_1d(dom, 1.0);
    CHECK(g.f_edge(0, 0.0, 0.7) == doctest::Approx(1.0));  // sign of the jump
    CHECK(g.F_edge(0, 0.0, 0.7) == doctest::Approx(0.7));  // ∫₀ᵗ 1

    // off the support of σ the convention is 0
    CHECK(g.f_cell(0, {-1.0, 0.0}, 0.5) == doctest::Approx(0.0));
    CHECK(g.f_at({-1.0, 0.0}, 0.5) == doctest::Approx(0.0));

    // |f| ≤ 1 and F is 1-Lipschitz in t on sampled grids
    const PiecewiseField rad = field_radial_2d(dom_grid_2d(), 1.5);
    double fmax = 0.0, lip = 0.0;
    for (int i = 0; i < 10; ++i) {
        const Vec2 x{-1.8 + 0.4 * i, 0.45};
        for (int a = 0; a < 10; ++a) {
            const double ta = -1.5 + 3.0 * (a + 0.5) / 10.0;
            fmax = std::max(fmax, std::abs(rad.f_at(x, ta)));
            for (int b = a + 1; b < 10; ++b) {
                const double tb = -1.5 + 3.0 * (b + 0.5) / 10.0;
                lip = std::max(lip, std::abs(rad.F_at(x, ta) - rad.F_at(x, tb)) /
                                        std::abs(ta - tb));
            }
        }
    }
    CHECK(fmax <= 1.0 + 1e-9);
    CHECK(lip <= 1.0 + 1e-9);
}

TEST_CASE("weak divergence identity across t and random bumps") {
    const auto dom = dom_grid_2d();
    const PiecewiseField f = field_radial_2d(dom, 1.0);
    for (int k = 0; k <= 8; k += 2) {
        const double t = -1.0 + 0.25 * k;
        auto vfun = [&](const Vec2& x) { return f.eval_b(x, t); };
        for (const Vec2 c : {Vec2{0.5, 0.5}, Vec2{-0.7, 0.8}}) {
            const TestFunction phi = TestFunction::bump(c, 0.9, 2);
            const auto wd = oracle::weak_divergence(*dom, vfun, phi);
            const double lhs = f.div_b(t).apply(phi);
            CHECK(std::abs(lhs - wd.value) <=
                  1e-6 * (1.0 + f.sup_norm() * phi.grad_sup_norm()));
        }
    }
}

TEST_CASE("bv approximate limits and jump set") {
    const auto dom = dom_sign_1d();
    const PiecewiseBV u = u_step_1d(dom);
    const auto lims = u.approximate_limits({0.0, 0.0});
    CHECK(lims.u_plus == doctest::Approx(1.0));
    CHECK(lims.u_minus == doctest::Approx(0.0));
    CHECK(lims.nu.x == doctest::Approx(1.0));
    CHECK(lims.jump);
    CHECK(u.precise_representative({0.0, 0.0}) == doctest::Approx(0.5));
    CHECK(u.precise_representative({0.7, 0.0}) == doctest::Approx(1.0));

    const auto dom2 = dom_grid_2d();
    const PiecewiseBV w = u_chi_square(dom2);
    const auto l2 = w.approximate_limits({0.5, 0.0});  // bottom edge midpoint
    CHECK(std::abs(l2.u_plus - l2.u_minus) == doctest::Approx(1.0));
    const double from_inside = l2.nu.y > 0 ? l2.u_plus : l2.u_minus;
    CHECK(from_inside == doctest::Approx(1.0));
    CHECK(w.precise_representative({0.5, 0.0}) == doctest::Approx(0.5));
    CHECK_THROWS_AS((void)w.approximate_limits({0.0, 0.0}), std::domain_error);  // vertex

    // continuous across an edge: excluded from the jump set
    const PiecewiseBV c = u_const(dom2, 3.0);
    for (std::size_t e = 0; e < dom2->skeleton().size(); ++e)
        CHECK(!c.edge_data(int(e)).in_jump_set);
}

TEST_CASE("derivative parts against the distributional oracle") {
    const auto dom = make_domain_1d(-2.0, 3.0, {{-2.0, 0.0}, {0.0, 1.0}, {1.0, 3.0}});
    // u = χ_{(0,1)}
    const PiecewiseBV u(dom, {Poly(), Poly(1.0), Poly()});
    const auto dj = u.grad_jump();
    const TestFunction phi = TestFunction::bump({0.4, 0.0}, 1.3, 1);
    // ⟨Du,φ⟩ = -∫ u φ' = φ(0) - φ(1)
    const double expected = phi.value({0.0, 0.0}) - phi.value({1.0, 0.0});
    CHECK(dj.comp[0].apply(phi) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(u.grad_absolutely_continuous().comp[0].empty());

    // u(x) = x on one cell: D^a = L¹
    const auto dom1 = make_domain_1d(0.0, 1.0, {{0.0, 1.0}});
    const PiecewiseBV lin(dom1, {Poly::var_x()});
    const TestFunction phi1 = TestFunction::bump({0.5, 0.0}, 0.4, 1);
    const double mass = quad::integrate([&](double x) { return phi1.value({x, 0.0}); },
                                        0.1, 0.9);
    CHECK(lin.grad_absolutely_continuous().comp[0].apply(phi1) ==
          doctest::Approx(mass).epsilon(1e-9));

    // Cantor function: D^c has total mass 1 and no other parts
    const auto domc = dom_cantor_1d();
    const PiecewiseBV uc = u_cantor(domc);
    CHECK(uc.grad_absolutely_continuous().comp[0].empty());
    CHECK(uc.grad_jump().comp[0].empty());
    const TestFunction cover = TestFunction::plateau({0.5, 0.0}, 4.0, 1);
    CHECK(uc.grad_cantor().comp[0].apply(cover) == doctest::Approx(1.0).epsilon(1e-6));

    // distributional identity for the full derivative, all scenarios
    for (int scenario = 0; scenario < 2; ++scenario) {
        const PiecewiseBV& w = scenario == 0 ? u : uc;
        const auto& d = scenario == 0 ? dom : domc;
        const auto total = w.grad_total();
        for (double c0 : {0.2, 0.5, 0.8}) {
            const TestFunction p = TestFunction::bump({c0, 0.0}, 1.1, 1);
            const double direct = -quad::integrate(
                [&](double x) {
                    return w.value({x, 0.0}) * p.gradient({x, 0.0}).x;
                },
                d->lo().x, d->hi().x, quad::Options{1e-9, 48, 12, 4096, 1u << 20});
            CHECK(std::abs(total.comp[0].apply(p) - direct) <= 2e-6 * (1.0 + std::abs(direct)));
        }
    }
}

TEST_CASE("polar decomposition data is consistent") {
    const auto dom = dom_grid_2d();
    const PiecewiseBV w = u_chi_square(dom);
    const HybridMeasure tv = w.variation_measure();
    const auto dj = w.grad_jump();
    for (std::size_t e = 0; e < dom->skeleton().size(); ++e) {
        if (!w.edge_data(int(e)).in_jump_set) continue;
        const double s = 0.5 * (dom->skeleton()[e].p1 - dom->skeleton()[e].p0).norm();
        const double a = dj.comp[0].edge_density(e, s);
        const double b = dj.comp[1].edge_density(e, s);
        const double mag = tv.edge_density(e, s);
        CHECK(mag > 0.0);
        // θ = (a,b)/mag has unit length where |Du| is positive
        CHECK(std::hypot(a / mag, b / mag) == doctest::Approx(1.0));
    }
}

TEST_CASE("bv construction guards") {
    const auto dom = dom_sign_1d();
    PiecewiseBV::CantorData bad{1.0, -0.5, 0.5};  // straddles the skeleton point 0
    CHECK_THROWS_AS(PiecewiseBV(dom, {Poly(), Poly()}, bad), std::invalid_argument);
    const auto dom2 = dom_grid_2d();
    PiecewiseBV::CantorData c2{1.0, 0.2, 0.4};
    CHECK_THROWS_AS(PiecewiseBV(dom2, {}, c2), std::invalid_argument);  // 2D Cantor
}
