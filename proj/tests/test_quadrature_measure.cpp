#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "dmpair/measure.hpp"
#include "dmpair/quadrature.hpp"
#include "builders.hpp"

using namespace dmpair;
using namespace dmpair::testing;

TEST_CASE("adaptive quadrature on smooth and kinked integrands") {
    CHECK(quad::integrate([](double x) { return x * x * x - x; }, 0.0, 2.0) ==
          doctest::Approx(2.0).epsilon(1e-12));
    // |x| has a kink; adaptivity must still converge
    CHECK(quad::integrate([](double x) { return std::abs(x); }, -1.0, 1.0) ==
          doctest::Approx(1.0).epsilon(1e-9));
    const Polygon sq = box_polygon({0.0, 0.0}, {1.0, 1.0});
    CHECK(quad::integrate_polygon([](const Vec2& p) { return p.x * p.y; }, sq) ==
          doctest::Approx(0.25).epsilon(1e-12));
    CHECK(quad::integrate_segment([](double s) { return s; }, {0.0, 0.0}, {3.0, 4.0}) ==
          doctest::Approx(12.5).epsilon(1e-12));
}

TEST_CASE("panel sweeps: serial reference vs parallel kernel") {
    const auto panels = quad::split_uniform(0.0, 3.14159, 2048);
    auto f = [](double x) { return std::sin(x) * std::exp(0.1 * x); };
    const double serial = quad::sweep_serial(panels, f);
    const double parallel = quad::sweep_parallel(panels, f);
    CHECK(parallel == doctest::Approx(serial).epsilon(1e-13));

    // the parallel reduction must not depend on the thread count
    setenv("DMPAIR_THREADS", "1", 1);
    const double one_thread = quad::sweep_parallel(panels, f);
    setenv("DMPAIR_THREADS", "7", 1);
    const double many_threads = quad::sweep_parallel(panels, f);
    unsetenv("DMPAIR_THREADS");
    CHECK(one_thread == many_threads);  // bitwise

    std::vector<quad::Panel2> tris{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
    tris = quad::refine_panels(tris, 256);
    CHECK(tris.size() == 256);
    auto g = [](const Vec2& p) { return p.x + 2.0 * p.y; };
    CHECK(quad::sweep_parallel(tris, g) ==
          doctest::Approx(quad::sweep_serial(tris, g)).epsilon(1e-13));
    CHECK(quad::sweep_serial(tris, g) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pairwise sum determinism") {
    std::vector<double> v;
    for (int i = 0; i < 1001; ++i) v.push_back(std::sin(i) * 1e-3);
    const double a = par::pairwise_sum(v);
    par::set_enabled(false);
    const double b = par::map_sum(v.size(), [&](std::size_t i) { return v[i]; });
    par::set_enabled(true);
    const double c = par::map_sum(v.size(), [&](std::size_t i) { return v[i]; });
    CHECK(a == b);
    CHECK(b == c);
}

TEST_CASE("cantor function basics") {
    CHECK(cantor_function(0.0) == doctest::Approx(0.0));
    CHECK(cantor_function(1.0) == doctest::Approx(1.0));
    CHECK(cantor_function(1.0 / 3.0) == doctest::Approx(0.5));
    CHECK(cantor_function(0.5) == doctest::Approx(0.5));
    CHECK(cantor_function(2.0 / 3.0) == doctest::Approx(0.5));
    CHECK(cantor_function(1.0 / 9.0) == doctest::Approx(0.25));
    // symmetry K(x) + K(1-x) = 1
    for (double x : {0.1, 0.21, 0.47, 0.333, 0.9})
        CHECK(cantor_function(x) + cantor_function(1.0 - x) == doctest::Approx(1.0));
}

TEST_CASE("cantor measure integration") {
    // ∫ x dC = 1/2 by symmetry of the Cantor measure about 1/2
    CHECK(cantor_integral([](double x) { return x; }, 0.0, 1.0) ==
          doctest::Approx(0.5).epsilon(1e-10));
    CHECK(cantor_integral([](double) { return 1.0; }, 0.0, 1.0) == doctest::Approx(1.0));
    // mass of [0,1/3] is 1/2
    CHECK(cantor_integral([](double) { return 1.0; }, 0.0, 1.0 / 3.0) ==
          doctest::Approx(0.5).epsilon(1e-9));
    // ∫ x² dC: E[X²] where X = Σ 2·3^{-k}·Bernoulli(1/2):
    // E[X] = 1/2, Var = Σ 4·9^{-k}·1/4 = 1/8 ⇒ E[X²] = 1/8 + 1/4 = 3/8
    CHECK(cantor_integral([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(0.375).epsilon(1e-9));
}

TEST_CASE("cantor recursion depth convergence") {
    // successive truncation depths differ by at most osc(φ) ≤ ‖φ'‖ 3^{-k}
    auto truncated = [](int depth) {
        double sum = 0.0;
        const int n = 1 << depth;
        for (int i = 0; i < n; ++i) {
            double x = 0.0, len = 1.0;
            int bits = i;
            for (int k = 0; k < depth; ++k) {
                len /= 3.0;
                if (bits & 1) x += 2.0 * len;
                bits >>= 1;
            }
            sum += std::sin(x + 0.5 * len) / n;
        }
        return sum;
    };
    const double ref = cantor_integral([](double x) { return std::sin(x); }, 0.0, 1.0);
    for (int k = 6; k <= 10; ++k)
        CHECK(std::abs(truncated(k) - ref) <= std::pow(3.0, -k) + 1e-12);
}

TEST_CASE("test function smoothness and support") {
    const TestFunction phi = TestFunction::bump({0.0, 0.0}, 1.0, 2);
    CHECK(phi.value({2.0, 0.0}) == 0.0);
    CHECK(phi.value({0.0, 0.0}) == doctest::Approx(std::exp(-1.0)));
    // gradient matches central differences to O(h²)
    const double h = 1e-5;
    for (const Vec2 x : {Vec2{0.3, 0.2}, Vec2{-0.5, 0.1}, Vec2{0.7, 0.6}}) {
        const Vec2 g = phi.gradient(x);
        const double gx =
            (phi.value({x.x + h, x.y}) - phi.value({x.x - h, x.y})) / (2.0 * h);
        const double gy =
            (phi.value({x.x, x.y + h}) - phi.value({x.x, x.y - h})) / (2.0 * h);
        CHECK(g.x == doctest::Approx(gx).epsilon(1e-6));
        CHECK(g.y == doctest::Approx(gy).epsilon(1e-6));
    }
    // the plateau variant is 1 + O(s⁴) near the center
    const TestFunction pl = TestFunction::plateau({0.5, 0.0}, 4.0, 1);
    for (double x : {0.0, 0.25, 0.5, 0.75, 1.0})
        CHECK(std::abs(pl.value({x, 0.0}) - 1.0) < 1e-6);
}

TEST_CASE("measure apply: atoms, densities, cantor") {
    const auto dom = dom_sign_1d();
    HybridMeasure atom(dom);
    atom.add_edge_density(0, [](double) { return 1.0; });  // δ₀
    const TestFunction phi(Vec2{0.0, 0.0}, 1.0, Poly(std::exp(1.0)), 1);  // φ(0)=1
    CHECK(atom.apply(phi) == doctest::Approx(1.0));

    // μ = L¹⌐(0,1) against φ ≈ 1 there
    const auto dom2 = make_domain_1d(-8.0, 9.0, {{-8.0, 9.0}});
    HybridMeasure leb(dom2);
    leb.add_cell_density(0, [](const Vec2& x) { return x.x > 0.0 && x.x < 1.0 ? 1.0 : 0.0; });
    const TestFunction plateau = TestFunction::plateau({0.5, 0.0}, 6.0, 1);
    // independent reference: direct quadrature of φ over (0,1)
    const double ref = quad::integrate([&](double x) { return plateau.value({x, 0.0}); },
                                       0.0, 1.0);
    CHECK(leb.apply(plateau) == doctest::Approx(ref).epsilon(1e-9));
    CHECK(ref == doctest::Approx(1.0).epsilon(1e-5));

    // Cantor measure: ∫ x dC = 1/2
    const auto dom3 = dom_cantor_1d();
    HybridMeasure cm(dom3);
    CantorComponent cc;
    cc.coeff = 1.0;
    cc.a = 0.0;
    cc.b = 1.0;
    cc.cell = 1;
    cc.g = [](double x) { return x; };
    cm.add_cantor(cc);
    const TestFunction pl = TestFunction::plateau({0.5, 0.0}, 4.0, 1);
    CHECK(cm.apply(pl) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("measure linearity and masking bound") {
    const auto dom = dom_sign_1d();
    HybridMeasure a(dom), b(dom);
    a.add_cell_density(0, [](const Vec2& x) { return x.x; });
    a.add_edge_density(0, [](double) { return 2.0; });
    b.add_cell_density(1, [](const Vec2& x) { return 1.0 - x.x; });
    const TestFunction phi = TestFunction::bump({0.0, 0.0}, 1.5, 1, 0.7);
    const double lhs = (a.scaled(2.5) + b.scaled(-1.0)).apply(phi);
    CHECK(lhs == doctest::Approx(2.5 * a.apply(phi) - b.apply(phi)).epsilon(1e-12));

    // |μ(φ)| ≤ ‖φ‖_∞ |μ|(supp φ)
    const auto E = FinitePerimeterSet::from_intervals({{-1.6, 1.6}});
    const double tv = a.total_variation(E, BorelSelection::WithReducedBoundary);
    CHECK(std::abs(a.apply(phi)) <= phi.sup_norm() * tv + 1e-9);
}

TEST_CASE("total variation on selected sets") {
    const auto dom = dom_sign_1d();
    HybridMeasure m(dom);
    m.add_edge_density(0, [](double) { return -3.0; });  // -3δ₀
    const auto E = FinitePerimeterSet::from_intervals({{-0.5, 0.5}});
    CHECK(m.total_variation(E) == doctest::Approx(3.0));
    CHECK(m.evaluate_on(E) == doctest::Approx(-3.0));

    HybridMeasure sgn(dom);
    sgn.add_cell_density(0, [](const Vec2& x) { return x.x; });
    sgn.add_cell_density(1, [](const Vec2& x) { return x.x; });
    const auto E2 = FinitePerimeterSet::from_intervals({{-1.0, 1.0}});
    CHECK(sgn.total_variation(E2) == doctest::Approx(1.0).epsilon(1e-10));  // ∫|x|
    CHECK(sgn.evaluate_on(E2) == doctest::Approx(0.0).epsilon(1e-12));

    const HybridMeasure zero(dom);
    CHECK(zero.total_variation(E2) == doctest::Approx(0.0));

    // subadditivity and homogeneity
    const double tv_sum = (m + sgn).total_variation(E2);
    CHECK(tv_sum <= m.total_variation(E2) + sgn.total_variation(E2) + 1e-10);
    CHECK(m.scaled(-2.0).total_variation(E2) == doctest::Approx(2.0 * m.total_variation(E2)));

    // boundary selection: atom sitting exactly on ∂E
    const auto E3 = FinitePerimeterSet::from_intervals({{0.0, 1.0}});
    CHECK(m.total_variation(E3, BorelSelection::Interior) == doctest::Approx(0.0));
    CHECK(m.total_variation(E3, BorelSelection::WithReducedBoundary) == doctest::Approx(3.0));
}

TEST_CASE("restriction to cells and edges") {
    const auto dom =
        make_domain_1d(-20.0, 22.0, {{-20.0, 0.0}, {0.0, 1.0}, {1.0, 2.0}, {2.0, 22.0}});
    HybridMeasure m(dom);
    m.add_cell_density(1, [](const Vec2&) { return 1.0; });  // L¹⌐(0,2)
    m.add_cell_density(2, [](const Vec2&) { return 1.0; });
    m.add_edge_density(1, [](double) { return 5.0; });  // 5δ₁
    const TestFunction phi = TestFunction::plateau({1.0, 0.0}, 12.0, 1);
    // restrict(L¹⌐(0,2), (0,1)) applied to φ≈1 is 1
    const HybridMeasure first = m.restrict_to({1}, {});
    CHECK(first.apply(phi) == doctest::Approx(1.0).epsilon(1e-5));
    // restriction keeps atoms when asked
    const HybridMeasure at = m.restrict_to({}, {1});
    CHECK(at.apply(phi) == doctest::Approx(5.0).epsilon(1e-6));
    // empty selector gives the zero measure
    const HybridMeasure none = m.restrict_to({}, {});
    CHECK(none.empty());
    CHECK_THROWS_AS((void)m.restrict_to({7}, {}), std::domain_error);
}

TEST_CASE("part decomposition is consistent under apply") {
    const auto dom = dom_cantor_1d();
    const auto u = u_cantor(dom);
    const auto parts_a = u.grad_absolutely_continuous();
    const auto parts_j = u.grad_jump();
    const auto parts_c = u.grad_cantor();
    const auto total = u.grad_total();
    const TestFunction phi = TestFunction::bump({0.5, 0.0}, 2.0, 1);
    const double sum = parts_a.comp[0].apply(phi) + parts_j.comp[0].apply(phi) +
                       parts_c.comp[0].apply(phi);
    CHECK(total.comp[0].apply(phi) == doctest::Approx(sum).epsilon(1e-12));
}
