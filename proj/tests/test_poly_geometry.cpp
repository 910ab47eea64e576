#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dmpair/geometry.hpp"
#include "dmpair/measure.hpp"
#include "dmpair/poly.hpp"

using namespace dmpair;

TEST_CASE("polynomial arithmetic and calculus") {
    const Poly p = Poly::monomial(2, 0, 1, 3.0) + Poly::monomial(0, 1, 0, -1.0) + Poly(2.0);
    CHECK(p.eval(2.0, 5.0, 1.5) == doctest::Approx(3.0 * 4.0 * 1.5 - 5.0 + 2.0));
    CHECK(p.dx().eval(2.0, 5.0, 1.5) == doctest::Approx(6.0 * 2.0 * 1.5));
    CHECK(p.dy().eval(2.0, 5.0, 1.5) == doctest::Approx(-1.0));
    CHECK(p.dt().eval(2.0, 5.0, 1.5) == doctest::Approx(3.0 * 4.0));

    // ∫₀ᵗ 2s ds = t²
    const Poly two_t = Poly::var_t().scaled(2.0);
    CHECK(two_t.integral_t().eval(0.0, 0.0, 3.0) == doctest::Approx(9.0));
    CHECK(two_t.integral_t().eval(0.0, 0.0, 0.0) == doctest::Approx(0.0));

    // substitution t := x²
    const Poly sub = Poly::var_t().integral_t().substitute_t(Poly::monomial(2, 0, 0, 1.0));
    CHECK(sub.eval(2.0, 0.0, 99.0) == doctest::Approx(0.5 * 16.0));

    // restriction to a line
    const Poly q = Poly::monomial(1, 1, 0, 1.0);  // x·y
    const Poly r = q.restrict_line(1.0, 0.0, 0.0, 1.0);  // x=1, y=s
    CHECK(r.eval(0.7, 0.0, 0.0) == doctest::Approx(0.7));
}

TEST_CASE("univariate roots and max") {
    // p(s) = s³ - s on [-2, 2]: roots -1, 0, 1; max |p| at endpoints = 6
    const std::vector<double> c{0.0, -1.0, 0.0, 1.0};
    const auto roots = poly1_roots(c, -2.0, 2.0);
    REQUIRE(roots.size() == 3);
    CHECK(roots[0] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(roots[1] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(roots[2] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(poly1_max_abs(c, -2.0, 2.0) == doctest::Approx(6.0));
    // interior extremum: max |s³-s| on [-1,1] is 2/(3√3)
    CHECK(poly1_max_abs(c, -1.0, 1.0) == doctest::Approx(2.0 / (3.0 * std::sqrt(3.0))));
    CHECK(poly1_max_abs({0.0}, -1.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("perimeter of polygonal sets") {
    const auto dom = make_domain_2d({-2.0, -2.0}, {2.0, 2.0},
                                    {box_polygon({-2.0, -2.0}, {2.0, 2.0})});
    const auto square = FinitePerimeterSet::from_polygon(
        Polygon{{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}});
    CHECK(square.perimeter(*dom) == doctest::Approx(4.0));

    const auto tri = FinitePerimeterSet::from_polygon(
        Polygon{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}});
    CHECK(tri.perimeter(*dom) == doctest::Approx(2.0 + std::sqrt(2.0)));

    const auto dom1 = make_domain_1d(-1.0, 4.0, {{-1.0, 4.0}});
    const auto iv = FinitePerimeterSet::from_intervals({{0.0, 1.0}, {2.0, 3.0}});
    CHECK(iv.perimeter(*dom1) == doctest::Approx(4.0));  // H^0 endpoint count

    // not compactly contained
    const auto big = FinitePerimeterSet::from_polygon(
        Polygon{{{-2.0, -2.0}, {2.0, -2.0}, {2.0, 2.0}, {-2.0, 2.0}}});
    CHECK_THROWS_AS((void)big.perimeter(*dom), std::domain_error);
}

TEST_CASE("point classification against density") {
    const auto square = FinitePerimeterSet::from_polygon(
        Polygon{{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}});
    const auto center = square.classify_point({0.5, 0.5});
    CHECK(center.density == doctest::Approx(1.0));
    CHECK(center.label == DensityLabel::E1);

    const auto edge = square.classify_point({0.5, 0.0});
    CHECK(edge.density == doctest::Approx(0.5));
    CHECK(edge.label == DensityLabel::EssentialBoundary);

    const auto vertex = square.classify_point({0.0, 0.0});
    CHECK(vertex.density == doctest::Approx(0.25));
    CHECK(vertex.label == DensityLabel::EssentialBoundary);

    const auto outside = square.classify_point({2.0, 2.0});
    CHECK(outside.density == doctest::Approx(0.0));
    CHECK(outside.label == DensityLabel::E0);
}

TEST_CASE("classification matches ball-average densities") {
    const auto square = FinitePerimeterSet::from_polygon(
        Polygon{{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}});
    auto ball_fraction = [&](const Vec2& x, double r) {
        const int n = 400;
        int inside = 0, total = 0;
        for (int i = -n; i <= n; ++i)
            for (int j = -n; j <= n; ++j) {
                const Vec2 p{x.x + r * i / n, x.y + r * j / n};
                if ((p - x).norm() > r) continue;
                ++total;
                if (square.contains(p)) ++inside;
            }
        return double(inside) / double(total);
    };
    for (const Vec2 x : {Vec2{0.5, 0.5}, Vec2{0.5, 0.0}, Vec2{0.3, 0.7}}) {
        const double reported = square.classify_point(x).density;
        for (const double r : {0.25, 0.125, 0.0625}) {
            CHECK(std::abs(ball_fraction(x, r) - reported) < 0.05 + 2.0 * r);
        }
    }
}

TEST_CASE("reduced boundary normals point inward") {
    const auto square = FinitePerimeterSet::from_polygon(
        Polygon{{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}});
    const auto rb = square.reduced_boundary();
    REQUIRE(rb.size() == 4);
    CHECK(rb[0].nu_int.x == doctest::Approx(0.0));
    CHECK(rb[0].nu_int.y == doctest::Approx(1.0));   // bottom
    CHECK(rb[1].nu_int.x == doctest::Approx(-1.0));  // right
    CHECK(rb[2].nu_int.y == doctest::Approx(-1.0));  // top
    CHECK(rb[3].nu_int.x == doctest::Approx(1.0));   // left
    double perim = 0.0;
    for (const auto& e : rb) {
        perim += e.length();
        const Vec2 mid = (e.p0 + e.p1) * 0.5;
        CHECK(square.contains(mid + e.nu_int * 1e-6));
        CHECK(!square.contains(mid - e.nu_int * 1e-6));
        // the reduced boundary sits inside the half-density set
        CHECK(square.classify_point(mid).density == doctest::Approx(0.5));
    }
    CHECK(perim == doctest::Approx(square.polygon().perimeter()));

    const auto tri = FinitePerimeterSet::from_polygon(
        Polygon{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}});
    const auto rbt = tri.reduced_boundary();
    const double inv = 1.0 / std::sqrt(2.0);
    CHECK(rbt[1].nu_int.x == doctest::Approx(-inv));
    CHECK(rbt[1].nu_int.y == doctest::Approx(-inv));

    const auto iv = FinitePerimeterSet::from_intervals({{0.25, 0.75}});
    const auto rbi = iv.reduced_boundary();
    CHECK(rbi[0].nu_int.x == doctest::Approx(1.0));
    CHECK(rbi[1].nu_int.x == doctest::Approx(-1.0));
}

TEST_CASE("perimeter is additive over separated sets") {
    const auto dom = make_domain_2d({-4.0, -4.0}, {4.0, 4.0},
                                    {box_polygon({-4.0, -4.0}, {4.0, 4.0})});
    const auto a = FinitePerimeterSet::from_polygon(
        Polygon{{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}});
    const auto b = FinitePerimeterSet::from_polygon(
        Polygon{{{2.0, 2.0}, {3.0, 2.0}, {3.0, 3.0}, {2.0, 3.0}}});
    CHECK(a.perimeter(*dom) + b.perimeter(*dom) == doctest::Approx(8.0));
}

TEST_CASE("skeleton construction and orientation") {
    const auto dom1 = make_domain_1d(-2.0, 2.0, {{-2.0, 0.0}, {0.0, 2.0}});
    REQUIRE(dom1->skeleton().size() == 1);
    CHECK(dom1->skeleton()[0].p0.x == doctest::Approx(0.0));
    CHECK(dom1->skeleton()[0].nu.x == doctest::Approx(1.0));
    CHECK(dom1->skeleton()[0].cell_minus == 0);
    CHECK(dom1->skeleton()[0].cell_plus == 1);

    const auto dom2 = make_domain_2d(
        {-1.0, -1.0}, {1.0, 1.0},
        {Polygon{{{-1.0, -1.0}, {0.0, -1.0}, {0.0, 1.0}, {-1.0, 1.0}}},
         Polygon{{{0.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {0.0, 1.0}}}});
    REQUIRE(dom2->skeleton().size() == 1);
    const auto& e = dom2->skeleton()[0];
    CHECK(e.nu.norm() == doctest::Approx(1.0));
    // ν points from cell_minus into cell_plus
    const Vec2 mid = (e.p0 + e.p1) * 0.5;
    const int plus = dom2->locate(mid + e.nu * 1e-6);
    CHECK(plus == e.cell_plus);
    const int minus = dom2->locate(mid - e.nu * 1e-6);
    CHECK(minus == e.cell_minus);
}

TEST_CASE("convex clipping and triangulation") {
    const Polygon cell = box_polygon({0.0, 0.0}, {2.0, 2.0});
    const Polygon clip = box_polygon({1.0, 1.0}, {3.0, 3.0});
    const Polygon inter = clip_convex(cell, clip);
    CHECK(inter.area() == doctest::Approx(1.0));

    double total = 0.0;
    for (const auto& t : triangulate(cell))
        total += 0.5 * std::abs((t[1] - t[0]).cross(t[2] - t[0]));
    CHECK(total == doctest::Approx(4.0));

    const auto segs = clip_segment_to_convex({-1.0, 1.0}, {3.0, 1.0}, cell);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].first == doctest::Approx(1.0));
    CHECK(segs[0].second == doctest::Approx(3.0));
}
