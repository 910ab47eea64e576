#pragma once

// Shared scenario builders for the test suites.

#include "dmpair/bvfunc.hpp"
#include "dmpair/field.hpp"
#include "dmpair/measure.hpp"

namespace dmpair::testing {

inline DomainPtr dom_sign_1d() {
    return make_domain_1d(-2.0, 2.0, {{-2.0, 0.0}, {0.0, 2.0}});
}

/// b(x,t) = sign(x), t-independent.
inline PiecewiseField field_sign_1d(const DomainPtr& dom, double T = 1.5) {
    return PiecewiseField(dom, {{Poly(-1.0)}, {Poly(1.0)}}, T);
}

/// b(x,t) = t·sign(x).
inline PiecewiseField field_tsign_1d(const DomainPtr& dom, double T = 1.0) {
    return PiecewiseField(dom, {{Poly::var_t().scaled(-1.0)}, {Poly::var_t()}}, T);
}

/// u = χ_{x>0}.
inline PiecewiseBV u_step_1d(const DomainPtr& dom) {
    return PiecewiseBV(dom, {Poly(), Poly(1.0)});
}

/// 3×3 partition of (-2,2)² with grid lines x,y ∈ {0,1}; the central cell is
/// the unit square (0,1)² (cell index 4).
inline DomainPtr dom_grid_2d() {
    const double xs[4] = {-2.0, 0.0, 1.0, 2.0};
    std::vector<Polygon> cells;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
            cells.push_back(Polygon{{{xs[i], xs[j]},
                                     {xs[i + 1], xs[j]},
                                     {xs[i + 1], xs[j + 1]},
                                     {xs[i], xs[j + 1]}}});
    return make_domain_2d({-2.0, -2.0}, {2.0, 2.0}, cells);
}

constexpr int kCenterCell2d = 4;

/// Constant field b = A, t-independent.
inline PiecewiseField field_const_2d(const DomainPtr& dom, Vec2 A = {1.0, 0.0},
                                     double T = 1.5) {
    std::vector<std::vector<Poly>> comps(dom->cell_count());
    for (auto& c : comps) c = {Poly(A.x), Poly(A.y)};
    return PiecewiseField(dom, comps, T);
}

/// Radial field b = (x1, x2), t-independent.
inline PiecewiseField field_radial_2d(const DomainPtr& dom, double T = 1.5) {
    std::vector<std::vector<Poly>> comps(dom->cell_count());
    for (auto& c : comps) c = {Poly::var_x(), Poly::var_y()};
    return PiecewiseField(dom, comps, T);
}

/// u = χ_{(0,1)²} on the 3×3 grid.
inline PiecewiseBV u_chi_square(const DomainPtr& dom) {
    std::vector<Poly> cells(dom->cell_count());
    cells[kCenterCell2d] = Poly(1.0);
    return PiecewiseBV(dom, cells);
}

inline PiecewiseBV u_const(const DomainPtr& dom, double c) {
    std::vector<Poly> cells(dom->cell_count(), Poly(c));
    return PiecewiseBV(dom, cells);
}

inline DomainPtr dom_cantor_1d() {
    return make_domain_1d(-4.0, 5.0, {{-4.0, -1.0}, {-1.0, 2.0}, {2.0, 5.0}});
}

/// b(x,t) = x on (-4,5).
inline PiecewiseField field_x_1d(const DomainPtr& dom, double T = 1.0) {
    std::vector<std::vector<Poly>> comps(dom->cell_count(), {Poly::var_x()});
    return PiecewiseField(dom, comps, T);
}

/// u = Cantor function on [0,1]; the summand itself continues as the
/// constant 1 to the right, so every cell polynomial stays zero.
inline PiecewiseBV u_cantor(const DomainPtr& dom) {
    PiecewiseBV::CantorData cd{1.0, 0.0, 1.0};
    return PiecewiseBV(dom, {Poly(), Poly(), Poly()}, cd);
}

inline FinitePerimeterSet unit_square_set() {
    return FinitePerimeterSet::from_polygon(
        Polygon{{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}});
}

} // namespace dmpair::testing
