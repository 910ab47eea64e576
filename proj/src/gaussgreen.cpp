#include "dmpair/gaussgreen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dmpair {

namespace {

// Parameters along [p0,p1] where the integrand can change cells: overlaps and
// crossings with skeleton edges.
std::vector<double> segment_breakpoints(const PolygonalDomain& dom, const Vec2& p0,
                                        const Vec2& p1) {
    const Vec2 d = p1 - p0;
    const double len = d.norm();
    const Vec2 u = d * (1.0 / len);
    std::vector<double> cuts{0.0, len};
    for (const auto& e : dom.skeleton()) {
        const Vec2 d2 = e.p1 - e.p0;
        const double len2 = d2.norm();
        if (len2 < kGeomTol) {  // 1D handled elsewhere
            continue;
        }
        const double cr = u.cross(d2 * (1.0 / len2));
        if (std::abs(cr) < 1e-12) {
            // parallel: if collinear, the overlap endpoints are breakpoints
            if (std::abs(u.cross(e.p0 - p0)) < 1e-10) {
                for (const Vec2& q : {e.p0, e.p1}) {
                    const double s = u.dot(q - p0);
                    if (s > kGeomTol && s < len - kGeomTol) cuts.push_back(s);
                }
            }
            continue;
        }
        // transversal intersection
        const double s = (e.p0 - p0).cross(d2) / d.cross(d2) * len;
        const double t = (p0 - e.p0).cross(d) / d2.cross(d) * len2;
        if (s > kGeomTol && s < len - kGeomTol && t > -kGeomTol && t < len2 + kGeomTol)
            cuts.push_back(s);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               cuts.end());
    return cuts;
}

} // namespace

double boundary_trace_integral(const PiecewiseField& field, const PiecewiseBV& u,
                               const FinitePerimeterSet& E, bool inside,
                               const std::function<double(const Vec2&)>* weight,
                               const quad::Options& opt) {
    const auto& dom = *field.domain();
    const double scale = (dom.hi() - dom.lo()).norm();
    const double delta = 1e-9 * std::max(1.0, scale);
    auto side_value = [&](const Vec2& x, const Vec2& nu_int) {
        const Vec2 probe = x + nu_int * (inside ? delta : -delta);
        const int cell = dom.locate(probe);
        if (cell < 0) throw std::domain_error("trace integral: probe left the domain");
        const double uval = u.value_cell(cell, x);
        const double w = weight ? (*weight)(x) : 1.0;
        return field.eval_B_cell(cell, x, uval).dot(nu_int) * w;
    };
    std::vector<double> parts;
    for (const auto& piece : E.reduced_boundary()) {
        if (dom.dim() == 1) {
            parts.push_back(side_value(piece.p0, piece.nu_int));
            continue;
        }
        const Vec2 d = piece.p1 - piece.p0;
        const double len = d.norm();
        const Vec2 dir = d * (1.0 / len);
        const auto cuts = segment_breakpoints(dom, piece.p0, piece.p1);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            parts.push_back(quad::integrate(
                [&](double s) { return side_value(piece.p0 + dir * s, piece.nu_int); },
                cuts[i], cuts[i + 1], opt));
        }
    }
    return par::pairwise_sum(parts);
}

BalanceReport gauss_green(const PiecewiseField& field, const PiecewiseBV& u,
                          const FinitePerimeterSet& E, const quad::Options& opt) {
    if (!E.compactly_inside(*field.domain()))
        throw std::domain_error("gauss-green: set not compactly contained in the domain");
    const PairingResult pr = pairing_decomposition(field, u);
    BalanceReport rep;
    rep.lhs_interior = pr.composite_div.evaluate_on(E, BorelSelection::Interior, opt);
    rep.lhs_closure = pr.composite_div.evaluate_on(E, BorelSelection::WithReducedBoundary, opt);
    const double tin = boundary_trace_integral(field, u, E, /*inside=*/true, nullptr, opt);
    const double tout = boundary_trace_integral(field, u, E, /*inside=*/false, nullptr, opt);
    rep.rhs_interior = -tin;
    rep.rhs_closure = -tout;
    rep.interface_flux = tin - tout;
    return rep;
}

BalanceReport gauss_green_weakly_regular(const PiecewiseField& field, const PiecewiseBV& u,
                                         const FinitePerimeterSet& omega,
                                         const quad::Options& opt) {
    // For a polygon, Ω = Ω^1 up to the H^{N-1}-null vertex set and
    // ∂Ω = ∂*Ω, so the zero-extension balance coincides with the interior
    // Gauss–Green identity on the closure of Ω.
    return gauss_green(field, u, omega, opt);
}

namespace {

GluedDivergence glue_impl(const PiecewiseField& field1, const PiecewiseBV& u1,
                          const PiecewiseField& field2, const PiecewiseBV& u2,
                          const FinitePerimeterSet& E, const quad::Options& opt) {
    if (field1.domain() != field2.domain() || u1.domain() != field1.domain() ||
        u2.domain() != field2.domain())
        throw std::domain_error("glue: all pieces must share one domain");
    const auto dom = field1.domain();
    if (!E.compactly_inside(*dom))
        throw std::domain_error("glue: interface set not compactly contained");

    const HybridMeasure d1 = composite_divergence(field1, u1);
    const HybridMeasure d2 = composite_divergence(field2, u2);
    const auto v1 = composite_field(field1, u1);
    const auto v2 = composite_field(field2, u2);
    const PiecewiseField f1 = field1, f2 = field2;
    const PiecewiseBV b1 = u1, b2 = u2;
    const FinitePerimeterSet set = E;
    const quad::Options o = opt;

    GluedDivergence out;
    out.v = [v1, v2, set](const Vec2& x) {
        if (set.contains(x)) return v1(x);
        if (set.classify_point(x).label == DensityLabel::E0) return v2(x);
        return Vec2{0.0, 0.0};  // H^{N-1}-null interface
    };
    out.apply = [d1, d2, f1, f2, b1, b2, set, o](const TestFunction& phi) {
        const std::function<double(const Vec2&)> w = [&phi](const Vec2& x) {
            return phi.value(x);
        };
        const double inner = d1.weighted_eval(set, BorelSelection::Interior, w, o);
        const double outer =
            d2.apply(phi, o) -
            d2.weighted_eval(set, BorelSelection::WithReducedBoundary, w, o);
        const double tr_in = boundary_trace_integral(f1, b1, set, /*inside=*/true, &w, o);
        const double tr_out = boundary_trace_integral(f2, b2, set, /*inside=*/false, &w, o);
        return inner + outer + (tr_in - tr_out);
    };
    return out;
}

bool strictly_contains(const FinitePerimeterSet& outer, const FinitePerimeterSet& inner) {
    if (outer.dim() != inner.dim()) return false;
    if (outer.dim() == 1) {
        for (const auto& iv : inner.intervals()) {
            bool covered = false;
            for (const auto& ov : outer.intervals())
                if (iv.a > ov.a + kGeomTol && iv.b < ov.b - kGeomTol) covered = true;
            if (!covered) return false;
        }
        return true;
    }
    for (const Vec2& p : inner.polygon().v)
        if (!outer.polygon().contains(p)) return false;
    return true;
}

} // namespace

GluedDivergence glue(const PiecewiseField& field1, const PiecewiseBV& u1,
                     const PiecewiseField& field2, const PiecewiseBV& u2,
                     const FinitePerimeterSet& U, const quad::Options& opt) {
    return glue_impl(field1, u1, field2, u2, U, opt);
}

GluedDivergence extend(const PiecewiseField& field1, const PiecewiseBV& u1,
                       const PiecewiseField& field2, const PiecewiseBV& u2,
                       const FinitePerimeterSet& E,
                       const std::optional<FinitePerimeterSet>& W,
                       const std::optional<FinitePerimeterSet>& U, const quad::Options& opt) {
    if (W && !strictly_contains(E, *W))
        throw std::domain_error("extend: W must be compactly inside int(E)");
    if (U && !strictly_contains(*U, E))
        throw std::domain_error("extend: E must be compactly inside U");
    return glue_impl(field1, u1, field2, u2, E, opt);
}

} // namespace dmpair
