#pragma once

#include <functional>
#include <optional>

#include "dmpair/pairing.hpp"

namespace dmpair {

/// Two-sided balance of the Gauss–Green identities on a set of finite
/// perimeter: interior version against the inner trace, closure version
/// against the outer trace. Residuals are raw differences.
struct BalanceReport {
    double lhs_interior = 0.0;   // ∫_{E^1} ½[F(u⁺)+F(u⁻)] dσ + μ(E^1)
    double lhs_closure = 0.0;    // same on E^1 ∪ ∂*E
    double rhs_interior = 0.0;   // -∫_{∂*E} β⁺(x,u⁺(x)) dH^{N-1}
    double rhs_closure = 0.0;    // -∫_{∂*E} β⁻(x,u⁻(x)) dH^{N-1}
    double interface_flux = 0.0; // ∫_{∂*E} [β⁺(u⁺) - β⁻(u⁻)] dH^{N-1}
    double residual_interior() const { return lhs_interior - rhs_interior; }
    double residual_closure() const { return lhs_closure - rhs_closure; }
};

/// ∫_{∂*E} of the one-sided composite trace B(x from inside/outside, u)·ν_int.
double boundary_trace_integral(const PiecewiseField& field, const PiecewiseBV& u,
                               const FinitePerimeterSet& E, bool inside,
                               const std::function<double(const Vec2&)>* weight = nullptr,
                               const quad::Options& opt = {});

BalanceReport gauss_green(const PiecewiseField& field, const PiecewiseBV& u,
                          const FinitePerimeterSet& E, const quad::Options& opt = {});

/// Gauss–Green on a weakly regular polygonal set (H^{N-1}(∂Ω) = H^{N-1}(∂*Ω)
/// holds for polygons); realized through the zero-extension of v.
BalanceReport gauss_green_weakly_regular(const PiecewiseField& field, const PiecewiseBV& u,
                                         const FinitePerimeterSet& omega,
                                         const quad::Options& opt = {});

/// Glued composite field and its divergence measure evaluator:
/// Div v = χ_{U^1} Div v₁ + χ_{U^0} Div v₂ + [Tr⁺(v₁,∂*U) - Tr⁻(v₂,∂*U)] H⌐∂*U.
struct GluedDivergence {
    std::function<Vec2(const Vec2&)> v;
    std::function<double(const TestFunction&)> apply;
};

GluedDivergence glue(const PiecewiseField& field1, const PiecewiseBV& u1,
                     const PiecewiseField& field2, const PiecewiseBV& u2,
                     const FinitePerimeterSet& U, const quad::Options& opt = {});

/// Extension across a buffer set: W ⋐ int(E) ⊂ E ⋐ U. The optional W/U
/// polygons are validated when given; both fields live on the common domain.
GluedDivergence extend(const PiecewiseField& field1, const PiecewiseBV& u1,
                       const PiecewiseField& field2, const PiecewiseBV& u2,
                       const FinitePerimeterSet& E,
                       const std::optional<FinitePerimeterSet>& W = std::nullopt,
                       const std::optional<FinitePerimeterSet>& U = std::nullopt,
                       const quad::Options& opt = {});

} // namespace dmpair
