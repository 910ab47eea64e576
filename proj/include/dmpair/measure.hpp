#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "dmpair/geometry.hpp"
#include "dmpair/poly.hpp"
#include "dmpair/quadrature.hpp"

namespace dmpair {

using DomainPtr = std::shared_ptr<const PolygonalDomain>;

DomainPtr make_domain_1d(double lo, double hi, const std::vector<Interval>& cells);
DomainPtr make_domain_2d(const Vec2& lo, const Vec2& hi, const std::vector<Polygon>& cells);

/// Devil-staircase function: 0 on (-inf,0], 1 on [1,inf).
double cantor_function(double y);

/// ∫ φ dC over the standard middle-thirds Cantor measure on [0,1], restricted
/// to [r0,r1] in unit coordinates. Branch recursion, oscillation-driven.
double cantor_integral(const std::function<double(double)>& phi, double r0, double r1,
                       double tol = 1e-12);

/// Smooth compactly supported bump: p(x) · exp(-1/(1-|x-c|^2/r^2)) in B_r(c).
class TestFunction {
public:
    TestFunction(Vec2 center, double radius, Poly prefactor, int dim);

    /// Constant-prefactor bump.
    static TestFunction bump(const Vec2& c, double r, int dim, double amplitude = 1.0);
    /// Bump with a polynomial prefactor chosen so the value is 1 + O(s^4)
    /// near the center (s = |x-c|^2/r^2); handy when an identity needs
    /// φ ≈ 1 on an inner region.
    static TestFunction plateau(const Vec2& c, double r, int dim);

    double value(const Vec2& x) const;
    Vec2 gradient(const Vec2& x) const;

    const Vec2& center() const { return center_; }
    double radius() const { return radius_; }
    int dim() const { return dim_; }
    const Poly& prefactor() const { return pre_; }

    Vec2 bbox_lo() const;
    Vec2 bbox_hi() const;
    bool supported_inside(const PolygonalDomain& dom) const;

    double sup_norm() const;       // sampled bound of |φ|
    double grad_sup_norm() const;  // sampled bound of |∇φ|

private:
    Vec2 center_;
    double radius_;
    Poly pre_;
    int dim_;
};

struct CantorComponent {
    double coeff = 0.0;
    double a = 0.0, b = 1.0;                  // affine placement of the support
    std::function<double(double)> g;          // continuous density factor (null ⇒ 1)
    int cell = -1;                            // cell containing [a,b]
};

enum class BorelSelection { Interior, WithReducedBoundary };

/// Signed Radon measure as (per-cell L^N density, per-skeleton-edge H^{N-1}
/// density, optional Cantor component). Parts are mutually singular by
/// construction. In 1D an edge is a skeleton point and its "density" is the
/// atom weight.
class HybridMeasure {
public:
    explicit HybridMeasure(DomainPtr dom);

    const DomainPtr& domain() const { return dom_; }

    void add_cell_density(std::size_t cell, std::function<double(const Vec2&)> rho);
    void add_edge_density(std::size_t edge, std::function<double(double)> rho);
    void add_cantor(const CantorComponent& c);

    bool has_cell(std::size_t cell) const { return bool(cell_[cell]); }
    bool has_edge(std::size_t edge) const { return bool(edge_[edge]); }
    const std::optional<CantorComponent>& cantor() const { return cantor_; }

    double cell_density(std::size_t cell, const Vec2& x) const;
    double edge_density(std::size_t edge, double s) const;

    HybridMeasure operator+(const HybridMeasure& o) const;
    HybridMeasure scaled(double a) const;

    /// ∫ φ dμ.
    double apply(const TestFunction& phi, const quad::Options& opt = {}) const;

    /// ∫ f dμ for a generic factor given per support kind. Used by apply and
    /// by the pairing/trace assembly.
    double integrate_against(
        const std::function<double(int cell, const Vec2&)>& on_cells,
        const std::function<double(int edge, double s)>& on_edges,
        const std::function<double(double x)>& on_cantor,
        const quad::Options& opt = {}) const;

    /// |μ|(E). Interior semantics evaluate on E^1; the second selection adds
    /// the reduced boundary.
    double total_variation(const FinitePerimeterSet& E,
                           BorelSelection sel = BorelSelection::Interior,
                           const quad::Options& opt = {}) const;

    /// μ(E^1) (or μ(E^1 ∪ ∂*E)); same support bookkeeping as total_variation
    /// without absolute values.
    double evaluate_on(const FinitePerimeterSet& E,
                       BorelSelection sel = BorelSelection::Interior,
                       const quad::Options& opt = {}) const;

    /// ∫ w d(μ⌐E^1) (or μ⌐(E^1 ∪ ∂*E)); realizes χ_{E^1} μ applied to a
    /// continuous weight, as needed by the gluing formulas.
    double weighted_eval(const FinitePerimeterSet& E, BorelSelection sel,
                         const std::function<double(const Vec2&)>& weight,
                         const quad::Options& opt = {}) const;

    /// μ restricted to whole cells / whole skeleton edges.
    HybridMeasure restrict_to(const std::vector<int>& cells,
                              const std::vector<int>& edges) const;

    bool empty() const;

private:
    DomainPtr dom_;
    std::vector<std::function<double(const Vec2&)>> cell_;
    std::vector<std::function<double(double)>> edge_;
    std::optional<CantorComponent> cantor_;

    double eval_parts(const FinitePerimeterSet& E, BorelSelection sel, bool absolute,
                      const std::function<double(const Vec2&)>* weight,
                      const quad::Options& opt) const;
};

/// Vector-valued measure, one HybridMeasure per component.
struct VectorMeasure {
    std::vector<HybridMeasure> comp;
    int dim() const { return int(comp.size()); }
};

} // namespace dmpair
