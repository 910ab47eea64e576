#pragma once

#include <optional>
#include <vector>

#include "dmpair/measure.hpp"
#include "dmpair/poly.hpp"

namespace dmpair {

/// BV function with polynomial pieces per cell, jump data on skeleton edges
/// and, in 1D, an optional Cantor-function summand c·K((x-a)/(b-a)).
class PiecewiseBV {
public:
    struct CantorData {
        double coeff = 0.0;
        double a = 0.0, b = 1.0;
    };

    PiecewiseBV(DomainPtr dom, std::vector<Poly> cell_polys,
                std::optional<CantorData> cantor = std::nullopt);

    const DomainPtr& domain() const { return dom_; }
    int dim() const { return dom_->dim(); }
    double sup_norm() const { return sup_; }

    const Poly& cell_poly(int c) const { return u_.at(std::size_t(c)); }
    const std::optional<CantorData>& cantor() const { return cantor_; }
    int cantor_cell() const { return cantor_cell_; }
    double cantor_summand(double x) const;

    /// Value of u at a point of the given cell (includes the Cantor summand).
    double value_cell(int cell, const Vec2& x) const;
    /// Value at a non-skeleton point (the approximate limit ũ).
    double value(const Vec2& x) const;

    struct EdgeData {
        Poly u_minus, u_plus;  // one-sided traces in the edge arclength s
        bool in_jump_set = false;
    };
    const EdgeData& edge_data(int e) const { return edges_.at(std::size_t(e)); }
    /// One-sided values at a point of edge e (Cantor summand included).
    double minus_value(int e, double s) const;
    double plus_value(int e, double s) const;

    struct ApproxLimits {
        double u_plus = 0.0, u_minus = 0.0;
        Vec2 nu;
        bool jump = false;
    };
    /// Jump triplet (u⁺, u⁻, ν) at a skeleton point, ordered by the stored
    /// skeleton normal. Vertex points are rejected.
    ApproxLimits approximate_limits(const Vec2& x) const;

    /// u* = (u⁺+u⁻)/2 on the jump set, ũ elsewhere.
    double precise_representative(const Vec2& x) const;

    VectorMeasure grad_absolutely_continuous() const;  // D^a u
    VectorMeasure grad_jump() const;                   // D^j u
    VectorMeasure grad_cantor() const;                 // D^c u
    VectorMeasure grad_total() const;                  // Du
    HybridMeasure variation_measure() const;           // |Du|

    Poly grad_poly(int cell, int k) const;

private:
    DomainPtr dom_;
    std::vector<Poly> u_;
    std::optional<CantorData> cantor_;
    int cantor_cell_ = -1;
    std::vector<EdgeData> edges_;
    double sup_ = 0.0;

    void build_edges();
    void compute_sup();
};

} // namespace dmpair
