#pragma once

#include <optional>
#include <vector>

#include "dmpair/measure.hpp"
#include "dmpair/poly.hpp"

namespace dmpair {

/// Field family b(x,t) with polynomial pieces per cell, together with its
/// t-antiderivative B(x,t) = ∫₀ᵗ b(x,s) ds, the divergence measures
/// Div_x b(·,t), their least upper bound σ over t ∈ [-T,T], and the
/// densities f, F of Div_x b(·,t), Div_x B(·,t) with respect to σ.
class PiecewiseField {
public:
    /// components[cell][k] is the k-th component polynomial on that cell
    /// (k < spatial dimension). Missing trailing cells are zero.
    PiecewiseField(DomainPtr dom, std::vector<std::vector<Poly>> components, double t_max);

    const DomainPtr& domain() const { return dom_; }
    int dim() const { return dom_->dim(); }
    double t_max() const { return T_; }
    double sup_norm() const { return sup_; }  // ‖b‖_∞ on Ω × [-T,T]

    void check_t(double t) const;

    Vec2 eval_b(const Vec2& x, double t) const;               // cell⁻ value on the skeleton
    Vec2 eval_b_cell(int cell, const Vec2& x, double t) const;
    Vec2 eval_B(const Vec2& x, double t) const;
    Vec2 eval_B_cell(int cell, const Vec2& x, double t) const;

    const Poly& b_poly(int cell, int k) const { return b_.at(std::size_t(cell)).at(std::size_t(k)); }
    const Poly& B_poly(int cell, int k) const { return B_.at(std::size_t(cell)).at(std::size_t(k)); }

    /// Div_x b(·,t): pointwise divergence on cells plus (b⁺-b⁻)·ν on edges.
    HybridMeasure div_b(double t) const;
    /// Div_x B(·,t).
    HybridMeasure div_B(double t) const;
    /// σ = ⋁_{|t|≤T} |Div_x b(·,t)| (per-point polynomial maximization in t).
    const HybridMeasure& sigma() const { return *sigma_; }

    // Raw densities of Div_x b(·,t) / Div_x B(·,t).
    double div_density_cell(int cell, const Vec2& x, double t) const;
    double jump_density_edge(int edge, double s, double t) const;
    double divB_density_cell(int cell, const Vec2& x, double t) const;
    double jumpB_density_edge(int edge, double s, double t) const;

    double sigma_cell_density(int cell, const Vec2& x) const;
    double sigma_edge_density(int edge, double s) const;

    // Radon–Nikodým densities w.r.t. σ; zero off the support of σ.
    double f_cell(int cell, const Vec2& x, double t) const;
    double f_edge(int edge, double s, double t) const;
    double F_cell(int cell, const Vec2& x, double t) const;
    double F_edge(int edge, double s, double t) const;
    /// Resolves the support part by location (edge wins on the skeleton).
    double f_at(const Vec2& x, double t) const;
    double F_at(const Vec2& x, double t) const;

    /// Edge-restricted one-sided component polynomials in (s,t).
    const Poly& b_edge_poly(int edge, bool plus, int k) const;
    const Poly& B_edge_poly(int edge, bool plus, int k) const;

private:
    DomainPtr dom_;
    double T_;
    std::vector<std::vector<Poly>> b_, B_;
    std::vector<Poly> divb_cell_, divB_cell_;   // in (x,t)
    std::vector<Poly> jump_edge_, jumpB_edge_;  // in (s,t), s = edge arclength
    std::vector<std::array<std::vector<Poly>, 2>> b_side_, B_side_;  // [edge][minus,plus][k]
    double sup_ = 0.0;
    std::optional<HybridMeasure> sigma_;

    static constexpr double kSigmaFloor = 1e-14;

    void build_derived();
    void compute_sup_norm();
    void build_sigma();
};

} // namespace dmpair
