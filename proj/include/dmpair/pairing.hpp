#pragma once

#include <vector>

#include "dmpair/bvfunc.hpp"
#include "dmpair/field.hpp"
#include "dmpair/measure.hpp"
#include "dmpair/mollify.hpp"

namespace dmpair {

/// The pairing measure μ = (b(·,u),Du), its decomposition into absolutely
/// continuous, Cantor and jump parts, the companion measure
/// ½[F(x,u⁺)+F(x,u⁻)]σ, and the divergence of v(x) = B(x,u(x)).
struct PairingResult {
    HybridMeasure mu_ac, mu_c, mu_j, mu_total;
    HybridMeasure F_term;
    HybridMeasure composite_div;  // F_term + mu_total
    double b_sup = 0.0;
    double u_sup = 0.0;
};

/// Decomposition route: μ^ac = ⟨b(x,ũ),∇u⟩L^N, μ^j = [β*(x,u⁺)-β*(x,u⁻)]H⌐J_u,
/// μ^c = ⟨b̃(x,ũ),D^c u⟩. Requires ‖u‖_∞ ≤ T.
PairingResult pairing_decomposition(const PiecewiseField& field, const PiecewiseBV& u);

/// Defining formula: -½∫[F(x,u⁺)+F(x,u⁻)]φ dσ - ∫B(x,u(x))·∇φ dx.
double pairing_by_definition(const PiecewiseField& field, const PiecewiseBV& u,
                             const TestFunction& phi, const quad::Options& opt = {});

struct MollifiedRoute {
    std::vector<double> eps;
    std::vector<double> values;
    double extrapolated = 0.0;
    double fitted_order = 0.0;
};

/// Sample table of u_ε, ∇u_ε on a fixed skeleton-refined panelization; built
/// once per ε and reused across test functions. The table build is the
/// OpenMP-parallel kernel of this module.
class MollifiedPairing {
public:
    MollifiedPairing(const PiecewiseField& field, const PiecewiseBV& u,
                     std::vector<double> eps_sequence, const quad::Options& opt = {});

    /// ∫ φ ⟨b(x,u_ε(x)), ∇u_ε(x)⟩ dx for every ε, plus the extrapolated limit.
    MollifiedRoute evaluate(const TestFunction& phi) const;

    const std::vector<double>& eps() const { return eps_; }

private:
    struct Node {
        Vec2 x;
        double weight;       // quadrature weight
        Vec2 integrand_vec;  // b(x,u_ε(x)) ∇u_ε-weighted: stores b·(…) per axis
    };
    const PiecewiseField* field_;
    const PiecewiseBV* u_;
    std::vector<double> eps_;
    std::vector<std::vector<Node>> tables_;  // per ε

    void build(const quad::Options& opt);
};

MollifiedRoute pairing_by_mollification(const PiecewiseField& field, const PiecewiseBV& u,
                                        const TestFunction& phi,
                                        const std::vector<double>& eps_sequence,
                                        const quad::Options& opt = {});

/// Div v as a measure (Eq. of the chain rule): F_term + μ.
HybridMeasure composite_divergence(const PiecewiseField& field, const PiecewiseBV& u);

/// Pointwise evaluator of v(x) = B(x,u(x)) for oracle checks.
std::function<Vec2(const Vec2&)> composite_field(const PiecewiseField& field,
                                                 const PiecewiseBV& u);

/// Classical pairing (A,Du) for a t-independent field (B = tA): must agree
/// with pairing_decomposition exactly.
HybridMeasure anzellotti_pairing(const PiecewiseField& field, const PiecewiseBV& u);

/// -∫ u*φ dDivA - ∫ u A·∇φ dx, the classical defining functional.
double anzellotti_by_definition(const PiecewiseField& field, const PiecewiseBV& u,
                                const TestFunction& phi, const quad::Options& opt = {});

} // namespace dmpair
