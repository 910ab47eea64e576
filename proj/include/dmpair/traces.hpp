#pragma once

#include <vector>

#include "dmpair/bvfunc.hpp"
#include "dmpair/field.hpp"

namespace dmpair {

/// Weak normal traces β±(·,t) of B(·,t) on a subset Σ of the skeleton,
/// oriented by the stored skeleton normals. β∓ is the one-sided normal
/// component B(x from cell∓, t)·ν(x); for the polynomial family these are
/// exactly the Anzellotti traces, and the jump identity
/// Div_x B(·,t)⌐Σ = (β⁺-β⁻) H^{N-1}⌐Σ holds by construction.
class TracePair {
public:
    TracePair(const PiecewiseField* field, std::vector<int> edges);

    const std::vector<int>& edges() const { return edges_; }
    const PiecewiseField& field() const { return *field_; }

    double beta_minus(int edge, double s, double t) const;
    double beta_plus(int edge, double s, double t) const;
    double beta_star(int edge, double s, double t) const;

    /// Sampled sup over edge points and t,s pairs of |β±(x,t)-β±(x,s)|/|t-s|.
    double lipschitz_bound(int edge_samples = 11, int t_samples = 9) const;

    /// Sampled ‖β±(·,t)‖_∞ over Σ at fixed t.
    double sup_bound(double t, int edge_samples = 33) const;

private:
    const PiecewiseField* field_;
    std::vector<int> edges_;

    double beta_side(int edge, bool plus, double s, double t) const;
};

/// Traces of the composite field v(x) = B(x,u(x)): β±(x,u±(x)) on the jump
/// set and β±(x,ũ(x)) elsewhere on Σ.
double composite_trace(const PiecewiseField& field, const PiecewiseBV& u, int edge, bool plus,
                       double s);

} // namespace dmpair
