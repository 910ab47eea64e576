#include "dmpair/traces.hpp"

#include <cmath>
#include <stdexcept>

namespace dmpair {

TracePair::TracePair(const PiecewiseField* field, std::vector<int> edges)
    : field_(field), edges_(std::move(edges)) {
    const auto nskel = field_->domain()->skeleton().size();
    for (int e : edges_)
        if (e < 0 || std::size_t(e) >= nskel)
            throw std::domain_error("trace: edge not in the skeleton");
}

double TracePair::beta_side(int edge, bool plus, double s, double t) const {
    field_->check_t(t);
    const auto& ed = field_->domain()->skeleton()[std::size_t(edge)];
    double acc = 0.0;
    for (int k = 0; k < field_->dim(); ++k) {
        const double nu_k = k == 0 ? ed.nu.x : ed.nu.y;
        if (nu_k == 0.0) continue;
        acc += field_->B_edge_poly(edge, plus, k).eval(s, 0.0, t) * nu_k;
    }
    return acc;
}

double TracePair::beta_minus(int edge, double s, double t) const {
    return beta_side(edge, false, s, t);
}

double TracePair::beta_plus(int edge, double s, double t) const {
    return beta_side(edge, true, s, t);
}

double TracePair::beta_star(int edge, double s, double t) const {
    return 0.5 * (beta_side(edge, false, s, t) + beta_side(edge, true, s, t));
}

double TracePair::lipschitz_bound(int edge_samples, int t_samples) const {
    const double T = field_->t_max();
    double bound = 0.0;
    for (int e : edges_) {
        const auto& ed = field_->domain()->skeleton()[std::size_t(e)];
        const double len = (ed.p1 - ed.p0).norm();
        for (int i = 0; i < edge_samples; ++i) {
            const double s =
                len < kGeomTol ? 0.0 : len * (double(i) + 0.5) / double(edge_samples);
            for (int a = 0; a < t_samples; ++a) {
                for (int b = a + 1; b < t_samples; ++b) {
                    const double ta = -T + 2.0 * T * double(a) / double(t_samples - 1);
                    const double tb = -T + 2.0 * T * double(b) / double(t_samples - 1);
                    const double dm =
                        std::abs(beta_side(e, false, s, ta) - beta_side(e, false, s, tb));
                    const double dp =
                        std::abs(beta_side(e, true, s, ta) - beta_side(e, true, s, tb));
                    bound = std::max(bound, std::max(dm, dp) / std::abs(ta - tb));
                }
            }
        }
    }
    return bound;
}

double TracePair::sup_bound(double t, int edge_samples) const {
    double m = 0.0;
    for (int e : edges_) {
        const auto& ed = field_->domain()->skeleton()[std::size_t(e)];
        const double len = (ed.p1 - ed.p0).norm();
        for (int i = 0; i < edge_samples; ++i) {
            const double s =
                len < kGeomTol ? 0.0 : len * (double(i) + 0.5) / double(edge_samples);
            m = std::max(m, std::abs(beta_side(e, false, s, t)));
            m = std::max(m, std::abs(beta_side(e, true, s, t)));
        }
    }
    return m;
}

double composite_trace(const PiecewiseField& field, const PiecewiseBV& u, int edge, bool plus,
                       double s) {
    if (u.sup_norm() > field.t_max() + 1e-12)
        throw std::domain_error("composite trace: ‖u‖_∞ exceeds the field t range");
    TracePair tp(&field, {edge});
    const double uval = plus ? u.plus_value(edge, s) : u.minus_value(edge, s);
    return plus ? tp.beta_plus(edge, s, uval) : tp.beta_minus(edge, s, uval);
}

} // namespace dmpair
