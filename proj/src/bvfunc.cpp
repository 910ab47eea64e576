#include "dmpair/bvfunc.hpp"

#include <cmath>
#include <stdexcept>

namespace dmpair {

PiecewiseBV::PiecewiseBV(DomainPtr dom, std::vector<Poly> cell_polys,
                         std::optional<CantorData> cantor)
    : dom_(std::move(dom)), u_(std::move(cell_polys)), cantor_(std::move(cantor)) {
    u_.resize(dom_->cell_count());
    if (cantor_ && cantor_->coeff == 0.0) cantor_.reset();
    if (cantor_) {
        if (dom_->dim() != 1)
            throw std::invalid_argument("Cantor components are supported in 1D only");
        if (cantor_->b <= cantor_->a)
            throw std::invalid_argument("Cantor placement interval is degenerate");
        for (const auto& e : dom_->skeleton())
            if (e.p0.x >= cantor_->a - kGeomTol && e.p0.x <= cantor_->b + kGeomTol)
                throw std::invalid_argument(
                    "Cantor support must stay clear of the skeleton");
        cantor_cell_ = dom_->locate({0.5 * (cantor_->a + cantor_->b), 0.0});
        const auto& iv = dom_->cells_1d()[std::size_t(cantor_cell_)];
        if (cantor_->a < iv.a - kGeomTol || cantor_->b > iv.b + kGeomTol)
            throw std::invalid_argument("Cantor support must lie inside one cell");
    }
    build_edges();
    compute_sup();
}

double PiecewiseBV::cantor_summand(double x) const {
    if (!cantor_) return 0.0;
    return cantor_->coeff * cantor_function((x - cantor_->a) / (cantor_->b - cantor_->a));
}

double PiecewiseBV::value_cell(int cell, const Vec2& x) const {
    return u_.at(std::size_t(cell)).eval(x.x, x.y, 0.0) + cantor_summand(x.x);
}

double PiecewiseBV::value(const Vec2& x) const {
    const int cell = dom_->locate(x);
    if (cell < 0) throw std::domain_error("bv: point outside the domain");
    return value_cell(cell, x);
}

void PiecewiseBV::build_edges() {
    const auto& skel = dom_->skeleton();
    edges_.resize(skel.size());
    for (std::size_t e = 0; e < skel.size(); ++e) {
        const auto& ed = skel[e];
        const double len = (ed.p1 - ed.p0).norm();
        const Vec2 dir = len < kGeomTol ? Vec2{0.0, 0.0} : (ed.p1 - ed.p0) * (1.0 / len);
        EdgeData data;
        data.u_minus = u_[std::size_t(ed.cell_minus)].restrict_line(ed.p0.x, ed.p0.y, dir.x, dir.y);
        data.u_plus = u_[std::size_t(ed.cell_plus)].restrict_line(ed.p0.x, ed.p0.y, dir.x, dir.y);
        data.in_jump_set = !data.u_plus.same_terms(data.u_minus, 1e-12);
        edges_[e] = data;
    }
}

void PiecewiseBV::compute_sup() {
    double best = 0.0;
    if (dim() == 1) {
        for (std::size_t c = 0; c < dom_->cells_1d().size(); ++c) {
            const auto& iv = dom_->cells_1d()[c];
            const int n = 256;
            for (int i = 0; i <= n; ++i) {
                const double x = iv.a + (iv.b - iv.a) * double(i) / n;
                best = std::max(best, std::abs(value_cell(int(c), {x, 0.0})));
            }
            // without a Cantor summand the per-cell sup is exact
            if (!cantor_)
                best = std::max(best, poly1_max_abs(coeffs_in_x(u_[c], 0.0, 0.0), iv.a, iv.b));
        }
    } else {
        for (std::size_t c = 0; c < dom_->cells_2d().size(); ++c) {
            for (const auto& tri : triangulate(dom_->cells_2d()[c])) {
                const int n = 16;
                for (int i = 0; i <= n; ++i)
                    for (int j = 0; i + j <= n; ++j) {
                        const double l0 = double(i) / n, l1 = double(j) / n;
                        const Vec2 x = tri[0] * l0 + tri[1] * l1 + tri[2] * (1.0 - l0 - l1);
                        best = std::max(best, std::abs(value_cell(int(c), x)));
                    }
            }
        }
    }
    sup_ = best;
}

double PiecewiseBV::minus_value(int e, double s) const {
    const auto& ed = dom_->skeleton()[std::size_t(e)];
    return edges_[std::size_t(e)].u_minus.eval(s, 0.0, 0.0) + cantor_summand(ed.point_at(s).x);
}

double PiecewiseBV::plus_value(int e, double s) const {
    const auto& ed = dom_->skeleton()[std::size_t(e)];
    return edges_[std::size_t(e)].u_plus.eval(s, 0.0, 0.0) + cantor_summand(ed.point_at(s).x);
}

PiecewiseBV::ApproxLimits PiecewiseBV::approximate_limits(const Vec2& x) const {
    const auto& skel = dom_->skeleton();
    for (std::size_t e = 0; e < skel.size(); ++e) {
        const auto& ed = skel[e];
        if (!ed.contains_point(x)) continue;
        const double len = (ed.p1 - ed.p0).norm();
        const double s = ed.project(x);
        if (len > kGeomTol && (s <= kGeomTol || s >= len - kGeomTol))
            throw std::domain_error("approximate limits: vertex points are excluded");
        ApproxLimits out;
        out.u_minus = minus_value(int(e), s);
        out.u_plus = plus_value(int(e), s);
        out.nu = ed.nu;
        out.jump = edges_[e].in_jump_set;
        return out;
    }
    // off the skeleton: ũ on both sides
    ApproxLimits out;
    out.u_plus = out.u_minus = value(x);
    out.nu = {0.0, 0.0};
    return out;
}

double PiecewiseBV::precise_representative(const Vec2& x) const {
    const auto lims = approximate_limits(x);
    return 0.5 * (lims.u_plus + lims.u_minus);
}

VectorMeasure PiecewiseBV::grad_absolutely_continuous() const {
    VectorMeasure m;
    for (int k = 0; k < dim(); ++k) {
        HybridMeasure comp(dom_);
        for (std::size_t c = 0; c < u_.size(); ++c) {
            const Poly g = k == 0 ? u_[c].dx() : u_[c].dy();
            if (g.is_zero()) continue;
            comp.add_cell_density(c, [g](const Vec2& x) { return g.eval(x.x, x.y, 0.0); });
        }
        m.comp.push_back(std::move(comp));
    }
    return m;
}

VectorMeasure PiecewiseBV::grad_jump() const {
    VectorMeasure m;
    const auto& skel = dom_->skeleton();
    for (int k = 0; k < dim(); ++k) {
        HybridMeasure comp(dom_);
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            if (!edges_[e].in_jump_set) continue;
            const Poly jump = edges_[e].u_plus - edges_[e].u_minus;
            const double nu_k = k == 0 ? skel[e].nu.x : skel[e].nu.y;
            if (nu_k == 0.0) continue;
            comp.add_edge_density(e, [jump, nu_k](double s) {
                return jump.eval(s, 0.0, 0.0) * nu_k;
            });
        }
        m.comp.push_back(std::move(comp));
    }
    return m;
}

VectorMeasure PiecewiseBV::grad_cantor() const {
    VectorMeasure m;
    for (int k = 0; k < dim(); ++k) {
        HybridMeasure comp(dom_);
        if (k == 0 && cantor_) {
            CantorComponent cc;
            cc.coeff = cantor_->coeff;
            cc.a = cantor_->a;
            cc.b = cantor_->b;
            cc.cell = cantor_cell_;
            comp.add_cantor(cc);
        }
        m.comp.push_back(std::move(comp));
    }
    return m;
}

VectorMeasure PiecewiseBV::grad_total() const {
    VectorMeasure a = grad_absolutely_continuous();
    const VectorMeasure j = grad_jump();
    const VectorMeasure c = grad_cantor();
    VectorMeasure out;
    for (int k = 0; k < dim(); ++k)
        out.comp.push_back(a.comp[std::size_t(k)] + j.comp[std::size_t(k)] +
                           c.comp[std::size_t(k)]);
    return out;
}

HybridMeasure PiecewiseBV::variation_measure() const {
    HybridMeasure m(dom_);
    const int d = dim();
    for (std::size_t c = 0; c < u_.size(); ++c) {
        const Poly gx = u_[c].dx();
        const Poly gy = d == 2 ? u_[c].dy() : Poly();
        if (gx.is_zero() && gy.is_zero()) continue;
        m.add_cell_density(c, [gx, gy](const Vec2& x) {
            const double a = gx.eval(x.x, x.y, 0.0);
            const double b = gy.eval(x.x, x.y, 0.0);
            return std::hypot(a, b);
        });
    }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (!edges_[e].in_jump_set) continue;
        const Poly jump = edges_[e].u_plus - edges_[e].u_minus;
        m.add_edge_density(e, [jump](double s) { return std::abs(jump.eval(s, 0.0, 0.0)); });
    }
    if (cantor_) {
        CantorComponent cc;
        cc.coeff = std::abs(cantor_->coeff);
        cc.a = cantor_->a;
        cc.b = cantor_->b;
        cc.cell = cantor_cell_;
        m.add_cantor(cc);
    }
    return m;
}

Poly PiecewiseBV::grad_poly(int cell, int k) const {
    return k == 0 ? u_.at(std::size_t(cell)).dx() : u_.at(std::size_t(cell)).dy();
}

} // namespace dmpair
