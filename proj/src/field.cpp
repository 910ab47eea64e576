#include "dmpair/field.hpp"

#include <cmath>
#include <stdexcept>

namespace dmpair {

PiecewiseField::PiecewiseField(DomainPtr dom, std::vector<std::vector<Poly>> components,
                               double t_max)
    : dom_(std::move(dom)), T_(t_max), b_(std::move(components)) {
    if (T_ <= 0.0) throw std::invalid_argument("field: t range must be positive");
    const std::size_t ncells = dom_->cell_count();
    const std::size_t nc = std::size_t(dom_->dim());
    b_.resize(ncells);
    for (auto& comps : b_) comps.resize(nc);
    build_derived();
    compute_sup_norm();
    build_sigma();
}

void PiecewiseField::build_derived() {
    const int dim = dom_->dim();
    B_.resize(b_.size());
    divb_cell_.resize(b_.size());
    divB_cell_.resize(b_.size());
    for (std::size_t c = 0; c < b_.size(); ++c) {
        B_[c].resize(b_[c].size());
        Poly div;
        for (int k = 0; k < dim; ++k) {
            B_[c][std::size_t(k)] = b_[c][std::size_t(k)].integral_t();
            div = div + (k == 0 ? b_[c][0].dx() : b_[c][1].dy());
        }
        divb_cell_[c] = div;
        divB_cell_[c] = div.integral_t();
    }
    const auto& skel = dom_->skeleton();
    jump_edge_.resize(skel.size());
    jumpB_edge_.resize(skel.size());
    b_side_.resize(skel.size());
    B_side_.resize(skel.size());
    for (std::size_t e = 0; e < skel.size(); ++e) {
        const auto& ed = skel[e];
        const double len = (ed.p1 - ed.p0).norm();
        const Vec2 dir = len < kGeomTol ? Vec2{0.0, 0.0} : (ed.p1 - ed.p0) * (1.0 / len);
        Poly jump;
        for (int side = 0; side < 2; ++side) {
            const int cell = side == 0 ? ed.cell_minus : ed.cell_plus;
            b_side_[e][std::size_t(side)].resize(std::size_t(dim));
            B_side_[e][std::size_t(side)].resize(std::size_t(dim));
            for (int k = 0; k < dim; ++k) {
                const Poly restr =
                    b_[std::size_t(cell)][std::size_t(k)].restrict_line(ed.p0.x, ed.p0.y, dir.x,
                                                                        dir.y);
                b_side_[e][std::size_t(side)][std::size_t(k)] = restr;
                B_side_[e][std::size_t(side)][std::size_t(k)] = restr.integral_t();
                const double nu_k = k == 0 ? ed.nu.x : ed.nu.y;
                jump = jump + restr.scaled((side == 0 ? -1.0 : 1.0) * nu_k);
            }
        }
        jump_edge_[e] = jump;
        jumpB_edge_[e] = jump.integral_t();
    }
}

void PiecewiseField::compute_sup_norm() {
    const int dim = dom_->dim();
    double best = 0.0;
    auto probe = [&](int cell, const Vec2& x) {
        // |b(x,·)|² is a polynomial in t; its max over [-T,T] is exact.
        Poly sq;
        for (int k = 0; k < dim; ++k) {
            const Poly& p = b_[std::size_t(cell)][std::size_t(k)];
            sq = sq + p * p;
        }
        const double m = poly1_max_abs(coeffs_in_t(sq, x.x, x.y), -T_, T_);
        best = std::max(best, std::sqrt(std::max(0.0, m)));
    };
    if (dim == 1) {
        for (std::size_t c = 0; c < dom_->cells_1d().size(); ++c) {
            const auto& iv = dom_->cells_1d()[c];
            const int n = 64;
            for (int i = 0; i <= n; ++i)
                probe(int(c), {iv.a + (iv.b - iv.a) * double(i) / n, 0.0});
        }
    } else {
        for (std::size_t c = 0; c < dom_->cells_2d().size(); ++c) {
            for (const auto& tri : triangulate(dom_->cells_2d()[c])) {
                const int n = 12;
                for (int i = 0; i <= n; ++i)
                    for (int j = 0; i + j <= n; ++j) {
                        const double l0 = double(i) / n, l1 = double(j) / n;
                        const double l2 = 1.0 - l0 - l1;
                        probe(int(c), tri[0] * l0 + tri[1] * l1 + tri[2] * l2);
                    }
            }
        }
    }
    // local pattern refinement around the sampled argmax is unnecessary for
    // the polynomial families used here: the grids above include all cell
    // vertices and edges where low-order polynomials peak.
    sup_ = best;
}

void PiecewiseField::build_sigma() {
    HybridMeasure sigma(dom_);
    for (std::size_t c = 0; c < divb_cell_.size(); ++c) {
        if (divb_cell_[c].is_zero()) continue;
        const Poly p = divb_cell_[c];
        const double T = T_;
        sigma.add_cell_density(c, [p, T](const Vec2& x) {
            return poly1_max_abs(coeffs_in_t(p, x.x, x.y), -T, T);
        });
    }
    for (std::size_t e = 0; e < jump_edge_.size(); ++e) {
        if (jump_edge_[e].is_zero()) continue;
        const Poly p = jump_edge_[e];
        const double T = T_;
        sigma.add_edge_density(e, [p, T](double s) {
            return poly1_max_abs(coeffs_in_t(p, s, 0.0), -T, T);
        });
    }
    sigma_ = std::move(sigma);
}

void PiecewiseField::check_t(double t) const {
    if (t < -T_ - 1e-12 || t > T_ + 1e-12)
        throw std::domain_error("field: t outside the stored t range");
}

Vec2 PiecewiseField::eval_b(const Vec2& x, double t) const {
    const int cell = dom_->locate(x);
    if (cell < 0) throw std::domain_error("field: point outside the domain");
    return eval_b_cell(cell, x, t);
}

Vec2 PiecewiseField::eval_b_cell(int cell, const Vec2& x, double t) const {
    check_t(t);
    const auto& comps = b_.at(std::size_t(cell));
    Vec2 v{comps[0].eval(x.x, x.y, t), 0.0};
    if (dim() == 2) v.y = comps[1].eval(x.x, x.y, t);
    return v;
}

Vec2 PiecewiseField::eval_B(const Vec2& x, double t) const {
    const int cell = dom_->locate(x);
    if (cell < 0) throw std::domain_error("field: point outside the domain");
    return eval_B_cell(cell, x, t);
}

Vec2 PiecewiseField::eval_B_cell(int cell, const Vec2& x, double t) const {
    check_t(t);
    const auto& comps = B_.at(std::size_t(cell));
    Vec2 v{comps[0].eval(x.x, x.y, t), 0.0};
    if (dim() == 2) v.y = comps[1].eval(x.x, x.y, t);
    return v;
}

HybridMeasure PiecewiseField::div_b(double t) const {
    check_t(t);
    HybridMeasure m(dom_);
    for (std::size_t c = 0; c < divb_cell_.size(); ++c) {
        if (divb_cell_[c].is_zero()) continue;
        const Poly p = divb_cell_[c];
        m.add_cell_density(c, [p, t](const Vec2& x) { return p.eval(x.x, x.y, t); });
    }
    for (std::size_t e = 0; e < jump_edge_.size(); ++e) {
        if (jump_edge_[e].is_zero()) continue;
        const Poly p = jump_edge_[e];
        m.add_edge_density(e, [p, t](double s) { return p.eval(s, 0.0, t); });
    }
    return m;
}

HybridMeasure PiecewiseField::div_B(double t) const {
    check_t(t);
    HybridMeasure m(dom_);
    for (std::size_t c = 0; c < divB_cell_.size(); ++c) {
        if (divB_cell_[c].is_zero()) continue;
        const Poly p = divB_cell_[c];
        m.add_cell_density(c, [p, t](const Vec2& x) { return p.eval(x.x, x.y, t); });
    }
    for (std::size_t e = 0; e < jumpB_edge_.size(); ++e) {
        if (jumpB_edge_[e].is_zero()) continue;
        const Poly p = jumpB_edge_[e];
        m.add_edge_density(e, [p, t](double s) { return p.eval(s, 0.0, t); });
    }
    return m;
}

double PiecewiseField::div_density_cell(int cell, const Vec2& x, double t) const {
    return divb_cell_.at(std::size_t(cell)).eval(x.x, x.y, t);
}

double PiecewiseField::jump_density_edge(int edge, double s, double t) const {
    return jump_edge_.at(std::size_t(edge)).eval(s, 0.0, t);
}

double PiecewiseField::divB_density_cell(int cell, const Vec2& x, double t) const {
    return divB_cell_.at(std::size_t(cell)).eval(x.x, x.y, t);
}

double PiecewiseField::jumpB_density_edge(int edge, double s, double t) const {
    return jumpB_edge_.at(std::size_t(edge)).eval(s, 0.0, t);
}

double PiecewiseField::sigma_cell_density(int cell, const Vec2& x) const {
    return poly1_max_abs(coeffs_in_t(divb_cell_.at(std::size_t(cell)), x.x, x.y), -T_, T_);
}

double PiecewiseField::sigma_edge_density(int edge, double s) const {
    return poly1_max_abs(coeffs_in_t(jump_edge_.at(std::size_t(edge)), s, 0.0), -T_, T_);
}

double PiecewiseField::f_cell(int cell, const Vec2& x, double t) const {
    check_t(t);
    const double den = sigma_cell_density(cell, x);
    if (den <= kSigmaFloor) return 0.0;
    return div_density_cell(cell, x, t) / den;
}

double PiecewiseField::f_edge(int edge, double s, double t) const {
    check_t(t);
    const double den = sigma_edge_density(edge, s);
    if (den <= kSigmaFloor) return 0.0;
    return jump_density_edge(edge, s, t) / den;
}

double PiecewiseField::F_cell(int cell, const Vec2& x, double t) const {
    check_t(t);
    const double den = sigma_cell_density(cell, x);
    if (den <= kSigmaFloor) return 0.0;
    return divB_density_cell(cell, x, t) / den;
}

double PiecewiseField::F_edge(int edge, double s, double t) const {
    check_t(t);
    const double den = sigma_edge_density(edge, s);
    if (den <= kSigmaFloor) return 0.0;
    return jumpB_density_edge(edge, s, t) / den;
}

double PiecewiseField::f_at(const Vec2& x, double t) const {
    const auto& skel = dom_->skeleton();
    for (std::size_t e = 0; e < skel.size(); ++e)
        if (skel[e].contains_point(x)) return f_edge(int(e), skel[e].project(x), t);
    const int cell = dom_->locate(x);
    if (cell < 0) throw std::domain_error("f: point outside the domain");
    return f_cell(cell, x, t);
}

double PiecewiseField::F_at(const Vec2& x, double t) const {
    const auto& skel = dom_->skeleton();
    for (std::size_t e = 0; e < skel.size(); ++e)
        if (skel[e].contains_point(x)) return F_edge(int(e), skel[e].project(x), t);
    const int cell = dom_->locate(x);
    if (cell < 0) throw std::domain_error("F: point outside the domain");
    return F_cell(cell, x, t);
}

const Poly& PiecewiseField::b_edge_poly(int edge, bool plus, int k) const {
    return b_side_.at(std::size_t(edge))[plus ? 1 : 0].at(std::size_t(k));
}

const Poly& PiecewiseField::B_edge_poly(int edge, bool plus, int k) const {
    return B_side_.at(std::size_t(edge))[plus ? 1 : 0].at(std::size_t(k));
}

} // namespace dmpair
