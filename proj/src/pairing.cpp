#include "dmpair/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmpair/oracle.hpp"

namespace dmpair {

namespace {

void require_range(const PiecewiseField& field, const PiecewiseBV& u) {
    if (u.sup_norm() > field.t_max() + 1e-12)
        throw std::domain_error(
            "pairing: ‖u‖_∞ exceeds the field t range; rebuild the field with a larger t "
            "range");
}

// ½[F(x,u⁺)+F(x,u⁻)]σ. For the polynomial family the product with σ cancels
// the Radon–Nikodým quotient, so the densities are assembled directly from
// Div_x B(·,t): cellwise Div B(x, ũ(x)), edgewise ½[jumpB(s,u⁺)+jumpB(s,u⁻)].
HybridMeasure build_F_term(const PiecewiseField& field, const PiecewiseBV& u) {
    const auto dom = field.domain();
    HybridMeasure m(dom);
    const int dim = dom->dim();
    for (std::size_t c = 0; c < dom->cell_count(); ++c) {
        Poly divB;
        for (int k = 0; k < dim; ++k)
            divB = divB + (k == 0 ? field.b_poly(int(c), 0).dx() : field.b_poly(int(c), 1).dy());
        divB = divB.integral_t();
        if (divB.is_zero()) continue;
        const Poly upoly = u.cell_poly(int(c));
        const auto cantor = u.cantor();
        m.add_cell_density(c, [divB, upoly, cantor](const Vec2& x) {
            double uval = upoly.eval(x.x, x.y, 0.0);
            if (cantor)
                uval += cantor->coeff *
                        cantor_function((x.x - cantor->a) / (cantor->b - cantor->a));
            return divB.eval(x.x, x.y, uval);
        });
    }
    const auto& skel = dom->skeleton();
    for (std::size_t e = 0; e < skel.size(); ++e) {
        // jumpB(s,t) = (B⁺-B⁻)·ν restricted to the edge
        Poly jumpB;
        for (int k = 0; k < dim; ++k) {
            const double nu_k = k == 0 ? skel[e].nu.x : skel[e].nu.y;
            if (nu_k == 0.0) continue;
            jumpB = jumpB + (field.B_edge_poly(int(e), true, k) -
                             field.B_edge_poly(int(e), false, k))
                                .scaled(nu_k);
        }
        if (jumpB.is_zero()) continue;
        const auto& ed = u.edge_data(int(e));
        const double summand = u.cantor() ? u.cantor_summand(skel[e].p0.x) : 0.0;
        const Poly up = ed.u_plus, um = ed.u_minus;
        m.add_edge_density(e, [jumpB, up, um, summand](double s) {
            const double tp = up.eval(s, 0.0, 0.0) + summand;
            const double tm = um.eval(s, 0.0, 0.0) + summand;
            return 0.5 * (jumpB.eval(s, 0.0, tp) + jumpB.eval(s, 0.0, tm));
        });
    }
    return m;
}

} // namespace

PairingResult pairing_decomposition(const PiecewiseField& field, const PiecewiseBV& u) {
    require_range(field, u);
    const auto dom = field.domain();
    const int dim = dom->dim();

    HybridMeasure mu_ac(dom), mu_c(dom), mu_j(dom);

    // μ^ac = ⟨b(x,ũ(x)), ∇u(x)⟩ L^N
    for (std::size_t c = 0; c < dom->cell_count(); ++c) {
        std::vector<Poly> grads, bs;
        bool nontrivial = false;
        for (int k = 0; k < dim; ++k) {
            grads.push_back(u.grad_poly(int(c), k));
            bs.push_back(field.b_poly(int(c), k));
            nontrivial = nontrivial || (!grads.back().is_zero() && !bs.back().is_zero());
        }
        if (!nontrivial) continue;
        const Poly upoly = u.cell_poly(int(c));
        const auto cantor = u.cantor();
        mu_ac.add_cell_density(c, [grads, bs, upoly, cantor](const Vec2& x) {
            double uval = upoly.eval(x.x, x.y, 0.0);
            if (cantor)
                uval += cantor->coeff *
                        cantor_function((x.x - cantor->a) / (cantor->b - cantor->a));
            double acc = 0.0;
            for (std::size_t k = 0; k < bs.size(); ++k)
                acc += bs[k].eval(x.x, x.y, uval) * grads[k].eval(x.x, x.y, 0.0);
            return acc;
        });
    }

    // μ^j = [β*(x,u⁺(x)) - β*(x,u⁻(x))] H^{N-1}⌐J_u
    const auto& skel = dom->skeleton();
    for (std::size_t e = 0; e < skel.size(); ++e) {
        const auto& ed = u.edge_data(int(e));
        if (!ed.in_jump_set) continue;
        Poly beta_star;  // ½(B⁺+B⁻)·ν on the edge, polynomial in (s,t)
        for (int k = 0; k < dim; ++k) {
            const double nu_k = k == 0 ? skel[e].nu.x : skel[e].nu.y;
            if (nu_k == 0.0) continue;
            beta_star = beta_star + (field.B_edge_poly(int(e), true, k) +
                                     field.B_edge_poly(int(e), false, k))
                                        .scaled(0.5 * nu_k);
        }
        const double summand = u.cantor() ? u.cantor_summand(skel[e].p0.x) : 0.0;
        const Poly up = ed.u_plus, um = ed.u_minus;
        mu_j.add_edge_density(e, [beta_star, up, um, summand](double s) {
            const double tp = up.eval(s, 0.0, 0.0) + summand;
            const double tm = um.eval(s, 0.0, 0.0) + summand;
            return beta_star.eval(s, 0.0, tp) - beta_star.eval(s, 0.0, tm);
        });
    }

    // μ^c = ⟨b̃(x,ũ(x)), D^c u⟩ (1D Cantor component)
    if (u.cantor() && dim == 1) {
        const auto& cd = *u.cantor();
        const int ccell = u.cantor_cell();
        const Poly bpoly = field.b_poly(ccell, 0);
        const Poly upoly = u.cell_poly(ccell);
        const double coeff = cd.coeff, ca = cd.a, cb = cd.b;
        CantorComponent comp;
        comp.coeff = coeff;
        comp.a = ca;
        comp.b = cb;
        comp.cell = ccell;
        comp.g = [bpoly, upoly, coeff, ca, cb](double x) {
            const double uval =
                upoly.eval(x, 0.0, 0.0) + coeff * cantor_function((x - ca) / (cb - ca));
            return bpoly.eval(x, 0.0, uval);
        };
        mu_c.add_cantor(comp);
    }

    PairingResult out{mu_ac,
                      mu_c,
                      mu_j,
                      mu_ac + mu_c + mu_j,
                      build_F_term(field, u),
                      HybridMeasure(dom),
                      field.sup_norm(),
                      u.sup_norm()};
    out.composite_div = out.F_term + out.mu_total;
    return out;
}

double pairing_by_definition(const PiecewiseField& field, const PiecewiseBV& u,
                             const TestFunction& phi, const quad::Options& opt) {
    require_range(field, u);
    const auto dom = field.domain();
    if (!phi.supported_inside(*dom))
        throw std::domain_error("pairing: test function not compactly supported");
    const HybridMeasure F_term = build_F_term(field, u);
    const double term_sigma = F_term.apply(phi, opt);

    // ∫ B(x,u(x))·∇φ dx, cell by cell
    const Vec2 lo = phi.bbox_lo(), hi = phi.bbox_hi();
    std::vector<double> parts;
    for (std::size_t c = 0; c < dom->cell_count(); ++c) {
        auto integrand = [&](const Vec2& x) {
            const double uval = u.value_cell(int(c), x);
            return field.eval_B_cell(int(c), x, uval).dot(phi.gradient(x));
        };
        if (dom->dim() == 1) {
            const auto& iv = dom->cells_1d()[c];
            const double a = std::max(iv.a, lo.x), b = std::min(iv.b, hi.x);
            if (b <= a) continue;
            parts.push_back(
                quad::integrate([&](double x) { return integrand({x, 0.0}); }, a, b, opt));
        } else {
            const Polygon piece = clip_convex(dom->cells_2d()[c], box_polygon(lo, hi));
            if (piece.v.size() < 3) continue;
            parts.push_back(quad::integrate_polygon(integrand, piece, opt));
        }
    }
    return -term_sigma - par::pairwise_sum(parts);
}

HybridMeasure composite_divergence(const PiecewiseField& field, const PiecewiseBV& u) {
    return pairing_decomposition(field, u).composite_div;
}

std::function<Vec2(const Vec2&)> composite_field(const PiecewiseField& field,
                                                 const PiecewiseBV& u) {
    require_range(field, u);
    const PiecewiseField f = field;
    const PiecewiseBV uu = u;
    return [f, uu](const Vec2& x) {
        const int cell = f.domain()->locate(x);
        if (cell < 0) return Vec2{0.0, 0.0};
        return f.eval_B_cell(cell, x, uu.value_cell(cell, x));
    };
}

HybridMeasure anzellotti_pairing(const PiecewiseField& field, const PiecewiseBV& u) {
    for (std::size_t c = 0; c < field.domain()->cell_count(); ++c)
        for (int k = 0; k < field.dim(); ++k)
            if (field.b_poly(int(c), k).degree_t() != 0)
                throw std::domain_error("anzellotti pairing: the field must be t-independent");
    return pairing_decomposition(field, u).mu_total;
}

double anzellotti_by_definition(const PiecewiseField& field, const PiecewiseBV& u,
                                const TestFunction& phi, const quad::Options& opt) {
    const auto dom = field.domain();
    if (!phi.supported_inside(*dom))
        throw std::domain_error("pairing: test function not compactly supported");
    const HybridMeasure divA = field.div_b(0.0);
    const double term1 = divA.integrate_against(
        [&](int cell, const Vec2& x) { return u.value_cell(cell, x) * phi.value(x); },
        [&](int edge, double s) {
            const Vec2 p = dom->skeleton()[std::size_t(edge)].point_at(s);
            const double ustar = 0.5 * (u.plus_value(edge, s) + u.minus_value(edge, s));
            return ustar * phi.value(p);
        },
        [&](double x) { return u.value({x, 0.0}) * phi.value({x, 0.0}); }, opt);

    const Vec2 lo = phi.bbox_lo(), hi = phi.bbox_hi();
    std::vector<double> parts;
    for (std::size_t c = 0; c < dom->cell_count(); ++c) {
        auto integrand = [&](const Vec2& x) {
            return u.value_cell(int(c), x) *
                   field.eval_b_cell(int(c), x, 0.0).dot(phi.gradient(x));
        };
        if (dom->dim() == 1) {
            const auto& iv = dom->cells_1d()[c];
            const double a = std::max(iv.a, lo.x), b = std::min(iv.b, hi.x);
            if (b <= a) continue;
            parts.push_back(
                quad::integrate([&](double x) { return integrand({x, 0.0}); }, a, b, opt));
        } else {
            const Polygon piece = clip_convex(dom->cells_2d()[c], box_polygon(lo, hi));
            if (piece.v.size() < 3) continue;
            parts.push_back(quad::integrate_polygon(integrand, piece, opt));
        }
    }
    return -term1 - par::pairwise_sum(parts);
}

// ---- mollified route -------------------------------------------------------

namespace {

struct PanelNode {
    Vec2 x;
    double w;
};

double dist_to_skeleton(const PolygonalDomain& dom, const Vec2& x) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& e : dom.skeleton()) {
        if (dom.dim() == 1) {
            d = std::min(d, std::abs(x.x - e.p0.x));
        } else {
            const double len = (e.p1 - e.p0).norm();
            const double s = std::clamp(e.project(x), 0.0, len);
            d = std::min(d, (x - e.point_at(s)).norm());
        }
    }
    return d;
}

// Non-adaptive mollified sample with shared nodes: value and gradient in one
// pass over ball-clipped cell pieces refined to the kernel scale.
Mollifier::SmoothedValue fixed_mollify_2d(const Mollifier& moll, const PiecewiseBV& u,
                                          double eps, const Vec2& x) {
    Mollifier::SmoothedValue out;
    const auto& dom = *u.domain();
    const Polygon ballbox = box_polygon({x.x - eps, x.y - eps}, {x.x + eps, x.y + eps});
    for (std::size_t c = 0; c < dom.cells_2d().size(); ++c) {
        const Polygon piece = clip_convex(dom.cells_2d()[c], ballbox);
        if (piece.v.size() < 3) continue;
        std::vector<quad::Panel2> tris;
        for (const auto& t : triangulate(piece)) tris.push_back({t[0], t[1], t[2]});
        // refine to sub-kernel size
        bool grew = true;
        while (grew) {
            grew = false;
            std::vector<quad::Panel2> next;
            for (const auto& p : tris) {
                const double diam = std::max(
                    {(p.A - p.B).norm(), (p.B - p.C).norm(), (p.C - p.A).norm()});
                if (diam > 0.9 * eps) {
                    const Vec2 ab = (p.A + p.B) * 0.5, bc = (p.B + p.C) * 0.5,
                               ca = (p.C + p.A) * 0.5;
                    next.push_back({p.A, ab, ca});
                    next.push_back({ab, p.B, bc});
                    next.push_back({ca, bc, p.C});
                    next.push_back({ab, bc, ca});
                    grew = true;
                } else {
                    next.push_back(p);
                }
            }
            tris = std::move(next);
        }
        constexpr double kGx[8] = {-0.9602898564975363, -0.7966664774136267,
                                   -0.5255324099163290, -0.1834346424956498,
                                   0.1834346424956498,  0.5255324099163290,
                                   0.7966664774136267,  0.9602898564975363};
        constexpr double kGw[8] = {0.1012285362903763, 0.2223810344533745,
                                   0.3137066458778873, 0.3626837833783620,
                                   0.3626837833783620, 0.3137066458778873,
                                   0.2223810344533745, 0.1012285362903763};
        for (const auto& p : tris) {
            const double area2 = std::abs((p.B - p.A).cross(p.C - p.A));
            if (area2 <= 0.0) continue;
            for (int i = 0; i < 8; ++i) {
                const double uu = 0.5 * (kGx[i] + 1.0);
                for (int j = 0; j < 8; ++j) {
                    const double vv = 0.5 * (kGx[j] + 1.0);
                    const Vec2 y = p.A * (1.0 - uu) + p.B * (uu * (1.0 - vv)) +
                                   p.C * (uu * vv);
                    const double w = 0.25 * kGw[i] * kGw[j] * uu * area2;
                    const Vec2 z = x - y;
                    const double rho = moll.rho(z, eps);
                    const Vec2 gr = moll.rho_grad(z, eps);
                    if (rho == 0.0 && gr.x == 0.0 && gr.y == 0.0) continue;
                    const double uval = u.value_cell(int(c), y);
                    out.value += w * rho * uval;
                    out.grad.x += w * gr.x * uval;
                    out.grad.y += w * gr.y * uval;
                }
            }
        }
    }
    return out;
}

} // namespace

MollifiedPairing::MollifiedPairing(const PiecewiseField& field, const PiecewiseBV& u,
                                   std::vector<double> eps_sequence, const quad::Options& opt)
    : field_(&field), u_(&u), eps_(std::move(eps_sequence)) {
    require_range(field, u);
    std::sort(eps_.begin(), eps_.end(), std::greater<double>());
    for (double e : eps_) {
        if (e <= 0.0) throw std::domain_error("mollified pairing: ε must be positive");
        const auto& dom = *field.domain();
        const double margin =
            dom.dim() == 1 ? dom.hi().x - dom.lo().x
                           : std::min(dom.hi().x - dom.lo().x, dom.hi().y - dom.lo().y);
        if (e >= 0.25 * margin)
            throw std::domain_error("mollified pairing: ε too large for the domain");
    }
    build(opt);
}

void MollifiedPairing::build(const quad::Options& opt) {
    const auto& dom = *field_->domain();
    const Mollifier moll(dom.dim());
    tables_.resize(eps_.size());

    for (std::size_t ei = 0; ei < eps_.size(); ++ei) {
        const double eps = eps_[ei];
        // Interior region where the ball stays inside the domain.
        const double x0 = dom.lo().x + eps * 1.0000001, x1 = dom.hi().x - eps * 1.0000001;
        const double y0 = dom.lo().y + eps * 1.0000001, y1 = dom.hi().y - eps * 1.0000001;

        std::vector<PanelNode> nodes;
        constexpr double kGx[8] = {-0.9602898564975363, -0.7966664774136267,
                                   -0.5255324099163290, -0.1834346424956498,
                                   0.1834346424956498,  0.5255324099163290,
                                   0.7966664774136267,  0.9602898564975363};
        constexpr double kGw[8] = {0.1012285362903763, 0.2223810344533745,
                                   0.3137066458778873, 0.3626837833783620,
                                   0.3626837833783620, 0.3137066458778873,
                                   0.2223810344533745, 0.1012285362903763};
        if (dom.dim() == 1) {
            // panels refined near the skeleton and the Cantor support
            std::vector<double> cuts{x0, x1};
            for (const auto& e : dom.skeleton()) {
                for (double off : {-eps, 0.0, eps}) {
                    const double c = e.p0.x + off;
                    if (c > x0 && c < x1) cuts.push_back(c);
                }
            }
            if (u_->cantor()) {
                for (double c : {u_->cantor()->a - eps, u_->cantor()->a, u_->cantor()->b,
                                 u_->cantor()->b + eps})
                    if (c > x0 && c < x1) cuts.push_back(c);
            }
            std::sort(cuts.begin(), cuts.end());
            auto near_feature = [&](double a, double b) {
                const double m = 0.5 * (a + b);
                if (dist_to_skeleton(dom, {m, 0.0}) <= eps + (b - a)) return true;
                if (u_->cantor() && m + eps + (b - a) > u_->cantor()->a &&
                    m - eps - (b - a) < u_->cantor()->b)
                    return true;
                return false;
            };
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                const double a = cuts[i], b = cuts[i + 1];
                if (b - a < 1e-14) continue;
                const double h_far = (x1 - x0) / 64.0;
                const double h = near_feature(a, b) ? eps / 4.0 : h_far;
                const auto n = std::max<std::size_t>(1, std::size_t(std::ceil((b - a) / h)));
                for (std::size_t k = 0; k < n; ++k) {
                    const double pa = a + (b - a) * double(k) / double(n);
                    const double pb = a + (b - a) * double(k + 1) / double(n);
                    const double hm = 0.5 * (pb - pa), mm = 0.5 * (pa + pb);
                    for (int g = 0; g < 8; ++g)
                        nodes.push_back({{mm + hm * kGx[g], 0.0}, hm * kGw[g]});
                }
            }
        } else {
            const Polygon inner = box_polygon({x0, y0}, {x1, y1});
            std::vector<quad::Panel2> panels;
            for (const auto& cell : dom.cells_2d()) {
                const Polygon piece = clip_convex(cell, inner);
                if (piece.v.size() < 3) continue;
                for (const auto& t : triangulate(piece)) panels.push_back({t[0], t[1], t[2]});
            }
            const double h_far =
                std::max((dom.hi() - dom.lo()).norm() / 96.0, eps / 2.0);
            bool grew = true;
            while (grew && panels.size() < 400000) {
                grew = false;
                std::vector<quad::Panel2> next;
                for (const auto& p : panels) {
                    const double diam = std::max(
                        {(p.A - p.B).norm(), (p.B - p.C).norm(), (p.C - p.A).norm()});
                    const Vec2 cen = (p.A + p.B + p.C) * (1.0 / 3.0);
                    const bool tube = dist_to_skeleton(dom, cen) <= eps + diam;
                    const double h = tube ? 0.75 * eps : h_far;
                    if (diam > h) {
                        const Vec2 ab = (p.A + p.B) * 0.5, bc = (p.B + p.C) * 0.5,
                                   ca = (p.C + p.A) * 0.5;
                        next.push_back({p.A, ab, ca});
                        next.push_back({ab, p.B, bc});
                        next.push_back({ca, bc, p.C});
                        next.push_back({ab, bc, ca});
                        grew = true;
                    } else {
                        next.push_back(p);
                    }
                }
                panels = std::move(next);
            }
            for (const auto& p : panels) {
                const double area2 = std::abs((p.B - p.A).cross(p.C - p.A));
                if (area2 <= 0.0) continue;
                for (int i = 0; i < 8; ++i) {
                    const double uu = 0.5 * (kGx[i] + 1.0);
                    for (int j = 0; j < 8; ++j) {
                        const double vv = 0.5 * (kGx[j] + 1.0);
                        const Vec2 y = p.A * (1.0 - uu) + p.B * (uu * (1.0 - vv)) +
                                       p.C * (uu * vv);
                        nodes.push_back({y, 0.25 * kGw[i] * kGw[j] * uu * area2});
                    }
                }
            }
        }

        // precompute per-cell smoothed polynomials for the clear-ball path
        std::vector<Poly> smoothed(dom.cell_count());
        for (std::size_t c = 0; c < dom.cell_count(); ++c)
            smoothed[c] = moll.smooth_poly(u_->cell_poly(int(c)), eps);

        auto& table = tables_[ei];
        table.resize(nodes.size());
        quad::Options inner = opt;
        inner.tol = std::max(opt.tol, 1e-8);
        par::for_index(nodes.size(), [&](std::size_t i) {
            const Vec2 x = nodes[i].x;
            Mollifier::SmoothedValue sv;
            if (moll.ball_is_clear(dom, x, eps, u_)) {
                const int cell = dom.locate(x);
                const Poly& sp = smoothed[std::size_t(cell)];
                sv.value = sp.eval(x.x, x.y, 0.0);
                sv.grad = {sp.dx().eval(x.x, x.y, 0.0),
                           dom.dim() == 2 ? sp.dy().eval(x.x, x.y, 0.0) : 0.0};
            } else if (dom.dim() == 2) {
                sv = fixed_mollify_2d(moll, *u_, eps, x);
            } else {
                sv = moll.mollify_scalar_with_grad(*u_, eps, x, inner);
            }
            const Vec2 b = field_->eval_b(x, std::clamp(sv.value, -field_->t_max(),
                                                        field_->t_max()));
            Node node;
            node.x = x;
            node.weight = nodes[i].w;
            node.integrand_vec = {b.x * sv.grad.x, b.y * sv.grad.y};
            table[i] = node;
        });
    }
}

MollifiedRoute MollifiedPairing::evaluate(const TestFunction& phi) const {
    const auto& dom = *field_->domain();
    const double eps_max = eps_.empty() ? 0.0 : eps_.front();
    const Vec2 lo = phi.bbox_lo(), hi = phi.bbox_hi();
    bool fits = lo.x >= dom.lo().x + eps_max && hi.x <= dom.hi().x - eps_max;
    if (dom.dim() == 2)
        fits = fits && lo.y >= dom.lo().y + eps_max && hi.y <= dom.hi().y - eps_max;
    if (!fits)
        throw std::domain_error(
            "mollified pairing: ε too large for the test function support");
    MollifiedRoute out;
    out.eps = eps_;
    for (const auto& table : tables_) {
        std::vector<double> vals(table.size());
        par::for_index(table.size(), [&](std::size_t i) {
            const auto& n = table[i];
            const double p = phi.value(n.x);
            vals[i] = p == 0.0 ? 0.0
                               : p * (n.integrand_vec.x + n.integrand_vec.y) * n.weight;
        });
        out.values.push_back(par::pairwise_sum(vals));
    }
    const auto study = oracle::study_from_values(eps_, out.values);
    out.extrapolated = study.extrapolated;
    out.fitted_order = study.fitted_order;
    return out;
}

MollifiedRoute pairing_by_mollification(const PiecewiseField& field, const PiecewiseBV& u,
                                        const TestFunction& phi,
                                        const std::vector<double>& eps_sequence,
                                        const quad::Options& opt) {
    if (!phi.supported_inside(*field.domain()))
        throw std::domain_error("pairing: test function not compactly supported");
    MollifiedPairing mp(field, u, eps_sequence, opt);
    return mp.evaluate(phi);
}

} // namespace dmpair
