#include "dmpair/measure.hpp"

#include <cmath>
#include <stdexcept>

namespace dmpair {

DomainPtr make_domain_1d(double lo, double hi, const std::vector<Interval>& cells) {
    return std::make_shared<PolygonalDomain>(PolygonalDomain::make_1d(lo, hi, cells));
}

DomainPtr make_domain_2d(const Vec2& lo, const Vec2& hi, const std::vector<Polygon>& cells) {
    return std::make_shared<PolygonalDomain>(PolygonalDomain::make_2d(lo, hi, cells));
}

double cantor_function(double y) {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    double val = 0.0, p = 1.0;
    for (int i = 0; i < 56 && y > 0.0; ++i) {
        y *= 3.0;
        p *= 0.5;
        const double d = std::floor(y);
        y -= d;
        if (d == 1.0) return val + p;
        if (d >= 2.0) val += p;
    }
    return val;
}

namespace {

double cantor_rec(const std::function<double(double)>& phi, double a, double b, double mass,
                  double r0, double r1, double tol, int depth) {
    if (b <= r0 || a >= r1) return 0.0;
    const double mid = 0.5 * (a + b);
    const bool full = (a >= r0 && b <= r1);
    if (full) {
        const double f0 = phi(a), f1 = phi(mid), f2 = phi(b);
        // The branch measure is symmetric about the midpoint, so
        // m (f0 + 2 f1 + f2)/4 carries the variance correction and its
        // residual is fourth order in the branch length; the second
        // difference is the error driver.
        const double second = std::abs(f0 - 2.0 * f1 + f2);
        if (second <= 0.25 * std::sqrt(tol) || depth >= 48)
            return mass * 0.25 * (f0 + 2.0 * f1 + f2);
    } else if (depth >= 64) {
        return (mid > r0 && mid < r1) ? mass * phi(mid) : 0.0;
    }
    const double third = (b - a) / 3.0;
    return cantor_rec(phi, a, a + third, 0.5 * mass, r0, r1, tol, depth + 1) +
           cantor_rec(phi, b - third, b, 0.5 * mass, r0, r1, tol, depth + 1);
}

} // namespace

double cantor_integral(const std::function<double(double)>& phi, double r0, double r1,
                       double tol) {
    return cantor_rec(phi, 0.0, 1.0, 1.0, r0, r1, tol, 0);
}

TestFunction::TestFunction(Vec2 center, double radius, Poly prefactor, int dim)
    : center_(center), radius_(radius), pre_(std::move(prefactor)), dim_(dim) {
    if (radius_ <= 0.0) throw std::invalid_argument("test function radius must be positive");
}

TestFunction TestFunction::bump(const Vec2& c, double r, int dim, double amplitude) {
    return TestFunction(c, r, Poly(amplitude), dim);
}

TestFunction TestFunction::plateau(const Vec2& c, double r, int dim) {
    // p = e (1 + s + 3/2 s^2 + 13/6 s^3) cancels exp(-1/(1-s)) up to O(s^4).
    Poly dx = Poly::var_x() - Poly(c.x);
    Poly s = dx * dx;
    if (dim == 2) {
        Poly dy = Poly::var_y() - Poly(c.y);
        s = s + dy * dy;
    }
    s = s.scaled(1.0 / (r * r));
    const Poly s2 = s * s;
    const Poly p = Poly(1.0) + s + s2.scaled(1.5) + (s2 * s).scaled(13.0 / 6.0);
    return TestFunction(c, r, p.scaled(std::exp(1.0)), dim);
}

namespace {
inline double bump_profile(double s) {
    if (s >= 1.0) return 0.0;
    const double inv = 1.0 / (1.0 - s);
    if (inv > 700.0) return 0.0;
    return std::exp(-inv);
}
} // namespace

double TestFunction::value(const Vec2& x) const {
    const Vec2 d = x - center_;
    const double s = (dim_ == 1 ? d.x * d.x : d.dot(d)) / (radius_ * radius_);
    const double w = bump_profile(s);
    if (w == 0.0) return 0.0;
    return pre_.eval(x.x, x.y, 0.0) * w;
}

Vec2 TestFunction::gradient(const Vec2& x) const {
    const Vec2 d = x - center_;
    const double s = (dim_ == 1 ? d.x * d.x : d.dot(d)) / (radius_ * radius_);
    const double w = bump_profile(s);
    if (w == 0.0) return {0.0, 0.0};
    const double p = pre_.eval(x.x, x.y, 0.0);
    const double winv = 1.0 / (1.0 - s);
    const double dw_ds = -w * winv * winv;
    const double fac = dw_ds * 2.0 / (radius_ * radius_);
    Vec2 g{pre_.dx().eval(x.x, x.y, 0.0) * w + p * fac * d.x, 0.0};
    if (dim_ == 2) g.y = pre_.dy().eval(x.x, x.y, 0.0) * w + p * fac * d.y;
    return g;
}

Vec2 TestFunction::bbox_lo() const {
    return {center_.x - radius_, dim_ == 1 ? 0.0 : center_.y - radius_};
}

Vec2 TestFunction::bbox_hi() const {
    return {center_.x + radius_, dim_ == 1 ? 0.0 : center_.y + radius_};
}

bool TestFunction::supported_inside(const PolygonalDomain& dom) const {
    const Vec2 lo = bbox_lo(), hi = bbox_hi();
    if (dim_ != dom.dim()) return false;
    if (lo.x <= dom.lo().x || hi.x >= dom.hi().x) return false;
    if (dim_ == 2 && (lo.y <= dom.lo().y || hi.y >= dom.hi().y)) return false;
    return true;
}

double TestFunction::sup_norm() const {
    double m = 0.0;
    const int n = 65;
    for (int i = 0; i <= n; ++i) {
        const double x = center_.x + radius_ * (2.0 * i / n - 1.0);
        if (dim_ == 1) {
            m = std::max(m, std::abs(value({x, 0.0})));
        } else {
            for (int j = 0; j <= n; ++j) {
                const double y = center_.y + radius_ * (2.0 * j / n - 1.0);
                m = std::max(m, std::abs(value({x, y})));
            }
        }
    }
    return m;
}

double TestFunction::grad_sup_norm() const {
    double m = 0.0;
    const int n = 65;
    for (int i = 0; i <= n; ++i) {
        const double x = center_.x + radius_ * (2.0 * i / n - 1.0);
        if (dim_ == 1) {
            m = std::max(m, gradient({x, 0.0}).norm());
        } else {
            for (int j = 0; j <= n; ++j) {
                const double y = center_.y + radius_ * (2.0 * j / n - 1.0);
                m = std::max(m, gradient({x, y}).norm());
            }
        }
    }
    return m;
}

HybridMeasure::HybridMeasure(DomainPtr dom) : dom_(std::move(dom)) {
    cell_.resize(dom_->cell_count());
    edge_.resize(dom_->skeleton().size());
}

void HybridMeasure::add_cell_density(std::size_t cell, std::function<double(const Vec2&)> rho) {
    auto& slot = cell_.at(cell);
    if (!slot) {
        slot = std::move(rho);
    } else {
        auto prev = slot;
        auto next = std::move(rho);
        slot = [prev, next](const Vec2& x) { return prev(x) + next(x); };
    }
}

void HybridMeasure::add_edge_density(std::size_t edge, std::function<double(double)> rho) {
    auto& slot = edge_.at(edge);
    if (!slot) {
        slot = std::move(rho);
    } else {
        auto prev = slot;
        auto next = std::move(rho);
        slot = [prev, next](double s) { return prev(s) + next(s); };
    }
}

void HybridMeasure::add_cantor(const CantorComponent& c) {
    if (c.coeff == 0.0) return;
    if (!cantor_) {
        cantor_ = c;
        if (!cantor_->g) cantor_->g = [](double) { return 1.0; };
        return;
    }
    if (std::abs(cantor_->a - c.a) > kGeomTol || std::abs(cantor_->b - c.b) > kGeomTol)
        throw std::invalid_argument("only one Cantor placement per measure is supported");
    auto g1 = cantor_->g;
    auto g2 = c.g ? c.g : std::function<double(double)>([](double) { return 1.0; });
    const double c1 = cantor_->coeff, c2 = c.coeff;
    cantor_->g = [g1, g2, c1, c2](double x) { return g1(x) + (c2 / c1) * g2(x); };
}

double HybridMeasure::cell_density(std::size_t cell, const Vec2& x) const {
    const auto& f = cell_.at(cell);
    return f ? f(x) : 0.0;
}

double HybridMeasure::edge_density(std::size_t edge, double s) const {
    const auto& f = edge_.at(edge);
    return f ? f(s) : 0.0;
}

HybridMeasure HybridMeasure::operator+(const HybridMeasure& o) const {
    if (dom_ != o.dom_) throw std::invalid_argument("measure sum: domains differ");
    HybridMeasure r = *this;
    for (std::size_t i = 0; i < o.cell_.size(); ++i)
        if (o.cell_[i]) r.add_cell_density(i, o.cell_[i]);
    for (std::size_t i = 0; i < o.edge_.size(); ++i)
        if (o.edge_[i]) r.add_edge_density(i, o.edge_[i]);
    if (o.cantor_) r.add_cantor(*o.cantor_);
    return r;
}

HybridMeasure HybridMeasure::scaled(double a) const {
    HybridMeasure r(dom_);
    for (std::size_t i = 0; i < cell_.size(); ++i)
        if (cell_[i]) {
            auto f = cell_[i];
            r.cell_[i] = [f, a](const Vec2& x) { return a * f(x); };
        }
    for (std::size_t i = 0; i < edge_.size(); ++i)
        if (edge_[i]) {
            auto f = edge_[i];
            r.edge_[i] = [f, a](double s) { return a * f(s); };
        }
    if (cantor_) {
        CantorComponent c = *cantor_;
        c.coeff *= a;
        if (c.coeff != 0.0) r.cantor_ = c;
    }
    return r;
}

bool HybridMeasure::empty() const {
    for (const auto& f : cell_)
        if (f) return false;
    for (const auto& f : edge_)
        if (f) return false;
    return !cantor_;
}

double HybridMeasure::integrate_against(
    const std::function<double(int cell, const Vec2&)>& on_cells,
    const std::function<double(int edge, double s)>& on_edges,
    const std::function<double(double x)>& on_cantor, const quad::Options& opt) const {
    std::vector<double> parts;
    const int dim = dom_->dim();
    for (std::size_t c = 0; c < cell_.size(); ++c) {
        if (!cell_[c] || !on_cells) continue;
        const auto& rho = cell_[c];
        if (dim == 1) {
            const auto& iv = dom_->cells_1d()[c];
            parts.push_back(quad::integrate(
                [&](double x) { return rho({x, 0.0}) * on_cells(int(c), {x, 0.0}); }, iv.a, iv.b,
                opt));
        } else {
            parts.push_back(quad::integrate_polygon(
                [&](const Vec2& x) { return rho(x) * on_cells(int(c), x); },
                dom_->cells_2d()[c], opt));
        }
    }
    for (std::size_t e = 0; e < edge_.size(); ++e) {
        if (!edge_[e] || !on_edges) continue;
        const auto& rho = edge_[e];
        const auto& ed = dom_->skeleton()[e];
        if (dim == 1) {
            parts.push_back(rho(0.0) * on_edges(int(e), 0.0));
        } else {
            parts.push_back(quad::integrate_segment(
                [&](double s) { return rho(s) * on_edges(int(e), s); }, ed.p0, ed.p1, opt));
        }
    }
    if (cantor_ && on_cantor) {
        const auto& cc = *cantor_;
        const double len = cc.b - cc.a;
        parts.push_back(cc.coeff * cantor_integral(
                            [&](double u) {
                                const double x = cc.a + len * u;
                                return cc.g(x) * on_cantor(x);
                            },
                            0.0, 1.0, opt.tol));
    }
    return par::pairwise_sum(parts);
}

double HybridMeasure::apply(const TestFunction& phi, const quad::Options& opt) const {
    if (!phi.supported_inside(*dom_))
        throw std::domain_error("apply: test function not compactly supported in the domain");
    const Vec2 lo = phi.bbox_lo(), hi = phi.bbox_hi();
    const int dim = dom_->dim();
    std::vector<double> parts;
    for (std::size_t c = 0; c < cell_.size(); ++c) {
        if (!cell_[c]) continue;
        const auto& rho = cell_[c];
        if (dim == 1) {
            const auto& iv = dom_->cells_1d()[c];
            const double a = std::max(iv.a, lo.x), b = std::min(iv.b, hi.x);
            if (b <= a) continue;
            parts.push_back(quad::integrate(
                [&](double x) { return rho({x, 0.0}) * phi.value({x, 0.0}); }, a, b, opt));
        } else {
            const Polygon clipped = clip_convex(dom_->cells_2d()[c], box_polygon(lo, hi));
            if (clipped.v.size() < 3) continue;
            parts.push_back(quad::integrate_polygon(
                [&](const Vec2& x) { return rho(x) * phi.value(x); }, clipped, opt));
        }
    }
    for (std::size_t e = 0; e < edge_.size(); ++e) {
        if (!edge_[e]) continue;
        const auto& rho = edge_[e];
        const auto& ed = dom_->skeleton()[e];
        if (dim == 1) {
            parts.push_back(rho(0.0) * phi.value(ed.p0));
        } else {
            parts.push_back(quad::integrate_segment(
                [&](double s) { return rho(s) * phi.value(ed.point_at(s)); }, ed.p0, ed.p1,
                opt));
        }
    }
    if (cantor_) {
        const auto& cc = *cantor_;
        const double len = cc.b - cc.a;
        parts.push_back(cc.coeff * cantor_integral(
                            [&](double u) {
                                const double x = cc.a + len * u;
                                return cc.g(x) * phi.value({x, 0.0});
                            },
                            0.0, 1.0, opt.tol));
    }
    return par::pairwise_sum(parts);
}

double HybridMeasure::eval_parts(const FinitePerimeterSet& E, BorelSelection sel, bool absolute,
                                 const std::function<double(const Vec2&)>* weight,
                                 const quad::Options& opt) const {
    if (!E.compactly_inside(*dom_))
        throw std::domain_error("measure evaluation: set not compactly contained in the domain");
    const int dim = dom_->dim();
    auto wrap = [absolute](double v) { return absolute ? std::abs(v) : v; };
    auto wgt = [weight](const Vec2& x) { return weight ? (*weight)(x) : 1.0; };
    std::vector<double> parts;

    if (dim == 1) {
        for (std::size_t c = 0; c < cell_.size(); ++c) {
            if (!cell_[c]) continue;
            const auto& rho = cell_[c];
            const auto& iv = dom_->cells_1d()[c];
            for (const auto& e : E.intervals()) {
                const double a = std::max(iv.a, e.a), b = std::min(iv.b, e.b);
                if (b <= a) continue;
                parts.push_back(quad::integrate(
                    [&](double x) { return wrap(rho({x, 0.0})) * wgt({x, 0.0}); }, a, b, opt));
            }
        }
        for (std::size_t e = 0; e < edge_.size(); ++e) {
            if (!edge_[e]) continue;
            const double x = dom_->skeleton()[e].p0.x;
            const auto cls = E.classify_point({x, 0.0});
            const bool in = cls.label == DensityLabel::E1 ||
                            (sel == BorelSelection::WithReducedBoundary &&
                             cls.label == DensityLabel::EssentialBoundary);
            if (in) parts.push_back(wrap(edge_[e](0.0)) * wgt({x, 0.0}));
        }
        if (cantor_) {
            const auto& cc = *cantor_;
            const double len = cc.b - cc.a;
            for (const auto& e : E.intervals()) {
                const double r0 = (e.a - cc.a) / len, r1 = (e.b - cc.a) / len;
                if (r1 <= 0.0 || r0 >= 1.0) continue;
                parts.push_back(cc.coeff *
                                cantor_integral(
                                    [&](double u) {
                                        const double xx = cc.a + len * u;
                                        const double g = cc.g(xx);
                                        return (absolute ? std::abs(g) : g) * wgt({xx, 0.0});
                                    },
                                    std::max(0.0, r0), std::min(1.0, r1), opt.tol));
                if (absolute && parts.back() < 0.0) parts.back() = -parts.back();
            }
        }
        return par::pairwise_sum(parts);
    }

    const Polygon& P = E.polygon();
    if (!P.is_convex())
        throw std::domain_error("measure evaluation: only convex polygons are supported");
    for (std::size_t c = 0; c < cell_.size(); ++c) {
        if (!cell_[c]) continue;
        const auto& rho = cell_[c];
        const Polygon piece = clip_convex(dom_->cells_2d()[c], P);
        if (piece.v.size() < 3) continue;
        parts.push_back(quad::integrate_polygon(
            [&](const Vec2& x) { return wrap(rho(x)) * wgt(x); }, piece, opt));
    }
    for (std::size_t e = 0; e < edge_.size(); ++e) {
        if (!edge_[e]) continue;
        const auto& ed = dom_->skeleton()[e];
        const auto& rho = edge_[e];
        for (const auto& sub : clip_segment_to_convex(ed.p0, ed.p1, P)) {
            const Vec2 mid = ed.point_at(0.5 * (sub.first + sub.second));
            const bool interior = P.contains(mid);
            const bool boundary = !interior && P.on_boundary(mid);
            const bool use = interior || (boundary && sel == BorelSelection::WithReducedBoundary);
            if (!use) continue;
            parts.push_back(quad::integrate(
                [&](double s) { return wrap(rho(s)) * wgt(ed.point_at(s)); }, sub.first,
                sub.second, opt));
        }
    }
    return par::pairwise_sum(parts);
}

double HybridMeasure::total_variation(const FinitePerimeterSet& E, BorelSelection sel,
                                      const quad::Options& opt) const {
    return eval_parts(E, sel, /*absolute=*/true, nullptr, opt);
}

double HybridMeasure::evaluate_on(const FinitePerimeterSet& E, BorelSelection sel,
                                  const quad::Options& opt) const {
    return eval_parts(E, sel, /*absolute=*/false, nullptr, opt);
}

double HybridMeasure::weighted_eval(const FinitePerimeterSet& E, BorelSelection sel,
                                    const std::function<double(const Vec2&)>& weight,
                                    const quad::Options& opt) const {
    return eval_parts(E, sel, /*absolute=*/false, &weight, opt);
}

HybridMeasure HybridMeasure::restrict_to(const std::vector<int>& cells,
                                         const std::vector<int>& edges) const {
    HybridMeasure r(dom_);
    for (int c : cells) {
        if (c < 0 || std::size_t(c) >= cell_.size())
            throw std::domain_error("restrict: cell index out of range");
        if (cell_[std::size_t(c)]) r.cell_[std::size_t(c)] = cell_[std::size_t(c)];
    }
    for (int e : edges) {
        if (e < 0 || std::size_t(e) >= edge_.size())
            throw std::domain_error("restrict: edge index out of range");
        if (edge_[std::size_t(e)]) r.edge_[std::size_t(e)] = edge_[std::size_t(e)];
    }
    if (cantor_) {
        for (int c : cells)
            if (c == cantor_->cell) r.cantor_ = cantor_;
    }
    return r;
}

} // namespace dmpair
