#include "dmpair/mollify.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dmpair {

namespace {

inline double bump(double s) {
    if (s >= 1.0) return 0.0;
    const double inv = 1.0 / (1.0 - s);
    if (inv > 700.0) return 0.0;
    return std::exp(-inv);
}

inline double bump_ds(double s) {
    if (s >= 1.0) return 0.0;
    const double inv = 1.0 / (1.0 - s);
    if (inv > 700.0) return 0.0;
    return -std::exp(-inv) * inv * inv;
}

long double binom(int n, int k) {
    long double r = 1.0L;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

Mollifier::Mollifier(int dim) : dim_(dim) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("mollifier: dim must be 1 or 2");
    quad::Options strict;
    strict.tol = 1e-13;
    const int kMaxMoment = 16;
    moments_.assign(kMaxMoment + 1, std::vector<double>(kMaxMoment + 1, 0.0));
    if (dim == 1) {
        const double mass =
            quad::integrate([](double z) { return bump(z * z); }, -1.0, 1.0, strict);
        cN_ = 1.0 / mass;
        for (int i = 0; i <= kMaxMoment; ++i) {
            if (i % 2 == 1) continue;
            moments_[std::size_t(i)][0] =
                cN_ * quad::integrate([i](double z) { return bump(z * z) * std::pow(z, i); },
                                      -1.0, 1.0, strict);
        }
    } else {
        const double mass =
            2.0 * std::numbers::pi *
            quad::integrate([](double r) { return bump(r * r) * r; }, 0.0, 1.0, strict);
        cN_ = 1.0 / mass;
        for (int i = 0; i <= kMaxMoment; ++i) {
            for (int j = 0; i + j <= kMaxMoment; ++j) {
                if (i % 2 == 1 || j % 2 == 1) continue;
                const double ang = quad::integrate(
                    [i, j](double th) {
                        return std::pow(std::cos(th), i) * std::pow(std::sin(th), j);
                    },
                    0.0, 2.0 * std::numbers::pi, strict);
                const double rad = quad::integrate(
                    [i, j](double r) { return bump(r * r) * std::pow(r, i + j + 1); }, 0.0, 1.0,
                    strict);
                moments_[std::size_t(i)][std::size_t(j)] = cN_ * ang * rad;
            }
        }
    }
}

double Mollifier::rho(const Vec2& z, double eps) const {
    const double s = (dim_ == 1 ? z.x * z.x : z.dot(z)) / (eps * eps);
    const double scale = dim_ == 1 ? 1.0 / eps : 1.0 / (eps * eps);
    return scale * cN_ * bump(s);
}

Vec2 Mollifier::rho_grad(const Vec2& z, double eps) const {
    const double e2 = eps * eps;
    const double s = (dim_ == 1 ? z.x * z.x : z.dot(z)) / e2;
    const double scale = dim_ == 1 ? 1.0 / eps : 1.0 / e2;
    const double d = scale * cN_ * bump_ds(s) * 2.0 / e2;
    return {d * z.x, dim_ == 1 ? 0.0 : d * z.y};
}

TestFunction Mollifier::kernel_at(const Vec2& x, double eps) const {
    const double scale = dim_ == 1 ? cN_ / eps : cN_ / (eps * eps);
    return TestFunction(x, eps, Poly(scale), dim_);
}

double Mollifier::moment(int i, int j) const {
    if (i < 0 || j < 0) return 0.0;
    if (std::size_t(i) >= moments_.size() || std::size_t(j) >= moments_.size())
        throw std::invalid_argument("mollifier: moment degree exceeds the cached table");
    return moments_[std::size_t(i)][std::size_t(j)];
}

Poly Mollifier::smooth_poly(const Poly& p, double eps) const {
    // (ρ_ε ∗ p)(x) = Σ_terms c ∫ ρ(z) (x1-εz1)^px (x2-εz2)^py dz
    Poly out;
    for (const auto& m : p.terms()) {
        for (int a = 0; a <= m.px; ++a) {
            for (int b = 0; b <= m.py; ++b) {
                const int i = m.px - a, j = m.py - b;
                const double mom = moment(i, j);
                if (mom == 0.0) continue;
                const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
                const double coeff = m.c * double(binom(m.px, a)) * double(binom(m.py, b)) *
                                     sign * std::pow(eps, i + j) * mom;
                out = out + Poly::monomial(a, b, m.pt, coeff);
            }
        }
    }
    return out;
}

void Mollifier::require_inside(const PolygonalDomain& dom, const Vec2& x, double eps) const {
    bool ok = x.x - eps > dom.lo().x && x.x + eps < dom.hi().x;
    if (dim_ == 2) ok = ok && x.y - eps > dom.lo().y && x.y + eps < dom.hi().y;
    if (!ok) throw std::domain_error("mollify: the ε-ball leaves the domain");
}

bool Mollifier::ball_is_clear(const PolygonalDomain& dom, const Vec2& x, double eps,
                              const PiecewiseBV* u) const {
    for (const auto& e : dom.skeleton()) {
        bool near;
        if (dim_ == 1) {
            near = std::abs(x.x - e.p0.x) <= eps;
        } else {
            const double len = (e.p1 - e.p0).norm();
            const double s = std::clamp(e.project(x), 0.0, len);
            near = (x - e.point_at(s)).norm() <= eps;
        }
        if (!near) continue;
        // an interface is harmless when u is the same polynomial on both
        // sides, so polynomial smoothing stays exact across it
        if (!u) return false;
        if (!u->cell_poly(e.cell_minus).same_terms(u->cell_poly(e.cell_plus), 0.0))
            return false;
    }
    if (u && u->cantor()) {
        const auto& c = *u->cantor();
        if (x.x + eps > c.a && x.x - eps < c.b) return false;
    }
    return true;
}

double Mollifier::convolve_cellwise(const PolygonalDomain& dom,
                                    const std::function<double(int, const Vec2&)>& g, double eps,
                                    const Vec2& x, int deriv, const quad::Options& opt) const {
    require_inside(dom, x, eps);
    auto weight = [&](const Vec2& y) {
        const Vec2 z = x - y;
        if (deriv == 0) return rho(z, eps);
        const Vec2 gr = rho_grad(z, eps);  // ∇_x ρ_ε(x-y) = (∇ρ_ε)(x-y)
        return deriv == 1 ? gr.x : gr.y;
    };
    std::vector<double> parts;
    if (dom.dim() == 1) {
        // split [x-ε, x+ε] at skeleton points (and the Cantor interval ends
        // arrive through g's own continuity; adaptivity handles them)
        std::vector<double> cuts{x.x - eps, x.x + eps};
        for (const auto& e : dom.skeleton())
            if (e.p0.x > cuts.front() && e.p0.x < cuts.back()) cuts.push_back(e.p0.x);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
            const int cell = dom.locate({mid, 0.0});
            if (cell < 0) continue;
            parts.push_back(quad::integrate(
                [&](double y) { return weight({y, 0.0}) * g(cell, {y, 0.0}); }, cuts[i],
                cuts[i + 1], opt));
        }
    } else {
        const Polygon ballbox =
            box_polygon({x.x - eps, x.y - eps}, {x.x + eps, x.y + eps});
        for (std::size_t c = 0; c < dom.cells_2d().size(); ++c) {
            const Polygon piece = clip_convex(dom.cells_2d()[c], ballbox);
            if (piece.v.size() < 3) continue;
            parts.push_back(quad::integrate_polygon(
                [&](const Vec2& y) { return weight(y) * g(int(c), y); }, piece, opt));
        }
    }
    return par::pairwise_sum(parts);
}

double Mollifier::mollify_scalar(const PiecewiseBV& u, double eps, const Vec2& x,
                                 const quad::Options& opt) const {
    return convolve_cellwise(
        *u.domain(), [&](int cell, const Vec2& y) { return u.value_cell(cell, y); }, eps, x, 0,
        opt);
}

Mollifier::SmoothedValue Mollifier::mollify_scalar_with_grad(const PiecewiseBV& u, double eps,
                                                             const Vec2& x,
                                                             const quad::Options& opt) const {
    SmoothedValue out;
    auto g = [&](int cell, const Vec2& y) { return u.value_cell(cell, y); };
    out.value = convolve_cellwise(*u.domain(), g, eps, x, 0, opt);
    out.grad.x = convolve_cellwise(*u.domain(), g, eps, x, 1, opt);
    out.grad.y = dim_ == 2 ? convolve_cellwise(*u.domain(), g, eps, x, 2, opt) : 0.0;
    return out;
}

Vec2 Mollifier::mollify_field(const PiecewiseField& f, double t, double eps, const Vec2& x,
                              const quad::Options& opt) const {
    f.check_t(t);
    Vec2 v;
    v.x = convolve_cellwise(
        *f.domain(), [&](int cell, const Vec2& y) { return f.eval_b_cell(cell, y, t).x; }, eps,
        x, 0, opt);
    if (dim_ == 2)
        v.y = convolve_cellwise(
            *f.domain(), [&](int cell, const Vec2& y) { return f.eval_b_cell(cell, y, t).y; },
            eps, x, 0, opt);
    return v;
}

Vec2 Mollifier::mollify_B(const PiecewiseField& f, double t, double eps, const Vec2& x,
                          const quad::Options& opt) const {
    f.check_t(t);
    Vec2 v;
    v.x = convolve_cellwise(
        *f.domain(), [&](int cell, const Vec2& y) { return f.eval_B_cell(cell, y, t).x; }, eps,
        x, 0, opt);
    if (dim_ == 2)
        v.y = convolve_cellwise(
            *f.domain(), [&](int cell, const Vec2& y) { return f.eval_B_cell(cell, y, t).y; },
            eps, x, 0, opt);
    return v;
}

} // namespace dmpair
