#include "dmpair/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dmpair {
namespace oracle {

namespace {

double diameter(const quad::Panel2& p) {
    return std::max({(p.A - p.B).norm(), (p.B - p.C).norm(), (p.C - p.A).norm()});
}

std::vector<quad::Panel2> panels_for(const PolygonalDomain& dom, const TestFunction& phi,
                                     std::size_t budget) {
    const Polygon bbox = box_polygon(phi.bbox_lo(), phi.bbox_hi());
    std::vector<quad::Panel2> panels;
    for (const auto& cell : dom.cells_2d()) {
        const Polygon piece = clip_convex(cell, bbox);
        if (piece.v.size() < 3) continue;
        for (const auto& t : triangulate(piece)) panels.push_back({t[0], t[1], t[2]});
    }
    const double h_target = phi.radius() / 6.0;
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<quad::Panel2> next;
        next.reserve(panels.size());
        for (const auto& p : panels) {
            if (diameter(p) > h_target && next.size() + panels.size() < budget) {
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
        if (panels.size() >= budget) break;
    }
    return panels;
}

std::vector<quad::Panel2> refine_once(const std::vector<quad::Panel2>& panels) {
    std::vector<quad::Panel2> next;
    next.reserve(panels.size() * 4);
    for (const auto& p : panels) {
        const Vec2 ab = (p.A + p.B) * 0.5, bc = (p.B + p.C) * 0.5, ca = (p.C + p.A) * 0.5;
        next.push_back({p.A, ab, ca});
        next.push_back({ab, p.B, bc});
        next.push_back({ca, bc, p.C});
        next.push_back({ab, bc, ca});
    }
    return next;
}

std::vector<quad::Panel1> panels_1d_for(const PolygonalDomain& dom, const TestFunction& phi,
                                        std::size_t budget) {
    const double lo = phi.bbox_lo().x, hi = phi.bbox_hi().x;
    std::vector<double> cuts{lo, hi};
    for (const auto& e : dom.skeleton())
        if (e.p0.x > lo && e.p0.x < hi) cuts.push_back(e.p0.x);
    std::sort(cuts.begin(), cuts.end());
    std::vector<quad::Panel1> panels;
    const double total = hi - lo;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double len = cuts[i + 1] - cuts[i];
        if (len <= 0.0) continue;
        const auto n = std::max<std::size_t>(16, std::size_t(double(budget) * len / total));
        const auto sub = quad::split_uniform(cuts[i], cuts[i + 1], n);
        panels.insert(panels.end(), sub.begin(), sub.end());
    }
    return panels;
}

WeakDivergence weak_divergence_impl(const PolygonalDomain& dom,
                                    const std::function<Vec2(const Vec2&)>& v,
                                    const TestFunction& phi, const Options& opt, bool parallel) {
    WeakDivergence out;
    auto integrand2 = [&](const Vec2& x) { return -v(x).dot(phi.gradient(x)); };
    auto integrand1 = [&](double x) {
        return -v({x, 0.0}).x * phi.gradient({x, 0.0}).x;
    };
    if (dom.dim() == 1) {
        const auto coarse = panels_1d_for(dom, phi, opt.panels_1d / 2);
        const auto fine = panels_1d_for(dom, phi, opt.panels_1d);
        const double c = parallel ? quad::sweep_parallel(coarse, integrand1)
                                  : quad::sweep_serial(coarse, integrand1);
        const double f = parallel ? quad::sweep_parallel(fine, integrand1)
                                  : quad::sweep_serial(fine, integrand1);
        out.value = f;
        out.error_estimate = std::abs(f - c);
    } else {
        auto coarse = panels_for(dom, phi, opt.panel_budget_2d / 4);
        const double c = parallel ? quad::sweep_parallel(coarse, integrand2)
                                  : quad::sweep_serial(coarse, integrand2);
        std::vector<quad::Panel2> fine = coarse.size() * 4 <= opt.panel_budget_2d
                                             ? refine_once(coarse)
                                             : coarse;
        const double f = parallel ? quad::sweep_parallel(fine, integrand2)
                                  : quad::sweep_serial(fine, integrand2);
        out.value = f;
        out.error_estimate = std::abs(f - c);
    }
    out.converged = out.error_estimate <= opt.tol * std::max(1.0, std::abs(out.value));
    return out;
}

} // namespace

WeakDivergence weak_divergence(const PolygonalDomain& dom,
                               const std::function<Vec2(const Vec2&)>& v,
                               const TestFunction& phi, const Options& opt) {
    return weak_divergence_impl(dom, v, phi, opt, opt.parallel);
}

WeakDivergence weak_divergence_serial(const PolygonalDomain& dom,
                                      const std::function<Vec2(const Vec2&)>& v,
                                      const TestFunction& phi, Options opt) {
    return weak_divergence_impl(dom, v, phi, opt, false);
}

ConvergenceStudy study_from_values(const std::vector<double>& params,
                                   const std::vector<double>& values) {
    ConvergenceStudy st;
    st.params = params;
    st.values = values;
    const std::size_t n = values.size();
    if (n == 0) return st;
    st.extrapolated = values.back();
    if (n < 3) {
        st.order_reliable = false;
        return st;
    }
    const double scale = std::max(1.0, std::abs(values.back()));
    std::vector<double> d;
    for (std::size_t k = 0; k + 1 < n; ++k) d.push_back(values[k + 1] - values[k]);
    if (std::abs(d.back()) < 1e-13 * scale) {
        st.fitted_order = 0.0;
        return st;  // already converged to rounding level
    }
    // order estimate from consecutive difference ratios
    double psum = 0.0;
    int pcnt = 0;
    bool monotone = true;
    for (std::size_t k = 0; k + 1 < d.size(); ++k) {
        if (std::abs(d[k + 1]) >= std::abs(d[k]) || d[k + 1] * d[k] <= 0.0) monotone = false;
        if (std::abs(d[k + 1]) > 1e-14 * scale && std::abs(d[k]) > 1e-14 * scale) {
            const double hr = params[k] / params[k + 1];
            const double p = std::log(std::abs(d[k] / d[k + 1])) / std::log(hr);
            if (std::isfinite(p)) {
                psum += p;
                ++pcnt;
            }
        }
    }
    double p = pcnt > 0 ? psum / pcnt : 1.0;
    p = std::clamp(p, 0.25, 8.0);
    const double r = std::pow(params[n - 2] / params[n - 1], p);
    st.extrapolated = values[n - 1] + (values[n - 1] - values[n - 2]) / (r - 1.0);
    st.order_reliable = monotone;
    // least-squares order against the extrapolant
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double err = std::abs(values[k] - st.extrapolated);
        if (err < 1e-14 * scale) continue;
        const double lx = std::log(params[k]), ly = std::log(err);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    if (cnt >= 2) {
        const double denom = cnt * sxx - sx * sx;
        st.fitted_order = (cnt * sxy - sx * sy) / denom;
        double res = 0.0;
        const double icept = (sy - st.fitted_order * sx) / cnt;
        for (std::size_t k = 0; k < n; ++k) {
            const double err = std::abs(values[k] - st.extrapolated);
            if (err < 1e-14 * scale) continue;
            const double pred = icept + st.fitted_order * std::log(params[k]);
            res += (std::log(err) - pred) * (std::log(err) - pred);
        }
        st.fit_residual = std::sqrt(res / cnt);
    } else {
        st.fitted_order = p;
    }
    return st;
}

ConvergenceStudy convergence_study(const std::function<double(double)>& evaluator,
                                   const std::vector<double>& params) {
    std::vector<double> vals(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) vals[i] = evaluator(params[i]);
    return study_from_values(params, vals);
}

ConvergenceStudy one_sided_flux(const PolygonalDomain& dom,
                                const std::function<Vec2(const Vec2&)>& v, const Vec2& x,
                                const Vec2& nu, bool plus_side, double r0, double ratio,
                                int count) {
    const Vec2 n_side = plus_side ? nu : nu * -1.0;
    std::vector<double> radii, vals;
    for (int k = 0; k < count; ++k) {
        const double r = r0 * std::pow(ratio, k);
        radii.push_back(r);
        if (dom.dim() == 1) {
            const double a = n_side.x > 0 ? x.x : x.x - r;
            const double b = n_side.x > 0 ? x.x + r : x.x;
            const double avg =
                quad::integrate([&](double y) { return v({y, 0.0}).x * nu.x; }, a, b) / r;
            vals.push_back(avg);
        } else {
            const double alpha = std::atan2(n_side.y, n_side.x);
            const double integral = quad::integrate(
                [&](double th) {
                    return quad::integrate(
                        [&](double rr) {
                            const Vec2 y{x.x + rr * std::cos(th), x.y + rr * std::sin(th)};
                            return v(y).dot(nu) * rr;
                        },
                        0.0, r, quad::Options{1e-9, 20, 6, 64, 4096});
                },
                alpha - 0.5 * std::numbers::pi + 1e-12, alpha + 0.5 * std::numbers::pi - 1e-12,
                quad::Options{1e-9, 20, 6, 64, 4096});
            vals.push_back(integral / (0.5 * std::numbers::pi * r * r));
        }
    }
    return study_from_values(radii, vals);
}

} // namespace oracle
} // namespace dmpair
