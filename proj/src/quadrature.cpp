#include "dmpair/quadrature.hpp"

#include <algorithm>
#include <queue>
#include <atomic>
#include <cmath>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dmpair {
namespace quad {

namespace {

// 8-point Gauss–Legendre rule on [-1,1].
constexpr double kGx[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr double kGw[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

double gl8(const Fn1& f, double a, double b) {
    const double h = 0.5 * (b - a), m = 0.5 * (a + b);
    double s = 0.0;
    for (int i = 0; i < 8; ++i) s += kGw[i] * f(m + h * kGx[i]);
    return h * s;
}

// Global adaptive refinement: a worst-first queue keeps fractal integrands
// (e.g. anything evaluating the Cantor function) from starving one subtree.
struct Seg {
    double a, b;
    double coarse;   // gl8 on [a,b]
    double fine;     // gl8 on the two halves
    double err;      // |fine - coarse|
    int depth;
};

struct SegWorse {
    bool operator()(const Seg& x, const Seg& y) const { return x.err < y.err; }
};

Seg make_seg(const Fn1& f, double a, double b, double coarse, int depth) {
    const double m = 0.5 * (a + b);
    Seg s{a, b, coarse, gl8(f, a, m) + gl8(f, m, b), 0.0, depth};
    s.err = std::abs(s.fine - s.coarse);
    return s;
}

double tri_gl(const Fn2& f, const Vec2& A, const Vec2& B, const Vec2& C) {
    // Duffy map T(u,v) = (1-u) A + u (1-v) B + u v C, |J| = 2 area u.
    const double area2 = std::abs((B - A).cross(C - A));
    double s = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double u = 0.5 * (kGx[i] + 1.0);
        double inner = 0.0;
        for (int j = 0; j < 8; ++j) {
            const double v = 0.5 * (kGx[j] + 1.0);
            const Vec2 p = A * (1.0 - u) + B * (u * (1.0 - v)) + C * (u * v);
            inner += kGw[j] * f(p);
        }
        s += kGw[i] * inner * u;
    }
    return 0.25 * s * area2;
}

double adapt_tri(const Fn2& f, const Vec2& A, const Vec2& B, const Vec2& C, double whole,
                 double tol, int depth, int max_depth, long* budget) {
    const Vec2 ab = (A + B) * 0.5, bc = (B + C) * 0.5, ca = (C + A) * 0.5;
    const double t0 = tri_gl(f, A, ab, ca);
    const double t1 = tri_gl(f, ab, B, bc);
    const double t2 = tri_gl(f, ca, bc, C);
    const double t3 = tri_gl(f, ab, bc, ca);
    const double split = t0 + t1 + t2 + t3;
    *budget -= 4;
    if (depth >= max_depth || *budget <= 0 || std::abs(split - whole) <= tol) return split;
    const double q = 0.25 * tol;
    return adapt_tri(f, A, ab, ca, t0, q, depth + 1, max_depth, budget) +
           adapt_tri(f, ab, B, bc, t1, q, depth + 1, max_depth, budget) +
           adapt_tri(f, ca, bc, C, t2, q, depth + 1, max_depth, budget) +
           adapt_tri(f, ab, bc, ca, t3, q, depth + 1, max_depth, budget);
}

} // namespace

double integrate(const Fn1& f, double a, double b, const Options& opt) {
    if (b <= a) return 0.0;
    const double whole = gl8(f, a, b);
    const double tol = opt.tol * std::max(1.0, std::abs(whole));
    std::priority_queue<Seg, std::vector<Seg>, SegWorse> queue;
    queue.push(make_seg(f, a, b, whole, 0));
    double total = queue.top().fine;
    double err_sum = queue.top().err;
    long nodes = 3;
    while (err_sum > tol && nodes < opt.adaptive_node_budget && !queue.empty()) {
        const Seg worst = queue.top();
        if (worst.err <= 0.0) break;
        queue.pop();
        err_sum -= worst.err;
        total -= worst.fine;
        if (worst.depth >= opt.max_depth) {
            total += worst.fine;  // frozen; its error no longer counts
            continue;
        }
        const double m = 0.5 * (worst.a + worst.b);
        const double lc = gl8(f, worst.a, m);
        const double rc = gl8(f, m, worst.b);
        const Seg left = make_seg(f, worst.a, m, lc, worst.depth + 1);
        const Seg right = make_seg(f, m, worst.b, rc, worst.depth + 1);
        nodes += 6;
        total += left.fine + right.fine;
        err_sum += left.err + right.err;
        queue.push(left);
        queue.push(right);
    }
    return total;
}

double integrate_triangle(const Fn2& f, const Vec2& A, const Vec2& B, const Vec2& C,
                          const Options& opt) {
    const double whole = tri_gl(f, A, B, C);
    const double tol = opt.tol * std::max(1.0, std::abs(whole));
    long budget = opt.adaptive_node_budget;
    return adapt_tri(f, A, B, C, whole, tol, 0, opt.max_depth_2d, &budget);
}

double integrate_polygon(const Fn2& f, const Polygon& poly, const Options& opt) {
    if (poly.v.size() < 3) return 0.0;
    const auto tris = triangulate(poly);
    std::vector<double> parts(tris.size());
    par::for_index(tris.size(), [&](std::size_t i) {
        parts[i] = integrate_triangle(f, tris[i][0], tris[i][1], tris[i][2], opt);
    });
    return par::pairwise_sum(parts);
}

double integrate_segment(const std::function<double(double)>& f, const Vec2& p0, const Vec2& p1,
                         const Options& opt) {
    const double len = (p1 - p0).norm();
    if (len < kGeomTol) return f(0.0);  // 1D point interface: H^0 evaluation
    return integrate(f, 0.0, len, opt);
}

std::vector<Panel1> split_uniform(double a, double b, std::size_t n) {
    std::vector<Panel1> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t0 = a + (b - a) * double(i) / double(n);
        const double t1 = a + (b - a) * double(i + 1) / double(n);
        out.push_back({t0, t1});
    }
    return out;
}

std::vector<Panel2> refine_panels(std::vector<Panel2> base, std::size_t budget) {
    if (base.empty()) return base;
    while (base.size() < budget) {
        std::vector<Panel2> next;
        next.reserve(base.size() * 4);
        for (const auto& p : base) {
            const Vec2 ab = (p.A + p.B) * 0.5, bc = (p.B + p.C) * 0.5, ca = (p.C + p.A) * 0.5;
            next.push_back({p.A, ab, ca});
            next.push_back({ab, p.B, bc});
            next.push_back({ca, bc, p.C});
            next.push_back({ab, bc, ca});
        }
        base = std::move(next);
    }
    return base;
}

double panel_integral(const Fn1& f, const Panel1& p) { return gl8(f, p.a, p.b); }
double panel_integral(const Fn2& f, const Panel2& p) { return tri_gl(f, p.A, p.B, p.C); }

double sweep_serial(const std::vector<Panel1>& panels, const Fn1& f) {
    double s = 0.0;
    for (const auto& p : panels) s += panel_integral(f, p);
    return s;
}

double sweep_serial(const std::vector<Panel2>& panels, const Fn2& f) {
    double s = 0.0;
    for (const auto& p : panels) s += panel_integral(f, p);
    return s;
}

double sweep_parallel(const std::vector<Panel1>& panels, const Fn1& f) {
    return par::map_sum(panels.size(),
                        [&](std::size_t i) { return panel_integral(f, panels[i]); });
}

double sweep_parallel(const std::vector<Panel2>& panels, const Fn2& f) {
    return par::map_sum(panels.size(),
                        [&](std::size_t i) { return panel_integral(f, panels[i]); });
}

} // namespace quad

namespace par {

namespace {
std::atomic<bool> g_enabled{true};
}

void set_enabled(bool on) { g_enabled.store(on); }
bool enabled() { return g_enabled.load(); }

int max_threads() {
    if (const char* env = std::getenv("DMPAIR_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

double pairwise_sum(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    std::vector<double> acc = v;
    std::size_t n = acc.size();
    while (n > 1) {
        const std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) acc[i] = acc[2 * i] + acc[2 * i + 1];
        if (n % 2 == 1) {
            acc[half] = acc[n - 1];
            n = half + 1;
        } else {
            n = half;
        }
    }
    return acc[0];
}

double map_sum(std::size_t n, const std::function<double(std::size_t)>& job) {
    std::vector<double> vals(n);
    for_index(n, [&](std::size_t i) { vals[i] = job(i); });
    return pairwise_sum(vals);
}

void for_index(std::size_t n, const std::function<void(std::size_t)>& job) {
#ifdef _OPENMP
    if (enabled() && n > 1) {
        const int nt = max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(nt)
        for (long long i = 0; i < (long long)n; ++i) job(std::size_t(i));
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) job(i);
}

} // namespace par
} // namespace dmpair
