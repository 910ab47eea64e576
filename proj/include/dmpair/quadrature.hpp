#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "dmpair/geometry.hpp"

namespace dmpair {
namespace quad {

struct Options {
    double tol = 1e-10;       // relative to the first whole-domain estimate
    int max_depth = 48;       // bisection depth cap (1d); 2d uses max_depth_2d
    int max_depth_2d = 12;
    std::size_t panel_budget_1d = 4096;
    std::size_t panel_budget_2d = 1u << 20;
    // Refinement cap per adaptive call. Integrands touching the Cantor set
    // refine toward a fractal; the cap turns that into a graceful error
    // floor around 1e-8 instead of an exponential blowup.
    long adaptive_node_budget = 120000;
};

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(const Vec2&)>;

/// Adaptive Gauss–Legendre on an interval.
double integrate(const Fn1& f, double a, double b, const Options& opt = {});

/// Adaptive integration over a triangle (Duffy-mapped tensor Gauss rule,
/// quadtree refinement).
double integrate_triangle(const Fn2& f, const Vec2& A, const Vec2& B, const Vec2& C,
                          const Options& opt = {});

/// Adaptive integration over a simple polygon (triangulated once).
double integrate_polygon(const Fn2& f, const Polygon& poly, const Options& opt = {});

/// Adaptive line integral along a segment, parametrized by arclength.
double integrate_segment(const std::function<double(double)>& f, const Vec2& p0, const Vec2& p1,
                         const Options& opt = {});

// ---- fixed-resolution panel sweeps (the hot kernels) ----------------------

struct Panel1 {
    double a, b;
};

struct Panel2 {
    Vec2 A, B, C;
};

std::vector<Panel1> split_uniform(double a, double b, std::size_t n);

/// Uniformly refine triangles until at least `budget` panels (4-way splits).
std::vector<Panel2> refine_panels(std::vector<Panel2> base, std::size_t budget);

double panel_integral(const Fn1& f, const Panel1& p);
double panel_integral(const Fn2& f, const Panel2& p);

double sweep_serial(const std::vector<Panel1>& panels, const Fn1& f);
double sweep_serial(const std::vector<Panel2>& panels, const Fn2& f);
double sweep_parallel(const std::vector<Panel1>& panels, const Fn1& f);
double sweep_parallel(const std::vector<Panel2>& panels, const Fn2& f);

} // namespace quad

namespace par {

/// Effective thread cap: DMPAIR_THREADS if set, else the OpenMP default.
int max_threads();
void set_enabled(bool on);
bool enabled();

/// Deterministic pairwise sum (order independent of thread count).
double pairwise_sum(const std::vector<double>& v);

/// Evaluate job(i) for i in [0,n) — in parallel when enabled — and return the
/// pairwise sum of the results. Deterministic for any thread count.
double map_sum(std::size_t n, const std::function<double(std::size_t)>& job);

/// Run job(i) for i in [0,n), parallel when enabled.
void for_index(std::size_t n, const std::function<void(std::size_t)>& job);

} // namespace par
} // namespace dmpair
