#pragma once

#include <functional>
#include <vector>

#include "dmpair/measure.hpp"

namespace dmpair {
namespace oracle {

/// Brute-force referee options. The panel numbers are budgets (upper caps);
/// sweeps resolve to the test function scale first.
struct Options {
    std::size_t panels_1d = 4096;
    std::size_t panel_budget_2d = 1u << 20;
    double tol = 1e-10;
    bool parallel = true;
};

struct WeakDivergence {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
};

/// Ground truth ⟨Div v, φ⟩ = -∫ v·∇φ dx by skeleton-aligned panelized
/// quadrature. `v` must be evaluable pointwise off a null set.
WeakDivergence weak_divergence(const PolygonalDomain& dom,
                               const std::function<Vec2(const Vec2&)>& v,
                               const TestFunction& phi, const Options& opt = {});

/// Serial reference of the same sweep (same panels, plain accumulation).
WeakDivergence weak_divergence_serial(const PolygonalDomain& dom,
                                      const std::function<Vec2(const Vec2&)>& v,
                                      const TestFunction& phi, Options opt = {});

struct ConvergenceStudy {
    std::vector<double> params;
    std::vector<double> values;
    double extrapolated = 0.0;
    double fitted_order = 0.0;
    double fit_residual = 0.0;
    bool order_reliable = true;
};

ConvergenceStudy study_from_values(const std::vector<double>& params,
                                   const std::vector<double>& values);
ConvergenceStudy convergence_study(const std::function<double(double)>& evaluator,
                                   const std::vector<double>& params);

/// Half-ball averaged normal flux of v at an edge point from one side, over a
/// shrinking radius sequence; the extrapolated limit estimates the one-sided
/// normal trace.
ConvergenceStudy one_sided_flux(const PolygonalDomain& dom,
                                const std::function<Vec2(const Vec2&)>& v, const Vec2& x,
                                const Vec2& nu, bool plus_side, double r0, double ratio,
                                int count);

} // namespace oracle
} // namespace dmpair
