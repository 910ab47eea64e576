#pragma once

#include "dmpair/bvfunc.hpp"
#include "dmpair/field.hpp"
#include "dmpair/measure.hpp"

namespace dmpair {

/// Standard symmetric bump kernel ρ(z) = c_N exp(-1/(1-|z|²)) supported in the
/// unit ball, normalized to unit mass; ρ_ε(z) = ε^{-N} ρ(z/ε).
class Mollifier {
public:
    explicit Mollifier(int dim);

    int dim() const { return dim_; }
    double normalization() const { return cN_; }

    double rho(const Vec2& z, double eps) const;
    Vec2 rho_grad(const Vec2& z, double eps) const;

    /// ρ_ε(x - ·) as a TestFunction centred at x (the kernel is symmetric).
    TestFunction kernel_at(const Vec2& x, double eps) const;

    /// Kernel moments ∫ ρ(z) z₁^i z₂^j dz on the unit ball.
    double moment(int i, int j) const;

    /// Exact smoothing of a polynomial: (ρ_ε ∗ p)(x), valid wherever the
    /// ε-ball does not leave the polynomial's cell.
    Poly smooth_poly(const Poly& p, double eps) const;

    /// (ρ_ε ∗ u)(x); the ball must stay inside the domain. Quadrature panels
    /// are split along the skeleton so integrands stay smooth per panel.
    double mollify_scalar(const PiecewiseBV& u, double eps, const Vec2& x,
                          const quad::Options& opt = {}) const;

    struct SmoothedValue {
        double value = 0.0;
        Vec2 grad;
    };
    /// u_ε(x) together with ∇u_ε(x) (= ∫ ∇ρ_ε(x-y) u(y) dy).
    SmoothedValue mollify_scalar_with_grad(const PiecewiseBV& u, double eps, const Vec2& x,
                                           const quad::Options& opt = {}) const;

    /// b_ε(x,t) and B_ε(x,t), componentwise convolutions.
    Vec2 mollify_field(const PiecewiseField& f, double t, double eps, const Vec2& x,
                       const quad::Options& opt = {}) const;
    Vec2 mollify_B(const PiecewiseField& f, double t, double eps, const Vec2& x,
                   const quad::Options& opt = {}) const;

    /// True when the ε-ball around x avoids the skeleton (and the Cantor
    /// support, if given), so polynomial smoothing is exact there.
    bool ball_is_clear(const PolygonalDomain& dom, const Vec2& x, double eps,
                       const PiecewiseBV* u = nullptr) const;

    void require_inside(const PolygonalDomain& dom, const Vec2& x, double eps) const;

private:
    int dim_;
    double cN_ = 0.0;
    std::vector<std::vector<double>> moments_;  // [i][j], unit-kernel moments

    double convolve_cellwise(const PolygonalDomain& dom,
                             const std::function<double(int, const Vec2&)>& g, double eps,
                             const Vec2& x, int deriv,  // 0: value, 1: d/dx1, 2: d/dx2
                             const quad::Options& opt) const;
};

} // namespace dmpair
