#pragma once

#include <vector>
#include <array>
#include <cstdint>

namespace dmpair {

/// Dense-term polynomial in the spatial variables (x, y) and the parameter t.
/// 1D problems simply never use y. Degrees stay tiny (scenario data is low
/// order), so a sorted term list is plenty.
class Poly {
public:
    struct Term {
        int px = 0, py = 0, pt = 0;
        double c = 0.0;
    };

    Poly() = default;
    explicit Poly(double constant);
    static Poly monomial(int px, int py, int pt, double c);
    static Poly var_x();
    static Poly var_y();
    static Poly var_t();

    bool is_zero() const { return terms_.empty(); }
    const std::vector<Term>& terms() const { return terms_; }

    double eval(double x, double y, double t) const;
    double eval_xy(double x, double y) const { return eval(x, y, 0.0); }

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator-() const;
    Poly scaled(double a) const;

    Poly dx() const;
    Poly dy() const;
    Poly dt() const;

    /// Antiderivative in t vanishing at t = 0 (i.e. p ↦ ∫₀ᵗ p(·,s) ds).
    Poly integral_t() const;

    /// Substitute t := s(x,y); s must not depend on t.
    Poly substitute_t(const Poly& s) const;

    /// Restrict to the parametrized line (x,y) = p + s·d. The result is a
    /// polynomial in (s, t) stored with s in the x slot.
    Poly restrict_line(double px0, double py0, double dx0, double dy0) const;

    int degree_t() const;
    int degree_xy() const;

    bool same_terms(const Poly& o, double tol) const;

private:
    void normalize();
    std::vector<Term> terms_;
};

/// Real roots of a univariate polynomial (coefficients low-to-high) inside
/// [a, b], found by recursive critical-point isolation plus bisection.
std::vector<double> poly1_roots(const std::vector<double>& coeffs, double a, double b);

/// max_{s in [a,b]} |p(s)| for a univariate polynomial, exact up to the
/// 1e-12 root refinement of the critical points.
double poly1_max_abs(const std::vector<double>& coeffs, double a, double b);

/// Collapse a Poly in (x,t) or just t into univariate coefficients in t at a
/// fixed spatial point.
std::vector<double> coeffs_in_t(const Poly& p, double x, double y);

/// Collapse a Poly into univariate coefficients in x at fixed (y,t).
std::vector<double> coeffs_in_x(const Poly& p, double y, double t);

} // namespace dmpair
