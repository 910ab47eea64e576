#include "dmpair/poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dmpair {

namespace {
bool term_less(const Poly::Term& a, const Poly::Term& b) {
    if (a.px != b.px) return a.px < b.px;
    if (a.py != b.py) return a.py < b.py;
    return a.pt < b.pt;
}

double ipow(double v, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= v;
    return r;
}
} // namespace

Poly::Poly(double constant) {
    if (constant != 0.0) terms_.push_back({0, 0, 0, constant});
}

Poly Poly::monomial(int px, int py, int pt, double c) {
    Poly p;
    if (c != 0.0) p.terms_.push_back({px, py, pt, c});
    return p;
}

Poly Poly::var_x() { return monomial(1, 0, 0, 1.0); }
Poly Poly::var_y() { return monomial(0, 1, 0, 1.0); }
Poly Poly::var_t() { return monomial(0, 0, 1, 1.0); }

void Poly::normalize() {
    std::sort(terms_.begin(), terms_.end(), term_less);
    std::vector<Term> out;
    for (const auto& t : terms_) {
        if (!out.empty() && out.back().px == t.px && out.back().py == t.py &&
            out.back().pt == t.pt) {
            out.back().c += t.c;
        } else {
            out.push_back(t);
        }
    }
    std::erase_if(out, [](const Term& t) { return t.c == 0.0; });
    terms_ = std::move(out);
}

double Poly::eval(double x, double y, double t) const {
    double acc = 0.0;
    for (const auto& m : terms_)
        acc += m.c * ipow(x, m.px) * ipow(y, m.py) * ipow(t, m.pt);
    return acc;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
    r.normalize();
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + o.scaled(-1.0); }
Poly Poly::operator-() const { return scaled(-1.0); }

Poly Poly::scaled(double a) const {
    Poly r = *this;
    for (auto& t : r.terms_) t.c *= a;
    r.normalize();
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    Poly r;
    for (const auto& a : terms_)
        for (const auto& b : o.terms_)
            r.terms_.push_back({a.px + b.px, a.py + b.py, a.pt + b.pt, a.c * b.c});
    r.normalize();
    return r;
}

Poly Poly::dx() const {
    Poly r;
    for (const auto& m : terms_)
        if (m.px > 0) r.terms_.push_back({m.px - 1, m.py, m.pt, m.c * m.px});
    r.normalize();
    return r;
}

Poly Poly::dy() const {
    Poly r;
    for (const auto& m : terms_)
        if (m.py > 0) r.terms_.push_back({m.px, m.py - 1, m.pt, m.c * m.py});
    r.normalize();
    return r;
}

Poly Poly::dt() const {
    Poly r;
    for (const auto& m : terms_)
        if (m.pt > 0) r.terms_.push_back({m.px, m.py, m.pt - 1, m.c * m.pt});
    r.normalize();
    return r;
}

Poly Poly::integral_t() const {
    Poly r;
    for (const auto& m : terms_)
        r.terms_.push_back({m.px, m.py, m.pt + 1, m.c / (m.pt + 1)});
    r.normalize();
    return r;
}

Poly Poly::substitute_t(const Poly& s) const {
    if (s.degree_t() > 0)
        throw std::invalid_argument("substitute_t: replacement depends on t");
    Poly r;
    for (const auto& m : terms_) {
        Poly part = Poly::monomial(m.px, m.py, 0, m.c);
        for (int k = 0; k < m.pt; ++k) part = part * s;
        r = r + part;
    }
    return r;
}

Poly Poly::restrict_line(double px0, double py0, double dx0, double dy0) const {
    const Poly xs = Poly(px0) + Poly::var_x().scaled(dx0);
    const Poly ys = Poly(py0) + Poly::var_x().scaled(dy0);
    Poly r;
    for (const auto& m : terms_) {
        Poly part = Poly::monomial(0, 0, m.pt, m.c);
        for (int k = 0; k < m.px; ++k) part = part * xs;
        for (int k = 0; k < m.py; ++k) part = part * ys;
        r = r + part;
    }
    return r;
}

int Poly::degree_t() const {
    int d = 0;
    for (const auto& m : terms_) d = std::max(d, m.pt);
    return d;
}

int Poly::degree_xy() const {
    int d = 0;
    for (const auto& m : terms_) d = std::max(d, m.px + m.py);
    return d;
}

bool Poly::same_terms(const Poly& o, double tol) const {
    const Poly diff = *this - o;
    double mag = 0.0;
    for (const auto& t : diff.terms()) mag = std::max(mag, std::abs(t.c));
    return mag <= tol;
}

namespace {

double eval1(const std::vector<double>& c, double s) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * s + c[i];
    return acc;
}

std::vector<double> derive1(const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * double(i));
    return d;
}

double bisect_root(const std::vector<double>& c, double lo, double hi) {
    double flo = eval1(c, lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = eval1(c, mid);
        if (fm == 0.0 || hi - lo < 1e-15 * (1.0 + std::abs(mid))) return mid;
        if ((flo < 0) != (fm < 0)) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

std::vector<double> poly1_roots(const std::vector<double>& coeffs, double a, double b) {
    std::vector<double> c = coeffs;
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    std::vector<double> roots;
    if (c.size() <= 1) return roots;  // constant: no isolated roots reported
    if (c.size() == 2) {
        const double r = -c[0] / c[1];
        if (r >= a && r <= b) roots.push_back(r);
        return roots;
    }
    // Critical points split [a,b] into monotone pieces.
    std::vector<double> knots = poly1_roots(derive1(c), a, b);
    knots.insert(knots.begin(), a);
    knots.push_back(b);
    std::sort(knots.begin(), knots.end());
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double lo = knots[i], hi = knots[i + 1];
        if (hi - lo < 1e-15) continue;
        const double flo = eval1(c, lo), fhi = eval1(c, hi);
        if (flo == 0.0) roots.push_back(lo);
        if ((flo < 0) != (fhi < 0)) roots.push_back(bisect_root(c, lo, hi));
    }
    const double fb = eval1(c, b);
    if (fb == 0.0) roots.push_back(b);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double u, double v) { return std::abs(u - v) < 1e-13; }),
                roots.end());
    return roots;
}

double poly1_max_abs(const std::vector<double>& coeffs, double a, double b) {
    std::vector<double> c = coeffs;
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    if (c.empty()) return 0.0;
    double m = std::max(std::abs(eval1(c, a)), std::abs(eval1(c, b)));
    if (c.size() >= 2)
        for (double r : poly1_roots(derive1(c), a, b))
            m = std::max(m, std::abs(eval1(c, r)));
    return m;
}

std::vector<double> coeffs_in_t(const Poly& p, double x, double y) {
    std::vector<double> c(std::size_t(p.degree_t()) + 1, 0.0);
    for (const auto& m : p.terms()) {
        double v = m.c;
        for (int i = 0; i < m.px; ++i) v *= x;
        for (int i = 0; i < m.py; ++i) v *= y;
        c[std::size_t(m.pt)] += v;
    }
    return c;
}

std::vector<double> coeffs_in_x(const Poly& p, double y, double t) {
    int dmax = 0;
    for (const auto& m : p.terms()) dmax = std::max(dmax, m.px);
    std::vector<double> c(std::size_t(dmax) + 1, 0.0);
    for (const auto& m : p.terms()) {
        double v = m.c;
        for (int i = 0; i < m.py; ++i) v *= y;
        for (int i = 0; i < m.pt; ++i) v *= t;
        c[std::size_t(m.px)] += v;
    }
    return c;
}

} // namespace dmpair
