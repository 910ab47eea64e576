#include "dmpair/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dmpair {

double Vec2::norm() const { return std::hypot(x, y); }

double Polygon::area() const {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        s += a.cross(b);
    }
    return 0.5 * s;
}

double Polygon::perimeter() const {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (v[(i + 1) % v.size()] - v[i]).norm();
    return s;
}

Vec2 Polygon::centroid() const {
    double a = 0.0;
    Vec2 c{0.0, 0.0};
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % v.size()];
        const double w = p.cross(q);
        a += w;
        c.x += (p.x + q.x) * w;
        c.y += (p.y + q.y) * w;
    }
    a *= 0.5;
    return {c.x / (6.0 * a), c.y / (6.0 * a)};
}

bool Polygon::on_boundary(const Vec2& p) const {
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        const Vec2 d = b - a;
        const double len = d.norm();
        if (len < kGeomTol) continue;
        const double cr = std::abs((p - a).cross(d)) / len;
        const double s = (p - a).dot(d) / (len * len);
        if (cr <= kGeomTol && s >= -kGeomTol / len && s <= 1.0 + kGeomTol / len) return true;
    }
    return false;
}

bool Polygon::contains(const Vec2& p) const {
    if (on_boundary(p)) return false;
    bool in = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const bool cross = (v[i].y > p.y) != (v[j].y > p.y);
        if (cross) {
            const double xint = v[j].x + (v[i].x - v[j].x) * (p.y - v[j].y) / (v[i].y - v[j].y);
            if (p.x < xint) in = !in;
        }
    }
    return in;
}

bool Polygon::is_convex() const {
    const std::size_t n = v.size();
    if (n < 3) return false;
    int sign = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = v[(i + 1) % n] - v[i];
        const Vec2 b = v[(i + 2) % n] - v[(i + 1) % n];
        const double cr = a.cross(b);
        if (std::abs(cr) < kGeomTol) continue;
        const int s = cr > 0 ? 1 : -1;
        if (sign == 0) sign = s;
        else if (s != sign) return false;
    }
    return true;
}

void Polygon::ensure_ccw() {
    if (area() < 0.0) std::reverse(v.begin(), v.end());
}

Polygon box_polygon(const Vec2& lo, const Vec2& hi) {
    return Polygon{{{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}}};
}

Polygon clip_convex(const Polygon& subject, const Polygon& convex_clip) {
    std::vector<Vec2> out = subject.v;
    const std::size_t m = convex_clip.v.size();
    for (std::size_t e = 0; e < m && !out.empty(); ++e) {
        const Vec2 a = convex_clip.v[e];
        const Vec2 b = convex_clip.v[(e + 1) % m];
        const Vec2 d = b - a;
        auto inside = [&](const Vec2& p) { return d.cross(p - a) >= -kGeomTol; };
        std::vector<Vec2> in = std::move(out);
        out.clear();
        for (std::size_t i = 0; i < in.size(); ++i) {
            const Vec2& p = in[i];
            const Vec2& q = in[(i + 1) % in.size()];
            const bool pin = inside(p), qin = inside(q);
            if (pin) out.push_back(p);
            if (pin != qin) {
                const double denom = d.cross(q - p);
                if (std::abs(denom) > 0.0) {
                    const double s = -d.cross(p - a) / denom;
                    out.push_back(p + (q - p) * s);
                }
            }
        }
    }
    Polygon r{out};
    // drop degenerate slivers
    if (r.v.size() < 3 || std::abs(r.area()) < kGeomTol) return Polygon{};
    r.ensure_ccw();
    return r;
}

std::vector<std::array<Vec2, 3>> triangulate(const Polygon& poly) {
    std::vector<std::array<Vec2, 3>> tris;
    std::vector<Vec2> v = poly.v;
    if (v.size() < 3) return tris;
    if (poly.is_convex()) {
        for (std::size_t i = 1; i + 1 < v.size(); ++i)
            tris.push_back({v[0], v[i], v[i + 1]});
        return tris;
    }
    // ear clipping for simple polygons
    auto is_ear = [&](std::size_t i) {
        const std::size_t n = v.size();
        const Vec2 a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
        if ((b - a).cross(c - b) <= kGeomTol) return false;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == (i + n - 1) % n || j == i || j == (i + 1) % n) continue;
            const Vec2& p = v[j];
            const double d1 = (b - a).cross(p - a);
            const double d2 = (c - b).cross(p - b);
            const double d3 = (a - c).cross(p - c);
            if (d1 > kGeomTol && d2 > kGeomTol && d3 > kGeomTol) return false;
        }
        return true;
    };
    std::size_t guard = 0;
    while (v.size() > 3 && guard++ < 10000) {
        bool clipped = false;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (is_ear(i)) {
                const std::size_t n = v.size();
                tris.push_back({v[(i + n - 1) % n], v[i], v[(i + 1) % n]});
                v.erase(v.begin() + long(i));
                clipped = true;
                break;
            }
        }
        if (!clipped) throw std::runtime_error("triangulate: polygon is not simple");
    }
    if (v.size() == 3) tris.push_back({v[0], v[1], v[2]});
    return tris;
}

std::vector<std::pair<double, double>> clip_segment_to_convex(const Vec2& p0, const Vec2& p1,
                                                              const Polygon& convex) {
    const Vec2 d = p1 - p0;
    const double len = d.norm();
    const Vec2 u = d * (1.0 / len);
    double s0 = 0.0, s1 = len;
    const std::size_t m = convex.v.size();
    for (std::size_t e = 0; e < m; ++e) {
        const Vec2 a = convex.v[e];
        const Vec2 b = convex.v[(e + 1) % m];
        const Vec2 t = b - a;
        const Vec2 n{-t.y, t.x};  // interior side of a CCW polygon
        const double off = n.dot(p0 - a);
        const double slope = n.dot(u);
        if (std::abs(slope) < 1e-15) {
            if (off < -kGeomTol) return {};
            continue;
        }
        const double s = -off / slope;
        if (slope > 0) s0 = std::max(s0, s);
        else s1 = std::min(s1, s);
    }
    if (s1 - s0 <= kGeomTol) return {};
    return {{s0, s1}};
}

double SkeletonEdge::length() const {
    const double l = (p1 - p0).norm();
    return l < kGeomTol ? 1.0 : l;  // 1D point interface ⇒ H^0 weight 1
}

Vec2 SkeletonEdge::point_at(double s) const {
    const double l = (p1 - p0).norm();
    if (l < kGeomTol) return p0;
    return p0 + (p1 - p0) * (s / l);
}

double SkeletonEdge::project(const Vec2& p) const {
    const double l = (p1 - p0).norm();
    if (l < kGeomTol) return 0.0;
    return (p - p0).dot(p1 - p0) / l;
}

bool SkeletonEdge::contains_point(const Vec2& p) const {
    const double l = (p1 - p0).norm();
    if (l < kGeomTol) return (p - p0).norm() <= kGeomTol;
    const double s = project(p);
    if (s < -kGeomTol || s > l + kGeomTol) return false;
    const Vec2 q = point_at(std::clamp(s, 0.0, l));
    return (p - q).norm() <= kGeomTol;
}

PolygonalDomain PolygonalDomain::make_1d(double lo, double hi,
                                         const std::vector<Interval>& cells) {
    PolygonalDomain d;
    d.dim_ = 1;
    d.lo_ = {lo, 0.0};
    d.hi_ = {hi, 0.0};
    d.cells1_ = cells;
    std::sort(d.cells1_.begin(), d.cells1_.end(),
              [](const Interval& a, const Interval& b) { return a.a < b.a; });
    d.build_skeleton_1d();
    d.validate();
    return d;
}

PolygonalDomain PolygonalDomain::make_2d(const Vec2& lo, const Vec2& hi,
                                         const std::vector<Polygon>& cells) {
    PolygonalDomain d;
    d.dim_ = 2;
    d.lo_ = lo;
    d.hi_ = hi;
    d.cells2_ = cells;
    for (auto& c : d.cells2_) c.ensure_ccw();
    d.build_skeleton_2d();
    d.validate();
    return d;
}

void PolygonalDomain::build_skeleton_1d() {
    for (std::size_t i = 0; i + 1 < cells1_.size(); ++i) {
        if (std::abs(cells1_[i].b - cells1_[i + 1].a) > kGeomTol)
            throw std::invalid_argument("1d cells do not tile the interval");
        SkeletonEdge e;
        e.p0 = e.p1 = {cells1_[i].b, 0.0};
        e.nu = {1.0, 0.0};
        e.cell_minus = int(i);
        e.cell_plus = int(i + 1);
        skeleton_.push_back(e);
    }
}

void PolygonalDomain::build_skeleton_2d() {
    struct Edge {
        Vec2 a, b;
        int cell;
    };
    std::vector<Edge> edges;
    for (std::size_t c = 0; c < cells2_.size(); ++c) {
        const auto& v = cells2_[c].v;
        for (std::size_t i = 0; i < v.size(); ++i)
            edges.push_back({v[i], v[(i + 1) % v.size()], int(c)});
    }
    // Pairwise collinear-overlap detection; supports hanging nodes.
    for (std::size_t i = 0; i < edges.size(); ++i) {
        for (std::size_t j = i + 1; j < edges.size(); ++j) {
            if (edges[i].cell == edges[j].cell) continue;
            const Vec2 di = edges[i].b - edges[i].a;
            const Vec2 dj = edges[j].b - edges[j].a;
            const double li = di.norm(), lj = dj.norm();
            if (li < kGeomTol || lj < kGeomTol) continue;
            if (std::abs(di.cross(dj)) / (li * lj) > 1e-10) continue;       // not parallel
            if (std::abs(di.cross(edges[j].a - edges[i].a)) / li > kGeomTol) continue;  // not same line
            // overlap in the parameter of edge i
            const Vec2 u = di * (1.0 / li);
            double s0 = u.dot(edges[j].a - edges[i].a);
            double s1 = u.dot(edges[j].b - edges[i].a);
            if (s0 > s1) std::swap(s0, s1);
            const double lo = std::max(0.0, s0), hi = std::min(li, s1);
            if (hi - lo <= kGeomTol) continue;
            SkeletonEdge e;
            Vec2 q0 = edges[i].a + u * lo;
            Vec2 q1 = edges[i].a + u * hi;
            if (q1.x < q0.x - kGeomTol || (std::abs(q1.x - q0.x) <= kGeomTol && q1.y < q0.y))
                std::swap(q0, q1);  // canonical endpoint order
            e.p0 = q0;
            e.p1 = q1;
            const Vec2 dir = (q1 - q0) * (1.0 / (q1 - q0).norm());
            e.nu = {-dir.y, dir.x};  // left normal of the canonical direction
            const Vec2 mid = (q0 + q1) * 0.5;
            const double eps = 1e-7 * std::max(1.0, (hi_ - lo_).norm());
            const Vec2 probe_plus = mid + e.nu * eps;
            const bool i_on_plus = cells2_[std::size_t(edges[i].cell)].contains(probe_plus);
            e.cell_plus = i_on_plus ? edges[i].cell : edges[j].cell;
            e.cell_minus = i_on_plus ? edges[j].cell : edges[i].cell;
            skeleton_.push_back(e);
        }
    }
}

void PolygonalDomain::validate() const {
    double covered = 0.0;
    if (dim_ == 1) {
        for (const auto& c : cells1_) {
            if (c.b <= c.a) throw std::invalid_argument("degenerate 1d cell");
            covered += c.length();
        }
        if (std::abs(covered - (hi_.x - lo_.x)) > 1e-9)
            throw std::invalid_argument("1d cells do not cover the domain");
    } else {
        for (const auto& c : cells2_) {
            if (c.v.size() < 3 || c.area() <= kGeomTol)
                throw std::invalid_argument("degenerate 2d cell");
            if (!c.is_convex())
                throw std::invalid_argument("cells must be convex polygons");
            covered += c.area();
        }
        const double box = (hi_.x - lo_.x) * (hi_.y - lo_.y);
        if (std::abs(covered - box) > 1e-9 * std::max(1.0, box))
            throw std::invalid_argument("2d cells do not cover the domain box");
    }
    for (const auto& e : skeleton_) {
        if (std::abs(e.nu.norm() - 1.0) > 1e-12)
            throw std::logic_error("skeleton normal not unit");
    }
}

std::size_t PolygonalDomain::cell_count() const {
    return dim_ == 1 ? cells1_.size() : cells2_.size();
}

int PolygonalDomain::locate(const Vec2& x) const {
    if (dim_ == 1) {
        for (std::size_t i = 0; i < cells1_.size(); ++i)
            if (x.x >= cells1_[i].a - kGeomTol && x.x <= cells1_[i].b + kGeomTol) {
                if (x.x <= cells1_[i].b - kGeomTol || i + 1 == cells1_.size()) return int(i);
                return int(i);  // boundary point: lower cell wins
            }
        return -1;
    }
    for (std::size_t i = 0; i < cells2_.size(); ++i)
        if (cells2_[i].contains(x)) return int(i);
    for (std::size_t i = 0; i < cells2_.size(); ++i)
        if (cells2_[i].on_boundary(x)) return int(i);
    return -1;
}

int PolygonalDomain::side_cell(std::size_t e, bool plus) const {
    const auto& ed = skeleton_.at(e);
    return plus ? ed.cell_plus : ed.cell_minus;
}

bool PolygonalDomain::inside(const Vec2& x) const {
    if (dim_ == 1) return x.x > lo_.x && x.x < hi_.x;
    return x.x > lo_.x && x.x < hi_.x && x.y > lo_.y && x.y < hi_.y;
}

double PolygonalDomain::measure() const {
    if (dim_ == 1) return hi_.x - lo_.x;
    return (hi_.x - lo_.x) * (hi_.y - lo_.y);
}

FinitePerimeterSet FinitePerimeterSet::from_polygon(Polygon p) {
    if (p.v.size() < 3 || std::abs(p.area()) < kGeomTol)
        throw std::domain_error("finite perimeter set: degenerate polygon");
    p.ensure_ccw();
    FinitePerimeterSet s;
    s.dim_ = 2;
    s.poly_ = std::move(p);
    return s;
}

FinitePerimeterSet FinitePerimeterSet::from_intervals(std::vector<Interval> iv) {
    std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.a < b.a; });
    for (std::size_t i = 0; i < iv.size(); ++i) {
        if (iv[i].b <= iv[i].a) throw std::domain_error("degenerate interval");
        if (i > 0 && iv[i].a < iv[i - 1].b - kGeomTol)
            throw std::domain_error("overlapping intervals");
    }
    FinitePerimeterSet s;
    s.dim_ = 1;
    s.ivs_ = std::move(iv);
    return s;
}

double FinitePerimeterSet::BoundaryPiece::length() const {
    const double l = (p1 - p0).norm();
    return l < kGeomTol ? 1.0 : l;
}

std::vector<FinitePerimeterSet::BoundaryPiece> FinitePerimeterSet::reduced_boundary() const {
    std::vector<BoundaryPiece> out;
    if (dim_ == 1) {
        for (const auto& iv : ivs_) {
            out.push_back({{iv.a, 0.0}, {iv.a, 0.0}, {1.0, 0.0}});
            out.push_back({{iv.b, 0.0}, {iv.b, 0.0}, {-1.0, 0.0}});
        }
        return out;
    }
    const auto& v = poly_.v;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2 a = v[i], b = v[(i + 1) % v.size()];
        const Vec2 d = b - a;
        const double l = d.norm();
        out.push_back({a, b, {-d.y / l, d.x / l}});  // inward normal of a CCW edge
    }
    return out;
}

double FinitePerimeterSet::perimeter(const PolygonalDomain& domain) const {
    if (!compactly_inside(domain))
        throw std::domain_error("perimeter: set not compactly contained in the domain");
    double p = 0.0;
    for (const auto& e : reduced_boundary()) p += e.length();
    return p;
}

bool FinitePerimeterSet::contains(const Vec2& x) const {
    if (dim_ == 1) {
        for (const auto& iv : ivs_)
            if (x.x > iv.a + kGeomTol && x.x < iv.b - kGeomTol) return true;
        return false;
    }
    return poly_.contains(x);
}

bool FinitePerimeterSet::compactly_inside(const PolygonalDomain& domain) const {
    if (dim_ != domain.dim()) return false;
    if (dim_ == 1) {
        for (const auto& iv : ivs_)
            if (iv.a <= domain.lo().x + kGeomTol || iv.b >= domain.hi().x - kGeomTol) return false;
        return true;
    }
    for (const auto& p : poly_.v)
        if (p.x <= domain.lo().x + kGeomTol || p.x >= domain.hi().x - kGeomTol ||
            p.y <= domain.lo().y + kGeomTol || p.y >= domain.hi().y - kGeomTol)
            return false;
    return true;
}

PointClassification FinitePerimeterSet::classify_point(const Vec2& x) const {
    if (dim_ == 1) {
        for (const auto& iv : ivs_) {
            if (std::abs(x.x - iv.a) <= kGeomTol || std::abs(x.x - iv.b) <= kGeomTol)
                return {0.5, DensityLabel::EssentialBoundary};
            if (x.x > iv.a && x.x < iv.b) return {1.0, DensityLabel::E1};
        }
        return {0.0, DensityLabel::E0};
    }
    const auto& v = poly_.v;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if ((x - v[i]).norm() <= kGeomTol) {
            // interior angle at the vertex over the full turn
            const Vec2 prev = v[(i + v.size() - 1) % v.size()];
            const Vec2 next = v[(i + 1) % v.size()];
            const Vec2 din = v[i] - prev;
            const Vec2 dout = next - v[i];
            double ang = std::numbers::pi - std::atan2(din.cross(dout), din.dot(dout));
            return {ang / (2.0 * std::numbers::pi), DensityLabel::EssentialBoundary};
        }
    }
    if (poly_.on_boundary(x)) return {0.5, DensityLabel::EssentialBoundary};
    if (poly_.contains(x)) return {1.0, DensityLabel::E1};
    return {0.0, DensityLabel::E0};
}

} // namespace dmpair
