#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dmpair {

struct Vec2 {
    double x = 0.0, y = 0.0;
    Vec2() = default;
    Vec2(double xx, double yy) : x(xx), y(yy) {}
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double a) const { return {a * x, a * y}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const;
};

constexpr double kGeomTol = 1e-12;  // point-on-edge tolerance, absolute

/// Simple polygon with vertices in counterclockwise order.
struct Polygon {
    std::vector<Vec2> v;

    double area() const;                 // signed (positive if CCW)
    double perimeter() const;
    Vec2 centroid() const;
    bool contains(const Vec2& p) const;  // strict interior
    bool on_boundary(const Vec2& p) const;
    bool is_convex() const;
    void ensure_ccw();
};

/// Clip a polygon against a convex polygon (Sutherland–Hodgman).
Polygon clip_convex(const Polygon& subject, const Polygon& convex_clip);
Polygon box_polygon(const Vec2& lo, const Vec2& hi);

/// Fan/ear-clip triangulation of a simple polygon. Returns vertex triples.
std::vector<std::array<Vec2, 3>> triangulate(const Polygon& poly);

/// Sub-intervals of the segment [p0,p1] (by arclength parameter) lying in the
/// interior of a convex polygon.
std::vector<std::pair<double, double>> clip_segment_to_convex(const Vec2& p0, const Vec2& p1,
                                                              const Polygon& convex);

struct Interval {
    double a = 0.0, b = 0.0;
    double length() const { return b - a; }
};

/// Internal interface shared by two cells. In 1D the "edge" is a single point
/// (p0 == p1) and the normal is ±1 stored in nu.x. nu points from cell_minus
/// into cell_plus.
struct SkeletonEdge {
    Vec2 p0, p1;
    Vec2 nu;
    int cell_minus = -1;
    int cell_plus = -1;
    double length() const;  // 1 in 1D (H^0 weight), |p1-p0| in 2D
    Vec2 point_at(double s) const;  // arclength parameter s in [0, length]
    double project(const Vec2& p) const;
    bool contains_point(const Vec2& p) const;
};

/// Axis-aligned box domain partitioned into cells; the skeleton (internal
/// interfaces) is derived from the cell list. Immutable once built.
class PolygonalDomain {
public:
    static PolygonalDomain make_1d(double lo, double hi, const std::vector<Interval>& cells);
    static PolygonalDomain make_2d(const Vec2& lo, const Vec2& hi,
                                   const std::vector<Polygon>& cells);

    int dim() const { return dim_; }
    const Vec2& lo() const { return lo_; }
    const Vec2& hi() const { return hi_; }
    std::size_t cell_count() const;
    const std::vector<Interval>& cells_1d() const { return cells1_; }
    const std::vector<Polygon>& cells_2d() const { return cells2_; }
    const std::vector<SkeletonEdge>& skeleton() const { return skeleton_; }

    /// Index of a cell containing x (interior or boundary); on the skeleton
    /// the lower-index (cell_minus-side consistent) cell wins.
    int locate(const Vec2& x) const;
    /// Cell on the requested side of skeleton edge e at a point of the edge.
    int side_cell(std::size_t e, bool plus) const;

    bool inside(const Vec2& x) const;     // inside the bounding box
    double measure() const;               // |Ω|

private:
    int dim_ = 1;
    Vec2 lo_, hi_;
    std::vector<Interval> cells1_;
    std::vector<Polygon> cells2_;
    std::vector<SkeletonEdge> skeleton_;

    void build_skeleton_1d();
    void build_skeleton_2d();
    void validate() const;
};

enum class DensityLabel { E0, E1, EssentialBoundary };

struct PointClassification {
    double density = 0.0;
    DensityLabel label = DensityLabel::E0;
};

/// Set of finite perimeter: a simple polygon in 2D, a finite union of
/// intervals in 1D. Reduced-boundary edges carry the interior unit normal.
class FinitePerimeterSet {
public:
    static FinitePerimeterSet from_polygon(Polygon p);
    static FinitePerimeterSet from_intervals(std::vector<Interval> iv);

    int dim() const { return dim_; }
    const Polygon& polygon() const { return poly_; }
    const std::vector<Interval>& intervals() const { return ivs_; }

    struct BoundaryPiece {
        Vec2 p0, p1;      // p0 == p1 in 1D
        Vec2 nu_int;      // measure-theoretic interior unit normal
        double length() const;
    };

    std::vector<BoundaryPiece> reduced_boundary() const;
    double perimeter(const PolygonalDomain& domain) const;
    PointClassification classify_point(const Vec2& x) const;

    bool contains(const Vec2& x) const;   // density-one points
    bool compactly_inside(const PolygonalDomain& domain) const;

private:
    int dim_ = 2;
    Polygon poly_;
    std::vector<Interval> ivs_;
};

} // namespace dmpair
