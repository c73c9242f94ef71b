#pragma once

#include <complex>
#include <span>
#include <vector>

namespace rqc {

/// Plane points and complex values share one representation.
using Complex = std::complex<double>;
using Point = std::complex<double>;

struct Rect {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    bool empty() const { return !(x1 > x0 && y1 > y0); }
    bool contains(Point p, double tol = 0.0) const
    {
        return p.real() >= x0 - tol && p.real() <= x1 + tol && p.imag() >= y0 - tol &&
               p.imag() <= y1 + tol;
    }
    bool contains_disk(Point c, double r) const
    {
        return c.real() - r >= x0 && c.real() + r <= x1 && c.imag() - r >= y0 &&
               c.imag() + r <= y1;
    }
    Rect translated(Point d) const
    {
        return {x0 + d.real(), y0 + d.imag(), x1 + d.real(), y1 + d.imag()};
    }
    Rect united(const Rect& o) const;
    /// Euclidean distance between a point and the closed rectangle.
    double distance_to(Point p) const;
    /// Euclidean distance between two closed rectangles.
    double distance_to(const Rect& o) const;
};

/// Closed simple polygon, vertices in counterclockwise order (not repeated).
class Polygon {
public:
    Polygon() = default;
    explicit Polygon(std::vector<Point> vertices);

    std::span<const Point> vertices() const { return vertices_; }
    const Rect& bounds() const { return bounds_; }
    bool is_axis_rect() const { return axis_rect_; }
    double area() const;
    Point centroid() const;

    /// Closed-set membership; points within `tol` of the boundary count as inside.
    bool contains(Point p, double tol = 1e-12) const;
    /// Distance from p to the boundary.
    double boundary_distance(Point p) const;
    /// Distance from p to the closed polygon (0 inside).
    double distance_to(Point p) const;
    /// Distance between two closed polygons (0 if they intersect).
    double distance_to(const Polygon& other) const;

    Polygon translated(Point d) const;

private:
    std::vector<Point> vertices_;
    Rect bounds_{};
    bool axis_rect_ = false;
};

double segment_point_distance(Point a, Point b, Point p);
double segment_segment_distance(Point a, Point b, Point c, Point d);

/// Signed area (positive for counterclockwise vertex order).
double signed_area(std::span<const Point> ring);

} // namespace rqc
