#include "rqc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rqc/errors.hpp"

namespace rqc {

Rect Rect::united(const Rect& o) const
{
    if (empty()) return o;
    if (o.empty()) return *this;
    return {std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1), std::max(y1, o.y1)};
}

double Rect::distance_to(Point p) const
{
    double dx = std::max({x0 - p.real(), 0.0, p.real() - x1});
    double dy = std::max({y0 - p.imag(), 0.0, p.imag() - y1});
    return std::hypot(dx, dy);
}

double Rect::distance_to(const Rect& o) const
{
    double dx = std::max({x0 - o.x1, 0.0, o.x0 - x1});
    double dy = std::max({y0 - o.y1, 0.0, o.y0 - y1});
    return std::hypot(dx, dy);
}

double signed_area(std::span<const Point> ring)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        Point a = ring[i];
        Point b = ring[(i + 1) % ring.size()];
        acc += a.real() * b.imag() - b.real() * a.imag();
    }
    return 0.5 * acc;
}

double segment_point_distance(Point a, Point b, Point p)
{
    Point ab = b - a;
    double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(p - a);
    double t = ((p - a) * std::conj(ab)).real() / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

namespace {

double cross(Point u, Point v) { return u.real() * v.imag() - u.imag() * v.real(); }

bool segments_intersect(Point a, Point b, Point c, Point d)
{
    double d1 = cross(b - a, c - a);
    double d2 = cross(b - a, d - a);
    double d3 = cross(d - c, a - c);
    double d4 = cross(d - c, b - c);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
           ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

} // namespace

double segment_segment_distance(Point a, Point b, Point c, Point d)
{
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min({segment_point_distance(c, d, a), segment_point_distance(c, d, b),
                     segment_point_distance(a, b, c), segment_point_distance(a, b, d)});
}

Polygon::Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices))
{
    require(vertices_.size() >= 3, "polygon needs at least three vertices");
    if (signed_area(vertices_) < 0) {
        std::reverse(vertices_.begin(), vertices_.end());
    }
    bounds_ = {vertices_[0].real(), vertices_[0].imag(), vertices_[0].real(), vertices_[0].imag()};
    for (Point p : vertices_) {
        bounds_.x0 = std::min(bounds_.x0, p.real());
        bounds_.y0 = std::min(bounds_.y0, p.imag());
        bounds_.x1 = std::max(bounds_.x1, p.real());
        bounds_.y1 = std::max(bounds_.y1, p.imag());
    }
    if (vertices_.size() == 4) {
        axis_rect_ = true;
        for (std::size_t i = 0; i < 4; ++i) {
            Point e = vertices_[(i + 1) % 4] - vertices_[i];
            if (e.real() != 0.0 && e.imag() != 0.0) axis_rect_ = false;
        }
    }
}

double Polygon::area() const { return signed_area(vertices_); }

Point Polygon::centroid() const
{
    double a = 0.0;
    Point c{0.0, 0.0};
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        Point p = vertices_[i];
        Point q = vertices_[(i + 1) % vertices_.size()];
        double w = cross(p, q);
        a += w;
        c += (p + q) * w;
    }
    return c / (3.0 * a);
}

double Polygon::boundary_distance(Point p) const
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        best = std::min(best,
                        segment_point_distance(vertices_[i], vertices_[(i + 1) % vertices_.size()], p));
    }
    return best;
}

bool Polygon::contains(Point p, double tol) const
{
    if (!bounds_.contains(p, tol)) return false;
    if (axis_rect_) return true;
    bool inside = false;
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        Point a = vertices_[i];
        Point b = vertices_[j];
        if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
            double x = a.real() + (p.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
            if (p.real() < x) inside = !inside;
        }
    }
    return inside || boundary_distance(p) <= tol;
}

double Polygon::distance_to(Point p) const
{
    if (axis_rect_) return bounds_.distance_to(p);
    if (contains(p, 0.0)) return 0.0;
    return boundary_distance(p);
}

double Polygon::distance_to(const Polygon& other) const
{
    if (axis_rect_ && other.axis_rect_) return bounds_.distance_to(other.bounds_);
    if (contains(other.vertices_[0], 0.0) || other.contains(vertices_[0], 0.0)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = vertices_.size();
    const std::size_t m = other.vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        Point a = vertices_[i];
        Point b = vertices_[(i + 1) % n];
        for (std::size_t j = 0; j < m; ++j) {
            best = std::min(best, segment_segment_distance(a, b, other.vertices_[j],
                                                           other.vertices_[(j + 1) % m]));
            if (best == 0.0) return 0.0;
        }
    }
    return best;
}

Polygon Polygon::translated(Point d) const
{
    std::vector<Point> v(vertices_.begin(), vertices_.end());
    for (Point& p : v) p += d;
    return Polygon(std::move(v));
}

} // namespace rqc
