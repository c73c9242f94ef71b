#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "rqc/geometry.hpp"

namespace rqc {

/// Point of the extended real line in homogeneous coordinates x/y (y = 0 is infinity).
struct ProjectiveReal {
    double x = 0.0;
    double y = 1.0;

    static ProjectiveReal from(double v)
    {
        if (std::isinf(v)) return {1.0, 0.0};
        return {v, 1.0};
    }
    double value() const
    {
        return y == 0.0 ? std::numeric_limits<double>::infinity() : x / y;
    }
};

/// Möbius transformation z -> (a z + b) / (c z + d).
struct Mobius {
    Complex a{1}, b{0}, c{0}, d{1};

    Complex operator()(Complex z) const { return (a * z + b) / (c * z + d); }
    Complex derivative(Complex z) const
    {
        Complex den = c * z + d;
        return det() / (den * den);
    }
    Complex det() const { return a * d - b * c; }
    Mobius inverse() const { return {d, -b, -c, a}; }
    /// (*this) after `inner`.
    Mobius compose(const Mobius& inner) const
    {
        return {a * inner.a + b * inner.c, a * inner.b + b * inner.d,
                c * inner.a + d * inner.c, c * inner.b + d * inner.d};
    }
    /// Image of a projective real (returns a projective complex pair).
    std::array<Complex, 2> apply(ProjectiveReal p) const
    {
        return {a * p.x + b * p.y, c * p.x + d * p.y};
    }
};

/// Real Möbius map sending p0 -> q0, p1 -> q1, p2 -> q2.
Mobius real_mobius_through(std::array<ProjectiveReal, 3> p, std::array<ProjectiveReal, 3> q);

/// Boundary coordinate of the equator point at angle theta: cos t / (1 - sin t),
/// so 0 -> 1, pi/2 -> infinity, pi -> -1, 3pi/2 -> 0.
double boundary_coordinate(double theta);
ProjectiveReal boundary_coordinate_projective(double theta);

/// (a, b; c, d) = (a - c)(b - d) / ((a - d)(b - c)), infinity handled projectively.
/// Throws PreconditionError if two points coincide or the value is not in (1, inf).
double cross_ratio(double a, double b, double c, double d);
double cross_ratio(ProjectiveReal a, ProjectiveReal b, ProjectiveReal c, ProjectiveReal d);

/// Complete elliptic integral of the first kind K(k), k the modulus.
double elliptic_K(double k);

struct Jacobi {
    Complex sn, cn, dn;
};

/// Jacobi elliptic functions of a complex argument (modulus k in (0, 1)),
/// assembled from real-argument values by the addition theorems. Accurate for
/// |Im v| <= K'/2; callers shift by iK' beyond that.
Jacobi jacobi(Complex v, double k);

/// Cell labels of the checkerboard net: vertex (i, j) of the integer lattice.
int vertex_label(long long i, long long j);
/// Cell (cx, cy) = [cx a, (cx+1) a] x [cy b, (cy+1) b] maps to the upper hemisphere.
inline bool upper_cell(long long cx, long long cy) { return ((cx + cy) % 2 + 2) % 2 == 1; }

/// Value and derivative of the conformal chain cell -> hemisphere -> unit disk.
struct DiskPoint {
    Complex u;      ///< disk coordinate
    Complex du;     ///< d u / d z
    bool upper;     ///< hemisphere of the cell containing z
    double angle;   ///< boundary angle coordinate of u (arg u upper, -arg u lower)
};

/// Doubly periodic map of the plane onto the sphere sending each a x b cell
/// conformally onto a hemisphere, corners of label i going to the boundary
/// point at angle m_i. Built from sn on the rectangle [-K, K] x [0, K'] and a
/// real Möbius map fixed by three corner images; the fourth fixes the modulus.
class EllipticBaseMap {
public:
    EllipticBaseMap(std::array<double, 4> anchors, std::array<double, 4> midpoints,
                    double cell_width);

    double cell_width() const { return a_; }
    double cell_height() const { return b_; }
    double modulus() const { return k_; }
    const std::array<double, 4>& anchors() const { return theta_; }
    const std::array<double, 4>& midpoints() const { return mid_; }

    /// Hemisphere coordinate zeta = ℘(z) as a homogeneous pair (second entry 0 at poles).
    std::array<Complex, 2> value_projective(Point z) const;
    /// ℘(z); infinite components at poles.
    Complex value(Point z) const;
    /// ℘'(z); infinite at poles.
    Complex derivative(Point z) const;

    /// Disk-chart point for z, using the chart of the cell given by (cx, cy)
    /// (z may lie on or slightly outside that cell's boundary).
    DiskPoint disk(Point z, long long cx, long long cy) const;
    /// Same, with the cell located from z.
    DiskPoint disk(Point z) const;

    std::pair<long long, long long> cell_of(Point z) const;

    /// Disk chart of the upper hemisphere, (1 + i zeta) / (zeta + i); the lower
    /// hemisphere uses (1 - i zeta) / (zeta - i).
    static Mobius chart(bool upper);

private:
    struct SnValue {
        bool inverted;  ///< true: q = 1/sn, else q = sn
        Complex q;
        Complex dq;     ///< derivative with respect to z
    };
    SnValue sn_value(Point z) const;

    std::array<double, 4> theta_{};
    std::array<double, 4> mid_{};
    double a_ = 1.0, b_ = 1.0, k_ = 0.5, K_ = 0.0, Kp_ = 0.0, scale_ = 1.0;
    Mobius m_;      ///< sn value -> zeta
    Mobius m_inv_;  ///< 1/sn value -> zeta
};

/// Validates anchors (strictly increasing mod 2 pi, spanning less than 2 pi)
/// and returns them reduced so that theta_0 in [0, 2 pi) and the others
/// increase within theta_0 + 2 pi.
std::array<double, 4> normalize_anchors(std::array<double, 4> anchors);
/// Arc midpoints m_i of C_i = (theta_i, theta_{i+1}).
std::array<double, 4> arc_midpoints(const std::array<double, 4>& anchors);

} // namespace rqc
