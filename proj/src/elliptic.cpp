#include "rqc/elliptic.hpp"

#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>
#include <numbers>

#include "rqc/errors.hpp"

namespace rqc {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double bracket(ProjectiveReal p, ProjectiveReal q) { return p.x * q.y - p.y * q.x; }

double normalized_bracket(ProjectiveReal p, ProjectiveReal q)
{
    return bracket(p, q) / (std::hypot(p.x, p.y) * std::hypot(q.x, q.y));
}

// Matrix sending infinity -> p0, 0 -> p1, 1 -> p2.
Mobius frame(const std::array<ProjectiveReal, 3>& p)
{
    double det = bracket(p[0], p[1]);
    if (std::abs(normalized_bracket(p[0], p[1])) < 1e-14) {
        throw PreconditionError("Möbius through coincident points");
    }
    double alpha = bracket(p[2], p[1]) / det;
    double beta = bracket(p[0], p[2]) / det;
    return {alpha * p[0].x, beta * p[1].x, alpha * p[0].y, beta * p[1].y};
}

double reduce(double x, double period)
{
    double r = std::fmod(x, period);
    if (r < 0) r += period;
    return r;
}

} // namespace

Mobius real_mobius_through(std::array<ProjectiveReal, 3> p, std::array<ProjectiveReal, 3> q)
{
    return frame(q).compose(frame(p).inverse());
}

ProjectiveReal boundary_coordinate_projective(double theta)
{
    double s = std::sin(theta);
    double c = std::cos(theta);
    if (s > 0) return {1.0 + s, c};
    return {c, 1.0 - s};
}

double boundary_coordinate(double theta)
{
    auto p = boundary_coordinate_projective(theta);
    // cos(pi/2) rounds to ~6e-17; treat that as the pole.
    if (std::abs(p.y) <= 1e-15 * std::abs(p.x)) return std::numeric_limits<double>::infinity();
    return p.x / p.y;
}

double cross_ratio(ProjectiveReal a, ProjectiveReal b, ProjectiveReal c, ProjectiveReal d)
{
    const std::array<ProjectiveReal, 4> pts{a, b, c, d};
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            if (std::abs(normalized_bracket(pts[i], pts[j])) < 1e-14) {
                throw PreconditionError("cross ratio of coincident points");
            }
        }
    }
    double value = bracket(a, c) * bracket(b, d) / (bracket(a, d) * bracket(b, c));
    if (!(value > 1.0)) {
        throw PreconditionError("cross ratio points are not in cyclic order");
    }
    return value;
}

double cross_ratio(double a, double b, double c, double d)
{
    return cross_ratio(ProjectiveReal::from(a), ProjectiveReal::from(b), ProjectiveReal::from(c),
                       ProjectiveReal::from(d));
}

double elliptic_K(double k)
{
    require(k >= 0.0 && k < 1.0, "elliptic modulus must lie in [0, 1)");
    return boost::math::ellint_1(k);
}

Jacobi jacobi(Complex v, double k)
{
    double kp = std::sqrt((1.0 - k) * (1.0 + k));
    double c = 0, d = 0, c1 = 0, d1 = 0;
    double s = boost::math::jacobi_elliptic(k, v.real(), &c, &d);
    double s1 = boost::math::jacobi_elliptic(kp, v.imag(), &c1, &d1);
    double den = c1 * c1 + k * k * s * s * s1 * s1;
    return {Complex(s * d1, c * d * s1 * c1) / den, Complex(c * c1, -s * d * s1 * d1) / den,
            Complex(d * c1 * d1, -k * k * s * c * s1) / den};
}

int vertex_label(long long i, long long j)
{
    bool ti = ((i % 2) + 2) % 2 == 1;
    bool tj = ((j % 2) + 2) % 2 == 1;
    if (ti && tj) return 2;
    if (ti) return 3;
    if (tj) return 1;
    return 4;
}

std::array<double, 4> normalize_anchors(std::array<double, 4> anchors)
{
    for (double t : anchors) require(std::isfinite(t), "anchor angles must be finite");
    anchors[0] = reduce(anchors[0], two_pi);
    for (int i = 1; i < 4; ++i) {
        anchors[i] = anchors[i - 1] + reduce(anchors[i] - anchors[i - 1], two_pi);
        require(anchors[i] > anchors[i - 1], "anchor angles must be distinct");
    }
    require(anchors[3] < anchors[0] + two_pi, "anchor angles are not cyclically ordered");
    return anchors;
}

std::array<double, 4> arc_midpoints(const std::array<double, 4>& anchors)
{
    auto t = normalize_anchors(anchors);
    std::array<double, 4> m{};
    for (int i = 0; i < 4; ++i) {
        double next = i < 3 ? t[i + 1] : t[0] + two_pi;
        m[i] = 0.5 * (t[i] + next);
    }
    return m;
}

EllipticBaseMap::EllipticBaseMap(std::array<double, 4> anchors, std::array<double, 4> midpoints,
                                 double cell_width)
    : theta_(normalize_anchors(anchors)), a_(cell_width)
{
    require(cell_width > 0 && std::isfinite(cell_width), "cell width must be positive");
    for (int i = 0; i < 4; ++i) {
        double lo = theta_[i];
        double hi = i < 3 ? theta_[i + 1] : theta_[0] + two_pi;
        double m = lo + reduce(midpoints[i] - lo, two_pi);
        require(m > lo && m < hi, "corner angle m_i must lie inside its arc C_i");
        mid_[i] = m;
    }
    std::array<ProjectiveReal, 4> t{};
    for (int i = 0; i < 4; ++i) t[i] = boundary_coordinate_projective(mid_[i]);

    // Corners of the reference cell carry labels 3, 4, 1, 2 counterclockwise and
    // sn sends them to -1, 1, 1/k, -1/k; both quadruples share one cross ratio.
    double cr = cross_ratio(t[2], t[3], t[0], t[1]);
    double root = std::sqrt(cr);
    k_ = (root - 1.0) / (root + 1.0);
    K_ = elliptic_K(k_);
    Kp_ = elliptic_K(std::sqrt((1.0 - k_) * (1.0 + k_)));
    scale_ = a_ / (2.0 * K_);
    b_ = scale_ * Kp_;

    m_ = real_mobius_through({ProjectiveReal{-1.0, 1.0}, {1.0, 1.0}, {1.0, k_}},
                             {t[2], t[3], t[0]});
    m_inv_ = m_.compose(Mobius{0.0, 1.0, 1.0, 0.0});
    if (!(m_.det().real() > 0)) {
        throw NumericalError("elliptic base map reverses orientation");
    }
    auto fourth = m_.apply(ProjectiveReal{-1.0, k_});
    double miss = std::abs(fourth[0] * t[1].y - fourth[1] * t[1].x) /
                  (std::abs(fourth[0]) + std::abs(fourth[1])) / std::hypot(t[1].x, t[1].y);
    if (miss > 1e-9) {
        throw NumericalError("elliptic base map misses the fourth corner");
    }
}

std::pair<long long, long long> EllipticBaseMap::cell_of(Point z) const
{
    return {static_cast<long long>(std::floor(z.real() / a_)),
            static_cast<long long>(std::floor(z.imag() / b_))};
}

EllipticBaseMap::SnValue EllipticBaseMap::sn_value(Point z) const
{
    Complex v = (z - Complex(1.5 * a_, 0.0)) / scale_;
    double x = reduce(v.real() + 2.0 * K_, 4.0 * K_) - 2.0 * K_;
    double y = reduce(v.imag() + Kp_, 2.0 * Kp_) - Kp_;
    if (std::abs(y) <= 0.5 * Kp_) {
        auto j = jacobi({x, y}, k_);
        return {false, j.sn, j.cn * j.dn / scale_};
    }
    double shifted = y > 0 ? y - Kp_ : y + Kp_;
    auto j = jacobi({x, shifted}, k_);
    return {true, k_ * j.sn, k_ * j.cn * j.dn / scale_};
}

std::array<Complex, 2> EllipticBaseMap::value_projective(Point z) const
{
    auto s = sn_value(z);
    const Mobius& m = s.inverted ? m_inv_ : m_;
    return {m.a * s.q + m.b, m.c * s.q + m.d};
}

Complex EllipticBaseMap::value(Point z) const
{
    auto p = value_projective(z);
    if (p[1] == Complex(0.0)) {
        double inf = std::numeric_limits<double>::infinity();
        return {inf, inf};
    }
    return p[0] / p[1];
}

Complex EllipticBaseMap::derivative(Point z) const
{
    auto s = sn_value(z);
    const Mobius& m = s.inverted ? m_inv_ : m_;
    return m.derivative(s.q) * s.dq;
}

Mobius EllipticBaseMap::chart(bool upper)
{
    const Complex i(0.0, 1.0);
    if (upper) return {i, 1.0, 1.0, i};
    return {-i, 1.0, 1.0, -i};
}

DiskPoint EllipticBaseMap::disk(Point z, long long cx, long long cy) const
{
    bool upper = upper_cell(cx, cy);
    auto s = sn_value(z);
    Mobius n = chart(upper).compose(s.inverted ? m_inv_ : m_);
    Complex u = n(s.q);
    Complex du = n.derivative(s.q) * s.dq;
    double angle = upper ? std::arg(u) : -std::arg(u);
    return {u, du, upper, angle};
}

DiskPoint EllipticBaseMap::disk(Point z) const
{
    auto [cx, cy] = cell_of(z);
    return disk(z, cx, cy);
}

} // namespace rqc
