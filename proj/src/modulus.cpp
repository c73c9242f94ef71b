#include "rqc/modulus.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rqc/errors.hpp"
#include "rqc/rng.hpp"

namespace rqc {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
// free unknowns up to which a sparse Cholesky factorization is used instead of CG
constexpr int direct_limit = 400000;

struct Mesh {
    std::vector<Point> nodes;
    std::vector<std::array<int, 4>> elements;  // counterclockwise
    std::vector<double> fixed;                 // NaN for free nodes
};

struct Solve {
    double energy = 0.0;
    int iterations = 0;
};

using Stiffness = std::array<std::array<double, 4>, 4>;

Stiffness element_stiffness(const std::array<Point, 4>& p, const Tensor2& A)
{
    static const double g = 0.5 / std::sqrt(3.0);
    static const double q[2] = {0.5 - g, 0.5 + g};
    Stiffness K{};
    for (double xi : q) {
        for (double eta : q) {
            const double dxi[4] = {-(1 - eta), 1 - eta, eta, -eta};
            const double deta[4] = {-(1 - xi), -xi, xi, 1 - xi};
            double j11 = 0, j12 = 0, j21 = 0, j22 = 0;
            for (int i = 0; i < 4; ++i) {
                j11 += p[i].real() * dxi[i];
                j12 += p[i].real() * deta[i];
                j21 += p[i].imag() * dxi[i];
                j22 += p[i].imag() * deta[i];
            }
            double det = j11 * j22 - j12 * j21;
            if (!(det > 0)) throw PreconditionError("degenerate or inverted element");
            // physical gradient = J^{-T} reference gradient
            double gx[4], gy[4];
            for (int i = 0; i < 4; ++i) {
                gx[i] = (j22 * dxi[i] - j21 * deta[i]) / det;
                gy[i] = (-j12 * dxi[i] + j11 * deta[i]) / det;
            }
            double w = 0.25 * det;
            for (int a = 0; a < 4; ++a) {
                double fx = A.xx * gx[a] + A.xy * gy[a];
                double fy = A.xy * gx[a] + A.yy * gy[a];
                for (int b = 0; b < 4; ++b) K[a][b] += w * (fx * gx[b] + fy * gy[b]);
            }
        }
    }
    return K;
}

Solve solve_dirichlet(const Mesh& mesh, const ConductivityField* conductivity, double tolerance)
{
    const std::size_t n = mesh.nodes.size();
    std::vector<int> free_index(n, -1);
    int nfree = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (std::isnan(mesh.fixed[i])) free_index[i] = nfree++;

    std::vector<Stiffness> Ks;
    Ks.reserve(mesh.elements.size());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.elements.size() * 16);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nfree);
    const Tensor2 identity{};
    for (const auto& e : mesh.elements) {
        std::array<Point, 4> p{mesh.nodes[e[0]], mesh.nodes[e[1]], mesh.nodes[e[2]], mesh.nodes[e[3]]};
        Point c = 0.25 * (p[0] + p[1] + p[2] + p[3]);
        const Tensor2& A = conductivity ? conductivity->at(c) : identity;
        Ks.push_back(element_stiffness(p, A));
        const auto& K = Ks.back();
        for (int a = 0; a < 4; ++a) {
            int fa = free_index[e[a]];
            if (fa < 0) continue;
            for (int b = 0; b < 4; ++b) {
                int fb = free_index[e[b]];
                if (fb >= 0) {
                    trip.emplace_back(fa, fb, K[a][b]);
                } else {
                    rhs[fa] -= K[a][b] * mesh.fixed[e[b]];
                }
            }
        }
    }
    Eigen::SparseMatrix<double> M(nfree, nfree);
    M.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd x;
    int iterations = 0;
    if (nfree <= direct_limit) {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(M);
        if (ldlt.info() != Eigen::Success) throw NumericalError("sparse factorization failed");
        x = ldlt.solve(rhs);
        if (ldlt.info() != Eigen::Success || !x.allFinite()) throw NumericalError("sparse solve failed");
    } else {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                 Eigen::IncompleteCholesky<double>>
            cg;
        cg.setTolerance(tolerance);
        cg.setMaxIterations(std::max(1000, 4 * nfree));
        cg.compute(M);
        if (cg.info() != Eigen::Success) throw NumericalError("preconditioner factorization failed");
        x = cg.solve(rhs);
        if (cg.info() != Eigen::Success) throw NumericalError("conjugate gradient did not converge");
        iterations = static_cast<int>(cg.iterations());
    }

    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = free_index[i] >= 0 ? x[free_index[i]] : mesh.fixed[i];
    double energy = 0;
    for (std::size_t k = 0; k < mesh.elements.size(); ++k) {
        const auto& e = mesh.elements[k];
        const auto& K = Ks[k];
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) energy += u[e[a]] * K[a][b] * u[e[b]];
    }
    if (!(energy > 0) || !std::isfinite(energy)) throw NumericalError("nonpositive Dirichlet energy");
    return {energy, iterations};
}

Mesh quad_mesh(const Quadrilateral& quad, int resolution)
{
    const auto& c = quad.corners;
    double len_xi = 0.5 * (std::abs(c[1] - c[0]) + std::abs(c[2] - c[3]));
    double len_eta = 0.5 * (std::abs(c[3] - c[0]) + std::abs(c[2] - c[1]));
    double shortest = std::min(len_xi, len_eta);
    int nx = static_cast<int>(std::ceil(resolution * len_xi / shortest - 1e-9));
    int ny = static_cast<int>(std::ceil(resolution * len_eta / shortest - 1e-9));
    Mesh m;
    m.nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j) {
        double eta = static_cast<double>(j) / ny;
        for (int i = 0; i <= nx; ++i) {
            double xi = static_cast<double>(i) / nx;
            m.nodes.push_back((1 - xi) * (1 - eta) * c[0] + xi * (1 - eta) * c[1] + xi * eta * c[2] +
                              (1 - xi) * eta * c[3]);
            double v = std::nan("");
            if (quad.marking == Marking::vertical) {
                if (i == 0) v = 0;
                if (i == nx) v = 1;
            } else {
                if (j == 0) v = 0;
                if (j == ny) v = 1;
            }
            m.fixed.push_back(v);
        }
    }
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            int a = j * (nx + 1) + i;
            m.elements.push_back({a, a + 1, a + nx + 2, a + nx + 1});
        }
    }
    return m;
}

Mesh annulus_mesh(const Annulus& an, int resolution)
{
    double logr = std::log(an.ratio);
    int ns, nt;
    if (logr < two_pi) {
        ns = resolution;
        nt = static_cast<int>(std::ceil(two_pi * resolution / logr));
    } else {
        nt = resolution;
        ns = static_cast<int>(std::ceil(resolution * logr / two_pi));
    }
    nt = (nt + 7) / 8 * 8;
    Mesh m;
    for (int s = 0; s <= ns; ++s) {
        double scale = std::pow(an.ratio, static_cast<double>(s) / ns);
        for (int t = 0; t < nt; ++t) {
            m.nodes.push_back(an.center + scale * an.shape(static_cast<double>(t) / nt));
            m.fixed.push_back(s == 0 ? 0.0 : (s == ns ? 1.0 : std::nan("")));
        }
    }
    for (int s = 0; s < ns; ++s) {
        for (int t = 0; t < nt; ++t) {
            int t1 = (t + 1) % nt;
            // outward in s then counterclockwise in t keeps the orientation positive
            m.elements.push_back({s * nt + t, (s + 1) * nt + t, (s + 1) * nt + t1, s * nt + t1});
        }
    }
    return m;
}

ModulusResult refine(const std::function<Solve(int)>& solve, const ModulusOptions& options,
                     const std::function<double(double)>& convention)
{
    require(options.resolution >= 4, "modulus resolution too coarse");
    ModulusResult r;
    auto s = solve(options.resolution);
    r.value = r.coarse = r.extrapolated = convention(s.energy);
    r.resolution = options.resolution;
    r.iterations = s.iterations;
    if (options.richardson) {
        auto f = solve(2 * options.resolution);
        r.coarse = r.value;
        r.value = convention(f.energy);
        r.resolution = 2 * options.resolution;
        r.iterations += f.iterations;
        r.error_estimate = std::abs(r.value - r.coarse);
        r.extrapolated = r.value + (r.value - r.coarse) / 3.0;
    }
    return r;
}

} // namespace

Quadrilateral Quadrilateral::rectangle(const Rect& r, Marking m)
{
    return {{Point(r.x0, r.y0), Point(r.x1, r.y0), Point(r.x1, r.y1), Point(r.x0, r.y1)}, m};
}

void Quadrilateral::validate() const
{
    for (int i = 0; i < 4; ++i) {
        Point a = corners[i], b = corners[(i + 1) % 4], c = corners[(i + 2) % 4];
        if (!(std::abs(b - a) > 0)) throw PreconditionError("degenerate quadrilateral side");
        double cross = ((b - a) * std::conj(c - b)).imag();
        if (!(cross < 0)) throw PreconditionError("quadrilateral must be convex and counterclockwise");
    }
}

const Tensor2& ConductivityField::at(Point p) const
{
    const double L = grid.half_width, h = grid.spacing();
    if (!(p.real() >= -L && p.real() <= L && p.imag() >= -L && p.imag() <= L)) {
        throw PreconditionError("point outside the conductivity domain");
    }
    int ix = std::clamp(static_cast<int>(std::lround((p.real() + L) / h)), 0, grid.n - 1);
    int iy = std::clamp(static_cast<int>(std::lround((p.imag() + L) / h)), 0, grid.n - 1);
    return values[grid.index(ix, iy)];
}

void ConductivityField::validate() const
{
    if (values.size() != grid.size()) throw PreconditionError("conductivity size mismatch");
    for (const auto& A : values) {
        if (!(A.xx > 0 && A.det() > 0)) throw PreconditionError("conductivity not positive definite");
    }
}

Tensor2 conductivity_tensor(Complex mu)
{
    double m2 = std::norm(mu);
    if (!(m2 < 1)) throw PreconditionError("|mu| must be < 1 for a conductivity");
    double s = 1.0 / (1.0 - m2);
    return {std::norm(1.0 - mu) * s, -2.0 * mu.imag() * s, std::norm(1.0 + mu) * s};
}

ConductivityField conductivity_from_beltrami(const BeltramiField& field)
{
    ConductivityField c;
    c.grid = field.grid;
    c.values.reserve(field.samples.size());
    for (Complex mu : field.samples) c.values.push_back(conductivity_tensor(mu));
    return c;
}

double modulus_euclidean_rectangle(double width, double height, Marking marking)
{
    require(width > 0 && height > 0, "rectangle sides must be positive");
    return marking == Marking::vertical ? height / width : width / height;
}

ModulusResult modulus_discrete(const Quadrilateral& quad, const ConductivityField* conductivity,
                               const ModulusOptions& options)
{
    quad.validate();
    // the quadrilateral modulus is the Dirichlet energy of the potential that is
    // 0 and 1 on the marked sides (b / a for an a x b rectangle, vertical marking)
    return refine([&](int res) { return solve_dirichlet(quad_mesh(quad, res), conductivity, options.tolerance); },
                  options, [](double e) { return e; });
}

Annulus Annulus::circular(Point center, double r, double R)
{
    require(r > 0 && R > r, "annulus radii must satisfy 0 < r < R");
    return {center, [r](double t) { return std::polar(r, two_pi * t); }, R / r};
}

Annulus Annulus::square(Point center, double a, double b)
{
    require(a > 0 && b > a, "square frame needs 0 < a < b");
    auto shape = [a](double t) {
        // corners at t = 1/8 + k/4, linear along each side
        double u = std::fmod(t + 1.0 / 8.0, 1.0) * 4.0;
        int side = std::min(3, static_cast<int>(u));
        double f = u - side;  // 0..1 along the side
        static const Point corner[4] = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
        Point p = corner[side] + f * (corner[(side + 1) % 4] - corner[side]);
        return a * p;
    };
    return {center, shape, b / a};
}

double Annulus::outer_extent() const
{
    double m = 0;
    for (int k = 0; k < 64; ++k) {
        Point p = ratio * shape(k / 64.0);
        m = std::max({m, std::abs(p.real()), std::abs(p.imag())});
    }
    return m;
}

ModulusResult modulus_annulus_discrete(const Annulus& annulus, const ConductivityField* conductivity,
                                       const ModulusOptions& options)
{
    require(annulus.ratio > 1, "annulus ratio must exceed 1");
    // extremal length of the joining family is the reciprocal Dirichlet energy
    return refine([&](int res) { return solve_dirichlet(annulus_mesh(annulus, res), conductivity, options.tolerance); },
                  options, [](double e) { return 1.0 / e; });
}

std::vector<Rect> random_rectangles(double N, int count, double side_floor, double max_side,
                                    std::uint64_t seed)
{
    require(side_floor > 0 && max_side >= side_floor, "invalid rectangle side range");
    require(max_side * std::sqrt(2.0) < 2 * N, "rectangles cannot fit in B(0, N)");
    std::vector<Rect> out;
    for (int k = 0; k < count; ++k) {
        KeyedRng rng(seed, Stream::rectangles, k);
        while (true) {
            double w = rng.uniform(side_floor, max_side), h = rng.uniform(side_floor, max_side);
            Point c(rng.uniform(-N, N), rng.uniform(-N, N));
            Rect r{c.real() - w / 2, c.imag() - h / 2, c.real() + w / 2, c.imag() + h / 2};
            bool inside = true;
            for (Point p : {Point(r.x0, r.y0), Point(r.x1, r.y0), Point(r.x1, r.y1), Point(r.x0, r.y1)})
                inside = inside && std::abs(p) <= N;
            if (inside) {
                out.push_back(r);
                break;
            }
        }
    }
    return out;
}

RoughQcReport rough_qc_report(const BeltramiField& field, const std::vector<Rect>& rectangles,
                              double side_floor, const ModulusOptions& options)
{
    for (const auto& r : rectangles) {
        if (!(std::min(r.width(), r.height()) >= side_floor)) {
            throw PreconditionError("rectangle side below the floor");
        }
    }
    auto A = conductivity_from_beltrami(field);
    RoughQcReport rep;
    rep.side_floor = side_floor;
    for (const auto& r : rectangles) {
        for (Marking m : {Marking::vertical, Marking::horizontal}) {
            RectangleRatio row;
            row.rect = r;
            row.marking = m;
            row.euclidean = modulus_euclidean_rectangle(r.width(), r.height(), m);
            row.intrinsic = modulus_discrete(Quadrilateral::rectangle(r, m), &A, options).value;
            row.ratio = row.intrinsic / row.euclidean;
            rep.empirical_K = std::max({rep.empirical_K, row.ratio, 1.0 / row.ratio});
            rep.rows.push_back(row);
        }
    }
    return rep;
}

AnnulusChain annulus_chain_diagnostic(const BeltramiField& field, double N, int depth,
                                      const ModulusOptions& options)
{
    require(depth >= 1, "chain depth must be at least 1");
    require(N > 0, "base size must be positive");
    if (std::ldexp(N, depth) > field.grid.half_width) {
        throw PreconditionError("field domain does not cover the largest ring");
    }
    auto A = conductivity_from_beltrami(field);
    AnnulusChain chain;
    chain.N = N;
    double sum = 0;
    for (int k = 0; k < depth; ++k) {
        double a = std::ldexp(N, k);
        auto ring = Annulus::square(0.0, a, 2 * a);
        chain.inner.push_back(a);
        chain.euclidean.push_back(modulus_annulus_discrete(ring, nullptr, options).value);
        double img = modulus_annulus_discrete(ring, &A, options).value;
        chain.image.push_back(img);
        sum += img;
        chain.running_sum.push_back(sum);
    }
    return chain;
}

} // namespace rqc
