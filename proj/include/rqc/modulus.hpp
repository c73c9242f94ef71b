#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rqc/beltrami.hpp"
#include "rqc/geometry.hpp"
#include "rqc/grid.hpp"

namespace rqc {

/// Which pair of opposite sides the curve family connects. For corners
/// c0..c3 (counterclockwise, c0 bottom-left for a rectangle) `vertical` marks the
/// sides c1c2 and c3c0, `horizontal` the sides c0c1 and c2c3.
enum class Marking { vertical, horizontal };

/// Quadrilateral with straight sides between four corners in counterclockwise order.
struct Quadrilateral {
    std::array<Point, 4> corners;
    Marking marking = Marking::vertical;

    static Quadrilateral rectangle(const Rect& r, Marking m);
    void validate() const;
};

/// Symmetric positive definite 2x2 matrix per grid node.
struct Tensor2 {
    double xx = 1.0, xy = 0.0, yy = 1.0;
    double det() const { return xx * yy - xy * xy; }
};

struct ConductivityField {
    GridSpec grid;
    std::vector<Tensor2> values;

    /// Value at the nearest node; throws outside the grid domain.
    const Tensor2& at(Point p) const;
    void validate() const;
};

/// A = [[|1 - mu|^2, -2 Im mu], [-2 Im mu, |1 + mu|^2]] / (1 - |mu|^2), the metric
/// in which harmonic functions are those of the conformal structure of mu.
Tensor2 conductivity_tensor(Complex mu);
ConductivityField conductivity_from_beltrami(const BeltramiField& field);

/// Closed form: vertical marking b / a, horizontal a / b.
double modulus_euclidean_rectangle(double width, double height, Marking marking);

struct ModulusOptions {
    int resolution = 32;      ///< elements across the shorter direction
    bool richardson = true;   ///< also solve at twice the resolution
    double tolerance = 1e-11; ///< relative CG residual
};

struct ModulusResult {
    double value = 0.0;       ///< finest resolution
    double coarse = 0.0;      ///< previous resolution (== value without refinement)
    double extrapolated = 0.0;    ///< second-order Richardson value
    double error_estimate = 0.0;  ///< |fine - coarse|: bounds the fine error for any order >= 1
    int resolution = 0;
    int iterations = 0;
};

/// Modulus of the quadrilateral (reciprocal extremal length of the family joining
/// the marked sides) in the conformal structure given by the conductivity; the
/// Euclidean structure when `conductivity` is null.
ModulusResult modulus_discrete(const Quadrilateral& quad, const ConductivityField* conductivity,
                               const ModulusOptions& options = {});

/// Ring domain between two homothetic star-shaped curves: inner(t) and
/// outer(t) = ratio * inner(t) about `center` for t in [0, 1).
struct Annulus {
    Point center = 0.0;
    std::function<Point(double)> shape;  ///< inner boundary offset from center
    double ratio = 2.0;

    static Annulus circular(Point center, double r, double R);
    /// Square frame between the squares of half-sides a < b.
    static Annulus square(Point center, double a, double b);
    double outer_extent() const;  ///< max |outer(t) - center| in the sup norm
};

/// Extremal length of the family joining the two boundary components (the
/// annulus convention: (1/2pi) log(R/r) for round annuli).
ModulusResult modulus_annulus_discrete(const Annulus& annulus, const ConductivityField* conductivity,
                                       const ModulusOptions& options = {});

struct RectangleRatio {
    Rect rect;
    Marking marking = Marking::vertical;
    double euclidean = 0.0;
    double intrinsic = 0.0;
    double ratio = 0.0;
};

struct RoughQcReport {
    double empirical_K = 1.0;
    double side_floor = 0.0;
    std::vector<RectangleRatio> rows;
};

/// Random axis-parallel rectangles inside B(0, N) with both sides in
/// [side_floor, max_side].
std::vector<Rect> random_rectangles(double N, int count, double side_floor, double max_side,
                                    std::uint64_t seed);

RoughQcReport rough_qc_report(const BeltramiField& field, const std::vector<Rect>& rectangles,
                              double side_floor, const ModulusOptions& options = {.resolution = 24, .richardson = false});

struct AnnulusChain {
    double N = 0.0;
    std::vector<double> inner;      ///< half-side of the inner square of each ring
    std::vector<double> euclidean;  ///< ring extremal lengths for mu = 0
    std::vector<double> image;      ///< ring extremal lengths in the structure of mu
    std::vector<double> running_sum;
};

/// Square rings Q(2^k N, 2^{k+1} N), k < depth, about the origin.
AnnulusChain annulus_chain_diagnostic(const BeltramiField& field, double N, int depth,
                                      const ModulusOptions& options = {.resolution = 128, .richardson = false});

} // namespace rqc
