#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "rqc/solver.hpp"
#include "rqc/surface.hpp"

namespace rqc {

/// Real-linear map z -> (m[0] x + m[1] y) + i (m[2] x + m[3] y).
struct LinearMapEstimate {
    std::array<double, 4> matrix{1, 0, 0, 1};
    double deviation = 0.0;  ///< max |w(z) - A z| / R over the samples
    double R = 0.0;
    std::size_t samples = 0;

    Complex apply(Point z) const;
    double det() const { return matrix[0] * matrix[3] - matrix[1] * matrix[2]; }
};

/// Deterministic, evenly spread points in B(0, R) (Vogel spiral); scaling R
/// scales every point.
std::vector<Point> disk_samples(double R, int count);

/// Least squares fit of w(z) ~ A z over disk_samples(R, samples).
LinearMapEstimate estimate_linear_map(const DiscreteMap& map, double R, int samples = 4096);

/// Map sampled from a closed form on the grid (controls and oracles).
DiscreteMap map_from_function(const GridSpec& grid, const std::function<Complex(Point)>& w);

struct DeviationOptions {
    double pixels_per_cell = 8.0;  ///< target grid density before the size cap
    int min_n = 256;
    int max_n = 1024;
    double tol = 1e-6;
    int samples = 4096;
};

struct DeviationRow {
    double R = 0.0;
    GridSpec grid;
    std::vector<std::uint64_t> seeds;
    std::vector<double> deviations;  ///< successful trials, in trial order
    int failures = 0;
    double median = 0.0, q25 = 0.0, q75 = 0.0, min = 0.0, max = 0.0;
    std::array<double, 4> mean_matrix{};  ///< ensemble-average fitted map
};

/// For each R: fresh surface samples, field truncated to B(0, R) on a grid of
/// half-width 2R, solve, fit on B(0, R).
std::vector<DeviationRow> deviation_curve(const SurfaceModel& model, const std::vector<double>& ladder,
                                          int trials, std::uint64_t seed, const DeviationOptions& options = {});

struct AreaTable {
    std::vector<double> t;
    std::vector<double> A;
    double scale = 1.0;        ///< w was multiplied by this before measuring |w|
    double valid_radius = 0.0; ///< z-radius on which the field is the surface field
    double boundary_min = 0.0; ///< min |scale w| on that circle
};

/// Spherical area A(t) of {z : |scale * w(z)| < t, |z| < valid radius} in the
/// pullback of the area-1 spherical metric by p o phi o ℘ (grid-node Riemann sum).
/// The image of the circle |z| = valid radius must wind once around B(0, max t).
AreaTable spherical_area(const SurfaceModel& model, const SurfaceSample& sample, const DiscreteMap& map,
                         const std::vector<double>& t_values, double scale = 1.0);

struct CharacteristicTable {
    std::vector<double> r;
    std::vector<double> T;
    std::vector<double> error;  ///< |T - T on every other point| / 3
};

/// T(r) = integral_0^r A(t) / t dt: trapezoid rule in log t, with A(t) ~ c t^2
/// below the first sample.
CharacteristicTable characteristic(const std::vector<double>& t, const std::vector<double>& A);

struct OrderFit {
    double slope = 0.0;      ///< least squares slope of log T against log r (order proxy)
    double intercept = 0.0;
    double residual = 0.0;   ///< rms residual in log T
    double lower_slope = 0.0;  ///< min two-point slope over subwindows (lower-order proxy)
    double upper_slope = 0.0;
    double r0 = 0.0, r1 = 0.0;
    int points = 0;
};

OrderFit order_fit(const std::vector<double>& r, const std::vector<double>& T, double r0, double r1);

struct OrderOptions {
    int n = 1024;
    double r_min = 8.0;        ///< fit window in cell widths
    double r_max = 64.0;
    double t_min = 0.25;       ///< first A(t) sample in cell widths
    int t_count = 64;
    double truncation_factor = 1.1;
    double tol = 1e-6;
};

struct OrderRun {
    std::uint64_t seed = 0;
    GridSpec grid;
    int iterations = 0;
    AreaTable area;
    CharacteristicTable T;
    OrderFit fit;
};

/// Solve the surface field truncated at truncation_factor * r_max cells, rescale
/// the map (conformally, by a positive constant) only if needed so that the
/// image of the truncation circle encloses B(0, r_max), and fit the order.
OrderRun order_run(const SurfaceModel& model, std::uint64_t seed, const OrderOptions& options = {});

} // namespace rqc
