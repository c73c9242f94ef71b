#pragma once

#include <optional>
#include <vector>

#include "rqc/beltrami.hpp"
#include "rqc/grid.hpp"

namespace rqc {

struct MapMeta {
    std::uint64_t field_hash = 0;
    std::optional<double> truncation_radius;
    int iterations = 0;
    bool converged = false;
    double contraction = 0.0;            ///< k = sup |mu| used in the stopping rule
    std::vector<double> history;         ///< sup |h_{j+1} - h_j| per iteration
    std::vector<double> history_l2;      ///< discrete L2 norm of h_{j+1} - h_j
    double residual_sup = 0.0;           ///< finite-difference |mu_w - mu|, off the collar
    double residual_median = 0.0;
    std::size_t residual_nodes = 0;
    double orientation_fraction = 1.0;   ///< share of interior nodes with positive Jacobian
};

/// Grid-sampled plane homeomorphism normalised by w(0) = 0, w(1) = 1.
struct DiscreteMap {
    GridSpec grid;
    std::vector<Complex> w;
    bool normalized = false;
    MapMeta meta;
};

struct SolveOptions {
    double tol = 1e-10;
    int max_iterations = 500;
    /// Skip the finite-difference diagnostics (residual, orientation).
    bool diagnostics = true;
};

/// Solves w_zbar = mu w_z for the (truncated) field by the Neumann series
/// h = mu (1 + S h), w = z + C h, then normalises by the affine map fixing 0, 1.
/// Requires L >= 2 R where R bounds the support of mu.
DiscreteMap solve_truncated(const BeltramiField& field, const SolveOptions& options = {});

struct LimitResult {
    DiscreteMap map;
    std::vector<double> radii;
    std::vector<double> differences;  ///< sup over K between consecutive rungs
    std::size_t rung = 0;             ///< index of the returned radius
    bool converged = false;
};

/// Solves the truncations at each radius of the ladder (each on the smallest
/// centred sub-grid with L >= 2R) and stops at the first rung whose map agrees
/// with the previous one on the disk B(0, k_radius) within `tol`.
LimitResult solve_limit(const BeltramiField& field, const std::vector<double>& ladder,
                        double k_radius, double tol, const SolveOptions& options = {});

/// Centred sub-grid of the field with half width at least `half_width`, same spacing.
BeltramiField crop(const BeltramiField& field, double half_width);

/// Bilinear interpolation; throws outside [-L, L - h]^2.
Complex evaluate(const DiscreteMap& map, Point z);

/// z with |evaluate(map, z) - target| <= tol.
Point invert_at(const DiscreteMap& map, Complex target, Point guess, double tol = 1e-10);

/// Winding number of the image of the grid boundary around `target`.
int boundary_winding(const DiscreteMap& map, Complex target);

struct ResidualStats {
    double sup = 0.0;
    double median = 0.0;
    double mean = 0.0;
    std::size_t nodes = 0;
    double orientation_fraction = 1.0;
    double max_dbar_outside = 0.0;  ///< sup |w_zbar| / |w_z| over nodes with mu = 0
    double median_support = 0.0;    ///< median over the nodes with mu != 0
    std::size_t support_nodes = 0;
};

/// Finite-difference Beltrami coefficient of the map compared with the field,
/// skipping nodes within `collar` cells of a patch change or of the grid edge.
ResidualStats beltrami_residual(const DiscreteMap& map, const BeltramiField& field, int collar = 2);

/// Finite-difference coefficient w_zbar / w_z at an interior node.
Complex finite_difference_mu(const DiscreteMap& map, int ix, int iy);

void write_map(const std::filesystem::path& stem, const DiscreteMap& map);
DiscreteMap read_map(const std::filesystem::path& stem);

} // namespace rqc
