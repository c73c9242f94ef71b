#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rqc/beltrami.hpp"
#include "rqc/elliptic.hpp"

namespace rqc {

/// Law of the marked boundary point on one arc C_i = (lo, hi) with corner angle m.
struct ArcLaw {
    std::string description;
    std::function<double(KeyedRng&, double lo, double hi, double m)> sample;
};

/// Uniform on the middle `fraction` of the arc.
ArcLaw uniform_arc_law(double fraction = 0.8);
/// Always the corner angle m (the undeformed surface).
ArcLaw corner_arc_law();
/// Always lo + position * (hi - lo).
ArcLaw fixed_arc_law(double position);

/// Checkerboard of hemispheres with marked boundary points: anchors theta_i
/// bound the arcs C_i, corners of label i sit at m_i, and the marked point of a
/// vertex of label i is drawn from laws[i - 1].
struct SurfaceModel {
    std::array<double, 4> anchors;
    std::array<double, 4> midpoints;
    std::array<ArcLaw, 4> laws;
    double cell_width = 1.0;

    /// Default anchors (0, pi/2, pi, 3pi/2), arc midpoints, uniform on the middle 80%.
    static SurfaceModel standard(double cell_width = 1.0);
    /// Same geometry with every vertex at its corner angle.
    static SurfaceModel base(double cell_width = 1.0);

    EllipticBaseMap base_map() const { return EllipticBaseMap(anchors, midpoints, cell_width); }
    nlohmann::json to_json() const;
};

/// Marked boundary angles for the lattice vertices (i, j), i0 <= i <= i1, j0 <= j <= j1.
struct SurfaceSample {
    std::int64_t i0 = 0, i1 = -1, j0 = 0, j1 = -1;
    std::vector<double> alpha;
    std::uint64_t seed = 0;

    bool covers(std::int64_t i, std::int64_t j) const
    {
        return i >= i0 && i <= i1 && j >= j0 && j <= j1;
    }
    double at(std::int64_t i, std::int64_t j) const;
    double& at(std::int64_t i, std::int64_t j);
    nlohmann::json to_json(const SurfaceModel& model) const;
};

/// Independent draws keyed by (seed, vertex) for every vertex of every cell
/// meeting the window.
SurfaceSample sample_surface(const SurfaceModel& model, const Rect& window, std::uint64_t seed);

/// Eight slopes of the piecewise-linear angle map fixing theta_i and sending
/// m_i to alpha_i: entries 2q and 2q + 1 are the slopes on [theta_q, m_q] and
/// [m_q, theta_{q+1}] (q = 0..3 for labels 1..4).
std::array<double, 8> sector_slopes(const SurfaceModel& model, const std::array<double, 4>& alpha);

/// Coefficient of u -> |u| exp(i k(arg u)) where k has local slope s:
/// (u / |u|)^2 (1 - s) / (1 + s).
Complex sector_beltrami(double slope, Complex u);

/// Location of a plane point in the surface: cell, sector and the vertex whose
/// marked point controls the deformation there.
struct SectorInfo {
    std::int64_t cx = 0, cy = 0;
    int label = 1;          ///< arc C_label containing the boundary angle
    int half = 0;           ///< 0: [theta, m], 1: [m, theta_next]
    std::int64_t vi = 0, vj = 0;  ///< vertex of that label in the cell
    DiskPoint disk;
};
SectorInfo locate_sector(const EllipticBaseMap& map, Point z);

/// Precomputed evaluator for one sample.
class SurfaceEvaluator {
public:
    SurfaceEvaluator(const SurfaceModel& model, const SurfaceSample& sample);

    const EllipticBaseMap& map() const { return map_; }
    /// Slope of the angle map at z.
    double slope(Point z) const;
    /// Beltrami coefficient of the composite p o phi o ℘ at z.
    Complex beltrami(Point z) const;
    /// Same, with the location of z already computed.
    Complex beltrami(const SectorInfo& info, Point z) const;
    /// Deformed disk coordinate phi(g(z)) (conformal chart of the target hemisphere).
    Complex deformed_disk(Point z) const;
    /// Sphere coordinate of the composite map.
    Complex sphere_value(Point z) const;
    /// Pullback of the spherical metric (area 1 for the sphere) at z: s |g'|^2 sigma(phi(u)).
    double spherical_density(Point z) const;
    /// Boundary angle k(theta) on the equator for a point on a cell edge, computed
    /// with the chart of cell (cx, cy).
    double boundary_trace(Point z, std::int64_t cx, std::int64_t cy) const;

private:
    double slope_for(const SectorInfo& info) const;
    double deform_angle(const SectorInfo& info, double theta) const;
    SectorInfo locate(Point z) const;

    const SurfaceModel& model_;
    const SurfaceSample& sample_;
    EllipticBaseMap map_;
};

/// Beltrami field of the deformed surface on the grid; patches are the
/// curvilinear triangles, regions the vertex regions of the vertex-sector partition.
/// A positive truncation radius R sets the field to 0 on |z| >= R (as truncate does)
/// and then only needs the sample to cover the vertices near B(0, R).
BeltramiField surface_beltrami(const SurfaceModel& model, const SurfaceSample& sample,
                               const GridSpec& grid, double truncation_radius = 0.0);

} // namespace rqc
