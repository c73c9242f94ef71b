#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rqc/geometry.hpp"

namespace rqc {

/// A region of a periodic partition: the lattice cell of its fundamental-domain
/// translate plus its index inside the fundamental domain.
struct RegionId {
    std::int64_t cx = 0;
    std::int64_t cy = 0;
    int local = 0;

    auto operator<=>(const RegionId&) const = default;
};

struct RegionIdHash {
    std::size_t operator()(const RegionId& id) const noexcept;
};

/// Periodic partition of the plane into polygonal Jordan regions, instantiated
/// over a finite window. Region (cell, l) is prototype l translated by
/// cell.x * u + cell.y * v; a prototype piece belongs to the instantiated
/// partition when its translated centroid lies in the window.
class Partition {
public:
    enum class Kind { square_grid, vertex_sector };

    Kind kind() const { return kind_; }
    Point period_u() const { return u_; }
    Point period_v() const { return v_; }
    const Rect& window() const { return window_; }
    double mesh_size() const { return mesh_size_; }
    int local_count() const { return static_cast<int>(prototypes_.size()); }
    double cell_width() const { return cell_width_; }
    double cell_height() const { return cell_height_; }
    /// Anchors and corner angles (vertex-sector partitions only).
    const std::optional<std::array<double, 4>>& anchors() const { return anchors_; }
    const std::optional<std::array<double, 4>>& midpoints() const { return midpoints_; }
    int segments() const { return segments_; }

    /// Prototype pieces of local index l (cell (0, 0)).
    const std::vector<Polygon>& prototype(int local) const { return prototypes_.at(local); }

    /// Pieces of a region present in the window, translated into place.
    std::vector<Polygon> pieces(const RegionId& id) const;
    bool instantiated(const RegionId& id) const;
    /// All instantiated regions in increasing RegionId order.
    std::vector<RegionId> regions() const;
    Point offset(const RegionId& id) const;
    /// Bounding box of the instantiated part of a region.
    Rect bounds(const RegionId& id) const;

    /// Region whose closed set contains p; on shared boundaries the smallest id.
    RegionId region_of(Point p) const;
    /// Every region whose closed set contains p, increasing.
    std::vector<RegionId> regions_containing(Point p, double tol = 1e-12) const;
    /// Number of regions whose closed set meets the open disk B(center, R).
    std::size_t count_regions_in_disk(Point center, double R) const;
    /// Regions whose closed set lies within distance < R of p (increasing).
    std::vector<RegionId> regions_near(Point p, double R) const;
    /// Regions at distance <= R from the given region (the region itself included).
    std::vector<RegionId> regions_near(const RegionId& id, double R) const;
    /// Distance from p to the closed region (0 inside).
    double distance(const RegionId& id, Point p) const;

    /// Max over `centers` of count_regions_in_disk(c, R) for each R.
    std::vector<std::size_t> density_table(const std::vector<double>& radii,
                                           const std::vector<Point>& centers) const;

    /// Short text identifying the partition (kind, cell size, window).
    std::string reference() const;

    nlohmann::json to_json() const;
    static Partition from_json(const nlohmann::json& j);

    friend Partition build_square_grid(double, double, const Rect&);
    friend Partition build_vertex_sector_partition(double, double, std::array<double, 4>,
                                                   const Rect&, int);
    friend Partition build_vertex_sector_partition(double, double, std::array<double, 4>,
                                                   std::array<double, 4>, const Rect&, int);

private:
    Partition() = default;
    void finalize();
    bool piece_present(int local, std::size_t piece, std::int64_t cx, std::int64_t cy) const;
    /// Calls f(id, piece index) for every present piece whose bounding box meets `query`.
    void visit(const Rect& query, const std::function<void(const RegionId&, std::size_t)>& f) const;

    Kind kind_ = Kind::square_grid;
    Point u_{1, 0};
    Point v_{0, 1};
    Rect window_{};
    double mesh_size_ = 0.0;
    double cell_width_ = 1.0;
    double cell_height_ = 1.0;
    std::optional<std::array<double, 4>> anchors_;
    std::optional<std::array<double, 4>> midpoints_;
    int segments_ = 0;
    std::vector<std::vector<Polygon>> prototypes_;
    std::vector<std::vector<Point>> centroids_;
    Rect reach_{};  ///< union of prototype bounds
};

/// Rectangular cells a x b tiling the window (snapped outward to the cell grid).
Partition build_square_grid(double cell_width, double cell_height, const Rect& window);

/// Each a x b cell is cut into eight curvilinear triangles by the preimages of the
/// rays at angles theta_i and m_i under the elliptic base map; the region of a
/// lattice vertex is the union of the triangles touching it. Period 2 cells.
/// cell_height must equal the value forced by the anchors (pass <= 0 to derive it).
Partition build_vertex_sector_partition(double cell_width, double cell_height,
                                        std::array<double, 4> anchors, const Rect& window,
                                        int segments = 16);
Partition build_vertex_sector_partition(double cell_width, double cell_height,
                                        std::array<double, 4> anchors,
                                        std::array<double, 4> midpoints, const Rect& window,
                                        int segments = 16);

/// Lattice vertex (i, j) of a vertex-sector partition and its region id.
RegionId vertex_region(std::int64_t i, std::int64_t j);
std::pair<std::int64_t, std::int64_t> region_vertex(const RegionId& id);

} // namespace rqc
