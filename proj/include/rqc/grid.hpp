#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "rqc/geometry.hpp"

namespace rqc {

/// Uniform n x n node grid on the square [-L, L)^2. Node (ix, iy) sits at
/// (-L + ix*h, -L + iy*h) with h = 2L/n, so for even n the origin is a node.
/// Storage is row-major with rows along y: index = iy*n + ix.
struct GridSpec {
    double half_width = 1.0;  ///< L
    int n = 0;

    double spacing() const { return 2.0 * half_width / n; }
    std::size_t size() const { return static_cast<std::size_t>(n) * n; }
    std::size_t index(int ix, int iy) const
    {
        return static_cast<std::size_t>(iy) * n + static_cast<std::size_t>(ix);
    }
    Point node(int ix, int iy) const
    {
        double h = spacing();
        return {-half_width + ix * h, -half_width + iy * h};
    }
    Point node(std::size_t idx) const
    {
        return node(static_cast<int>(idx % n), static_cast<int>(idx / n));
    }
    /// Upper end of the sampled range in each coordinate (L - h).
    double upper() const { return half_width - spacing(); }
    bool in_domain(Point z) const
    {
        return z.real() >= -half_width && z.imag() >= -half_width && z.real() <= upper() &&
               z.imag() <= upper();
    }
    /// Nearest node to z (clamped to the grid).
    std::size_t nearest(Point z) const;

    void validate() const;
    bool operator==(const GridSpec&) const = default;
};

/// Fractional grid coordinates of z.
inline std::pair<double, double> grid_coords(const GridSpec& g, Point z)
{
    double h = g.spacing();
    return {(z.real() + g.half_width) / h, (z.imag() + g.half_width) / h};
}

/// Writes a complex grid as the binary dump (little-endian float64 pairs, row-major)
/// next to a structured-text header. `stem` receives ".json" and ".bin" suffixes.
void write_grid_dump(const std::filesystem::path& stem, const GridSpec& grid,
                     std::span<const Complex> values, nlohmann::json header);

struct GridDump {
    GridSpec grid;
    std::vector<Complex> values;
    nlohmann::json header;
};

GridDump read_grid_dump(const std::filesystem::path& stem);

/// FNV-1a over the raw sample bytes; identifies a field in map metadata.
std::uint64_t hash_samples(std::span<const Complex> values);

} // namespace rqc
