#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rqc/grid.hpp"
#include "rqc/partition.hpp"
#include "rqc/rng.hpp"

namespace rqc {

/// One draw of a region law: a coefficient on the region and the bound it obeys.
struct LawDraw {
    std::function<Complex(Point)> coefficient;
    double sup = 0.0;  ///< |coefficient| <= sup on the region; must be < 1
};

/// Random coefficient law for the regions of one local index.
struct RegionLaw {
    std::string description;
    std::function<LawDraw(const RegionId&, KeyedRng&)> sample;
};

RegionLaw point_mass_law(Complex value);
/// Uniform over a finite set of constant values.
RegionLaw discrete_law(std::vector<Complex> values);
/// Constant coefficient with modulus uniform on [kmin, kmax] and uniform argument.
RegionLaw uniform_modulus_law(double kmin, double kmax);
/// Constant real coefficient, normal(mean, sd) conditioned on |x| <= kmax.
RegionLaw truncated_normal_law(double mean, double sd, double kmax);

/// Grid-sampled Beltrami coefficient. Nodes carry a patch label; the coefficient
/// is smooth inside a patch and may jump across patch boundaries.
struct BeltramiField {
    GridSpec grid;
    std::vector<Complex> samples;
    std::vector<std::int32_t> patch;     ///< per node, -1 where no patch applies
    std::vector<RegionId> regions;       ///< region table, indexed by region_of_node
    std::vector<std::int32_t> region_of_node;
    std::vector<double> region_sup;      ///< recorded bound per region table entry
    std::uint64_t seed = 0;
    std::string partition_ref;
    std::optional<double> truncation_radius;

    Complex at(int ix, int iy) const { return samples[grid.index(ix, iy)]; }
    double sup() const;
    /// Sup over the recorded region bounds (zero for an empty table).
    double bound() const;
    /// K = (1 + k) / (1 - k) for k = bound().
    double dilatation() const;
    /// Throws unless |mu| <= 1 - 1e-9 everywhere.
    void validate() const;
};

/// Field with every sample equal to `value` (single patch, single region).
BeltramiField constant_field(const GridSpec& grid, Complex value);
/// Field from a closure over plane points, single patch.
BeltramiField field_from_function(const GridSpec& grid, const std::function<Complex(Point)>& f,
                                  double sup_bound);

/// Samples independent draws per region; laws indexed by local index. Draws are
/// keyed by (seed, RegionId) so the result does not depend on evaluation order.
BeltramiField sample_field(const Partition& partition, const std::vector<RegionLaw>& laws,
                           const GridSpec& grid, std::uint64_t seed,
                           std::size_t max_nodes = std::size_t{1} << 24);

/// mu * indicator of the open disk B(0, R).
BeltramiField truncate(const BeltramiField& field, double R);

/// Field on the domain scaled by delta: value at delta * z equals the value at z.
/// The node lattice is scaled with the domain so every sample is reproduced exactly.
BeltramiField rescale(const BeltramiField& field, double delta);
/// Rescaled field resampled on `target` (nearest sample); errors if z / delta
/// leaves the source domain.
BeltramiField rescale_to(const BeltramiField& field, double delta, const GridSpec& target);

/// Coefficient of (w o g) for conformal g: field(g(z)) * conj(g'(z)) / g'(z),
/// with field(.) read at the nearest node.
BeltramiField pullback_conformal(const BeltramiField& field,
                                 const std::function<Complex(Point)>& g,
                                 const std::function<Complex(Point)>& dg);

struct BoundEstimate {
    double k = 0.0;
    double K = 1.0;
    std::vector<double> per_law;
};

/// Smallest k such that, for every law, the empirical fraction of draws with
/// sup <= k is at least 1 - eps.
BoundEstimate probabilistic_bound_estimate(const std::vector<RegionLaw>& laws, double eps,
                                           int trials, std::uint64_t seed);

void write_field(const std::filesystem::path& stem, const BeltramiField& field);
BeltramiField read_field(const std::filesystem::path& stem);

} // namespace rqc
