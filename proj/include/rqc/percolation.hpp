#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rqc/partition.hpp"

namespace rqc {

/// Blue/yellow coloring of the instantiated regions of a partition.
class Coloring {
public:
    Coloring(const Partition& partition, double r, std::uint64_t seed);

    const Partition& partition() const { return *partition_; }
    double r() const { return r_; }
    std::uint64_t seed() const { return seed_; }

    const std::vector<RegionId>& regions() const { return regions_; }
    bool yellow(const RegionId& id) const;
    void set_yellow(const RegionId& id, bool yellow);
    /// Color of the region containing p (the partition tie-break on boundaries).
    bool yellow_at(Point p) const;

    std::size_t yellow_count() const;
    double yellow_fraction() const;
    std::vector<RegionId> yellow_regions() const;

private:
    std::size_t index(const RegionId& id) const;

    const Partition* partition_;
    double r_;
    std::uint64_t seed_;
    std::vector<RegionId> regions_;
    std::vector<std::uint8_t> yellow_;
    std::unordered_map<RegionId, std::size_t, RegionIdHash> index_;
};

/// Independent Bernoulli colors; region (cell, l) is yellow with probability
/// yellow_prob[l] (a single entry applies to every local index).
Coloring color(const Partition& partition, const std::vector<double>& yellow_prob, double r,
               std::uint64_t seed);

/// Worst relative excess of the 8-connected lattice metric over the Euclidean one.
double lattice_anisotropy();

struct ChemicalDistance {
    double value = 0.0;
    double slack = 0.0;  ///< bound on value - d_chem from the lattice
    double spacing = 0.0;
};

/// Dijkstra on the 8-connected lattice of spacing h covering `box`; an edge costs
/// its length unless its midpoint is yellow.
ChemicalDistance lattice_chemical_distance(const std::function<bool(Point)>& yellow_at,
                                           const Rect& box, Point x, Point y, double h);
/// Lattice route over the coloring's window at `resolution` nodes per mesh size.
ChemicalDistance chemical_distance(const Coloring& coloring, Point x, Point y,
                                   double resolution);
ChemicalDistance chemical_distance(const Coloring& coloring, Point x, Point y,
                                   double resolution, const Rect& box);

/// Exact chemical distance when the yellow set is a finite union of closed
/// polygons: travel inside a yellow set is free, and between two sets a straight
/// segment costs at most their distance, so d_chem is the shortest path in the
/// complete graph on {x, targets, yellow polygons} weighted by set distances.
class ChemicalMetric {
public:
    explicit ChemicalMetric(std::vector<Polygon> yellow);
    explicit ChemicalMetric(const Coloring& coloring);

    std::size_t size() const { return polygons_.size(); }
    /// Distances from x to every target.
    std::vector<double> from(Point x, std::span<const Point> targets) const;
    double operator()(Point x, Point y) const;

private:
    double polygon_distance(std::size_t a, std::size_t b) const;

    std::vector<Polygon> polygons_;
    std::vector<Rect> boxes_;
    std::vector<std::uint8_t> rect_;
};

struct RatioOptions {
    int colorings = 1;
    int sources = 0;        ///< pairs share this many sources per coloring (0: one per pair)
    int lattice_checks = 0; ///< shortest pairs per coloring recomputed on the lattice
    bool keep_rows = false;
};

struct RatioRow {
    int coloring = 0;
    int pair = 0;
    double d = 0.0;
    double d_chem = 0.0;
    double ratio = 0.0;
};

struct RatioStats {
    double N = 0.0;
    double r = 0.0;
    int colorings = 0;
    int pairs = 0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double median = 0.0;
    double q01 = 0.0, q05 = 0.0, q25 = 0.0, q75 = 0.0, q95 = 0.0;
    std::vector<double> coloring_min;   ///< min ratio per coloring
    double fraction_min_ok = 0.0;       ///< colorings whose min ratio >= 1/10
    double mean_yellow_fraction = 0.0;
    int lattice_checked = 0;
    double lattice_max_excess = 0.0;    ///< max (lattice - exact) / d
    double lattice_max_deficit = 0.0;   ///< max (exact - lattice) / d
    std::vector<RatioRow> rows;
};

/// Pairs in B(0, N) with d >= log N; ratios d_chem / d over independent colorings
/// with every region yellow with probability r. The window must contain B(0, N).
RatioStats ratio_experiment(const Partition& partition, double r, double N, int pairs,
                            double resolution, std::uint64_t seed, const RatioOptions& options = {});

/// Fraction of instantiated regions whose closed neighborhood of the given radius
/// meets only blue regions.
double insularity_fraction(const Coloring& coloring, double radius);

} // namespace rqc
