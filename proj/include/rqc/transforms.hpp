#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "rqc/grid.hpp"

namespace rqc {

/// Weight of the pixel centred at displacement (mx, my) * h in the Beurling
/// transform, -(1/pi) * integral of 1/eta^2 over that pixel (principal value at 0).
Complex beurling_weight(int mx, int my, double h);
/// Weight of the pixel centred at (mx, my) * h in the Cauchy transform,
/// (1/pi) * integral of 1/eta over that pixel.
Complex cauchy_weight(int mx, int my, double h);

/// Beurling and Cauchy transforms of pixel-constant data on a grid, as discrete
/// convolutions with the exact pixel-integrated kernels, evaluated by FFT.
///
/// beurling() is a circular convolution on the n x n grid: it equals the plane
/// transform at every node whose distance (in both coordinates) to the data
/// support is below L. cauchy() zero-pads to 2n x 2n and is exact everywhere.
class PlaneTransforms {
public:
    explicit PlaneTransforms(const GridSpec& grid);
    ~PlaneTransforms();
    PlaneTransforms(const PlaneTransforms&) = delete;
    PlaneTransforms& operator=(const PlaneTransforms&) = delete;

    const GridSpec& grid() const { return grid_; }
    void beurling(const std::vector<Complex>& in, std::vector<Complex>& out);
    void cauchy(const std::vector<Complex>& in, std::vector<Complex>& out);

private:
    struct Plans;
    GridSpec grid_;
    std::unique_ptr<Plans> plans_;
};

} // namespace rqc
