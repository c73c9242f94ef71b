#include "rqc/transforms.hpp"

#include <cmath>
#include <numbers>

#include <fftw3.h>

#include "rqc/errors.hpp"

namespace rqc {

namespace {

constexpr double inv_pi = std::numbers::inv_pi;
constexpr int far_field = 8;

// Antiderivatives with d^2 F / dx dy = f for f = 1/eta^2 and f = 1/eta.
Complex prim_inverse_square(Complex eta) { return Complex(0, 1) * std::log(eta); }
Complex prim_inverse(Complex eta) { return Complex(0, -1) * (eta * std::log(eta) - eta); }

template <class F>
Complex rectangle_integral(F prim, double x0, double x1, double y0, double y1)
{
    return prim({x1, y1}) - prim({x0, y1}) - prim({x1, y0}) + prim({x0, y0});
}

// Pixel integrals; only for cells with mx > 0 or (mx == 0 and my > 0), where the
// pixel avoids the branch cut of log on the negative real axis.
Complex pixel_inverse_square(int mx, int my, double h)
{
    Complex c(mx * h, my * h);
    if (std::max(std::abs(mx), std::abs(my)) >= far_field) {
        Complex c2 = c * c;
        Complex c6 = c2 * c2 * c2;
        return h * h / c2 - std::pow(h, 6) / (12.0 * c6);
    }
    return rectangle_integral(prim_inverse_square, c.real() - h / 2, c.real() + h / 2,
                              c.imag() - h / 2, c.imag() + h / 2);
}

Complex pixel_inverse(int mx, int my, double h)
{
    Complex c(mx * h, my * h);
    if (std::max(std::abs(mx), std::abs(my)) >= far_field) {
        Complex c2 = c * c;
        Complex c5 = c2 * c2 * c;
        return h * h / c - std::pow(h, 6) / (60.0 * c5);
    }
    return rectangle_integral(prim_inverse, c.real() - h / 2, c.real() + h / 2,
                              c.imag() - h / 2, c.imag() + h / 2);
}

bool canonical(int mx, int my) { return mx > 0 || (mx == 0 && my > 0); }

} // namespace

Complex beurling_weight(int mx, int my, double h)
{
    if (mx == 0 && my == 0) return 0.0;  // principal value vanishes on a square
    if (!canonical(mx, my)) return beurling_weight(-mx, -my, h);  // even kernel
    return -inv_pi * pixel_inverse_square(mx, my, h);
}

Complex cauchy_weight(int mx, int my, double h)
{
    if (mx == 0 && my == 0) return 0.0;
    if (!canonical(mx, my)) return -cauchy_weight(-mx, -my, h);  // odd kernel
    return inv_pi * pixel_inverse(mx, my, h);
}

struct PlaneTransforms::Plans {
    int n = 0;
    fftw_complex* small = nullptr;
    fftw_complex* big = nullptr;
    fftw_plan small_fwd{}, small_bwd{}, big_fwd{}, big_bwd{};
    std::vector<Complex> beurling_hat;
    std::vector<Complex> cauchy_hat;

    ~Plans()
    {
        if (small) {
            fftw_destroy_plan(small_fwd);
            fftw_destroy_plan(small_bwd);
            fftw_free(small);
        }
        if (big) {
            fftw_destroy_plan(big_fwd);
            fftw_destroy_plan(big_bwd);
            fftw_free(big);
        }
    }
};

namespace {

// Kernel on an m x m periodic grid, entry (i, j) holding displacement
// (i or i - m, j or j - m) wrapped to [-m/2, m/2).
template <class W>
void fill_kernel(fftw_complex* buf, int m, double h, W weight)
{
    for (int j = 0; j < m; ++j) {
        int my = j < m / 2 ? j : j - m;
        for (int i = 0; i < m; ++i) {
            int mx = i < m / 2 ? i : i - m;
            Complex w = weight(mx, my, h);
            buf[static_cast<std::size_t>(j) * m + i][0] = w.real();
            buf[static_cast<std::size_t>(j) * m + i][1] = w.imag();
        }
    }
}

} // namespace

PlaneTransforms::PlaneTransforms(const GridSpec& grid) : grid_(grid), plans_(std::make_unique<Plans>())
{
    grid.validate();
    const int n = grid.n;
    const double h = grid.spacing();
    auto& p = *plans_;
    p.n = n;
    const std::size_t ns = static_cast<std::size_t>(n) * n;
    const std::size_t nb = 4 * ns;
    p.small = fftw_alloc_complex(ns);
    p.big = fftw_alloc_complex(nb);
    if (!p.small || !p.big) throw NumericalError("FFT buffer allocation failed");
    p.small_fwd = fftw_plan_dft_2d(n, n, p.small, p.small, FFTW_FORWARD, FFTW_ESTIMATE);
    p.small_bwd = fftw_plan_dft_2d(n, n, p.small, p.small, FFTW_BACKWARD, FFTW_ESTIMATE);
    p.big_fwd = fftw_plan_dft_2d(2 * n, 2 * n, p.big, p.big, FFTW_FORWARD, FFTW_ESTIMATE);
    p.big_bwd = fftw_plan_dft_2d(2 * n, 2 * n, p.big, p.big, FFTW_BACKWARD, FFTW_ESTIMATE);

    fill_kernel(p.small, n, h, beurling_weight);
    fftw_execute(p.small_fwd);
    p.beurling_hat.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        p.beurling_hat[i] = Complex(p.small[i][0], p.small[i][1]) / static_cast<double>(ns);
    }
    fill_kernel(p.big, 2 * n, h, cauchy_weight);
    fftw_execute(p.big_fwd);
    p.cauchy_hat.resize(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        p.cauchy_hat[i] = Complex(p.big[i][0], p.big[i][1]) / static_cast<double>(nb);
    }
}

PlaneTransforms::~PlaneTransforms() = default;

void PlaneTransforms::beurling(const std::vector<Complex>& in, std::vector<Complex>& out)
{
    auto& p = *plans_;
    const std::size_t ns = in.size();
    require(ns == grid_.size(), "transform input does not match the grid");
    for (std::size_t i = 0; i < ns; ++i) {
        p.small[i][0] = in[i].real();
        p.small[i][1] = in[i].imag();
    }
    fftw_execute(p.small_fwd);
    for (std::size_t i = 0; i < ns; ++i) {
        Complex v = Complex(p.small[i][0], p.small[i][1]) * p.beurling_hat[i];
        p.small[i][0] = v.real();
        p.small[i][1] = v.imag();
    }
    fftw_execute(p.small_bwd);
    out.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) out[i] = {p.small[i][0], p.small[i][1]};
}

void PlaneTransforms::cauchy(const std::vector<Complex>& in, std::vector<Complex>& out)
{
    auto& p = *plans_;
    const int n = p.n;
    const int m = 2 * n;
    require(in.size() == grid_.size(), "transform input does not match the grid");
    const std::size_t nb = static_cast<std::size_t>(m) * m;
    for (std::size_t i = 0; i < nb; ++i) p.big[i][0] = p.big[i][1] = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            Complex v = in[static_cast<std::size_t>(j) * n + i];
            p.big[static_cast<std::size_t>(j) * m + i][0] = v.real();
            p.big[static_cast<std::size_t>(j) * m + i][1] = v.imag();
        }
    }
    fftw_execute(p.big_fwd);
    for (std::size_t i = 0; i < nb; ++i) {
        Complex v = Complex(p.big[i][0], p.big[i][1]) * p.cauchy_hat[i];
        p.big[i][0] = v.real();
        p.big[i][1] = v.imag();
    }
    fftw_execute(p.big_bwd);
    out.resize(in.size());
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const auto& b = p.big[static_cast<std::size_t>(j) * m + i];
            out[static_cast<std::size_t>(j) * n + i] = {b[0], b[1]};
        }
    }
}

} // namespace rqc
