#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace rqc {

/// Linear-interpolation quantile of an ascending sample (NaN when empty).
inline double quantile_sorted(const std::vector<double>& sorted, double q)
{
    if (sorted.empty()) return std::nan("");
    double pos = q * static_cast<double>(sorted.size() - 1);
    auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= sorted.size()) return sorted.back();
    double t = pos - static_cast<double>(i);
    return sorted[i] * (1 - t) + sorted[i + 1] * t;
}

inline double quantile(std::vector<double> values, double q)
{
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, q);
}

inline double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

} // namespace rqc
