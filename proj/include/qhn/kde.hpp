#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace qhn {

struct KdeEstimate {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
};

inline std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 2) throw std::invalid_argument("linspace needs at least 2 points");
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = lo + (hi - lo) * i / (count - 1);
    return v;
}

namespace detail {

// Linear-interpolation quantile of a sorted sample.
inline double quantile_sorted(std::span<const double> sorted, double q) {
    const double pos = q * (sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - lo;
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace detail

// Silverman's rule h = 0.9 min(std, IQR/1.34) n^(-1/5). Returns 0 for
// degenerate samples (zero spread); callers fall back to a grid-based width.
inline double silverman_bandwidth(std::span<const double> samples) {
    if (samples.size() < 2) throw std::invalid_argument("need at least 2 samples");
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var /= (n - 1.0);
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double iqr = detail::quantile_sorted(sorted, 0.75) - detail::quantile_sorted(sorted, 0.25);
    const double spread = std::min(std::sqrt(var), iqr / 1.34);
    if (!(spread > 0.0)) return 0.0;
    return 0.9 * spread * std::pow(n, -0.2);
}

// Gaussian-kernel density on the given grid. Degenerate samples (all equal)
// use h = 1e-3 * (grid span).
inline KdeEstimate kde(std::span<const double> samples, std::vector<double> grid) {
    if (samples.size() < 2) throw std::invalid_argument("need at least 2 samples");
    if (grid.size() < 2) throw std::invalid_argument("grid needs at least 2 points");
    double h = silverman_bandwidth(samples);
    if (h <= 0.0) h = 1e-3 * (grid.back() - grid.front());
    if (!(h > 0.0)) throw std::invalid_argument("degenerate grid");
    KdeEstimate est;
    est.bandwidth = h;
    est.density.resize(grid.size());
    const double norm = 1.0 / (samples.size() * h * std::sqrt(2.0 * 3.14159265358979323846));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double acc = 0.0;
        for (double s : samples) {
            const double z = (grid[i] - s) / h;
            acc += std::exp(-0.5 * z * z);
        }
        est.density[i] = norm * acc;
    }
    est.grid = std::move(grid);
    return est;
}

// Grid that amply covers the sample support: [min - pad, max + pad] with
// pad = max(4h, 0.01).
inline std::vector<double> kde_grid(std::span<const double> samples, int points = 512) {
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double h = silverman_bandwidth(samples);
    const double pad = std::max(4.0 * h, 0.01);
    return linspace(*lo_it - pad, *hi_it + pad, points);
}

inline double trapezoid_integral(std::span<const double> x, std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return acc;
}

}  // namespace qhn
