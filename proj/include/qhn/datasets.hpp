#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qhn/binn.hpp"
#include "qhn/rng.hpp"

namespace qhn {

// ---------------------------------------------------------------------------
// Two-dimensional Gaussian mixture classification data.
// ---------------------------------------------------------------------------

struct GaussianComponent {
    std::array<double, 2> mean{0.0, 0.0};
    std::array<double, 4> cov{1.0, 0.0, 0.0, 1.0};  // row-major 2x2, must be SPD
    double weight = 0.0;
    int label = 0;
};

struct GaussianMixtureSpec {
    std::vector<GaussianComponent> components;

    // One "red" component (label 1, weight 1/2) and three "blue" components
    // (label 0, weight 1/6 each). The red cluster sits at the origin with the
    // blue clusters around it; isotropic covariance 0.5 I throughout.
    static GaussianMixtureSpec four_gaussians(double blue_scale = 1.0) {
        GaussianMixtureSpec s;
        const std::array<double, 4> cov{0.5, 0.0, 0.0, 0.5};
        s.components.push_back({{0.0, 0.0}, cov, 0.5, 1});
        const std::array<std::array<double, 2>, 3> blue_means{{{3.0, 0.0}, {0.0, 3.0}, {3.0, 3.0}}};
        for (const auto& m : blue_means)
            s.components.push_back({{blue_scale * m[0], blue_scale * m[1]}, cov, 1.0 / 6.0, 0});
        return s;
    }

    // Harder variant for the overfitting study: blue means pulled toward the
    // red cluster so the classes overlap.
    static GaussianMixtureSpec closer(double blue_scale = 0.4) { return four_gaussians(blue_scale); }
};

namespace detail {

// Lower Cholesky factor of a 2x2 SPD matrix.
inline std::array<double, 3> cholesky2(const std::array<double, 4>& cov) {
    const double a = cov[0], b = cov[1], c = cov[3];
    if (!(a > 0.0) || !(a * c - b * b > 0.0)) throw std::invalid_argument("covariance is not SPD");
    const double l00 = std::sqrt(a);
    const double l10 = b / l00;
    const double l11 = std::sqrt(c - l10 * l10);
    return {l00, l10, l11};
}

}  // namespace detail

// Each point picks a component by mixture weight and is labeled by the
// component identity (not by position, so coincident means stay well-defined).
inline LabeledDataset sample_gaussian_mixture(const GaussianMixtureSpec& spec, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample count must be >= 1");
    if (spec.components.empty()) throw std::invalid_argument("mixture has no components");
    double total = 0.0;
    for (const auto& comp : spec.components) total += comp.weight;
    std::vector<std::array<double, 3>> chols;
    chols.reserve(spec.components.size());
    for (const auto& comp : spec.components) chols.push_back(detail::cholesky2(comp.cov));

    Rng rng(seed);
    LabeledDataset d;
    d.dim = 2;
    d.xs.reserve(2 * static_cast<std::size_t>(n));
    d.ys.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform() * total;
        std::size_t k = 0;
        double acc = 0.0;
        for (; k + 1 < spec.components.size(); ++k) {
            acc += spec.components[k].weight;
            if (u < acc) break;
        }
        const auto& comp = spec.components[k];
        const auto& l = chols[k];
        const double z0 = rng.normal();
        const double z1 = rng.normal();
        const double x0 = comp.mean[0] + l[0] * z0;
        const double x1 = comp.mean[1] + l[1] * z0 + l[2] * z1;
        const std::array<double, 2> x{x0, x1};
        d.push_back(x, comp.label);
    }
    return d;
}

// ---------------------------------------------------------------------------
// IDX-format MNIST ingestion, reduced to 4x4 via 7x7 average pooling.
// ---------------------------------------------------------------------------

struct RawImages {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> pixels;  // count x rows x cols

    std::size_t count() const {
        return rows * cols == 0 ? 0 : pixels.size() / (static_cast<std::size_t>(rows) * cols);
    }
};

namespace detail {

inline std::uint32_t read_be32(std::istream& in, const std::string& path) {
    std::uint8_t b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("truncated IDX header in " + path);
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
           std::uint32_t{b[3]};
}

inline void write_be32(std::ostream& out, std::uint32_t v) {
    const std::uint8_t b[4] = {static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
                               static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace detail

inline RawImages read_idx_images(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    if (detail::read_be32(in, path) != 0x00000803u) throw std::runtime_error("bad image magic in " + path);
    const std::uint32_t count = detail::read_be32(in, path);
    RawImages imgs;
    imgs.rows = static_cast<int>(detail::read_be32(in, path));
    imgs.cols = static_cast<int>(detail::read_be32(in, path));
    imgs.pixels.resize(static_cast<std::size_t>(count) * imgs.rows * imgs.cols);
    in.read(reinterpret_cast<char*>(imgs.pixels.data()), static_cast<std::streamsize>(imgs.pixels.size()));
    if (!in) throw std::runtime_error("truncated image payload in " + path);
    return imgs;
}

inline std::vector<std::uint8_t> read_idx_labels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    if (detail::read_be32(in, path) != 0x00000801u) throw std::runtime_error("bad label magic in " + path);
    const std::uint32_t count = detail::read_be32(in, path);
    std::vector<std::uint8_t> labels(count);
    in.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
    if (!in) throw std::runtime_error("truncated label payload in " + path);
    return labels;
}

inline void write_idx_images(const std::string& path, const RawImages& imgs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    detail::write_be32(out, 0x00000803u);
    detail::write_be32(out, static_cast<std::uint32_t>(imgs.count()));
    detail::write_be32(out, static_cast<std::uint32_t>(imgs.rows));
    detail::write_be32(out, static_cast<std::uint32_t>(imgs.cols));
    out.write(reinterpret_cast<const char*>(imgs.pixels.data()),
              static_cast<std::streamsize>(imgs.pixels.size()));
    if (!out) throw std::runtime_error("short write to " + path);
}

inline void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    detail::write_be32(out, 0x00000801u);
    detail::write_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
    if (!out) throw std::runtime_error("short write to " + path);
}

struct MnistReductionSpec {
    std::string images_path;
    std::string labels_path;
    int class_a = 0;  // mapped to label 0
    int class_b = 1;  // mapped to label 1
    int per_class_cap = 100;
    std::uint64_t seed = 0;
};

// Filter to the two kept classes, average-pool each 28x28 image over disjoint
// 7x7 blocks to 16 features in [0,1], cap per class, then seeded shuffle.
inline LabeledDataset reduce_images(const RawImages& imgs, const std::vector<std::uint8_t>& labels,
                                    const MnistReductionSpec& spec) {
    if (imgs.count() != labels.size()) throw std::runtime_error("image/label count mismatch");
    if (imgs.rows != 28 || imgs.cols != 28) throw std::runtime_error("expected 28x28 images");
    LabeledDataset d;
    d.dim = 16;
    int kept_a = 0, kept_b = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        int y;
        if (labels[i] == spec.class_a && kept_a < spec.per_class_cap) {
            y = 0;
            ++kept_a;
        } else if (labels[i] == spec.class_b && kept_b < spec.per_class_cap) {
            y = 1;
            ++kept_b;
        } else {
            continue;
        }
        const std::uint8_t* img = imgs.pixels.data() + i * 28 * 28;
        std::array<double, 16> feat{};
        for (int br = 0; br < 4; ++br)
            for (int bc = 0; bc < 4; ++bc) {
                double acc = 0.0;
                for (int r = 0; r < 7; ++r)
                    for (int c = 0; c < 7; ++c) acc += img[(br * 7 + r) * 28 + (bc * 7 + c)];
                feat[br * 4 + bc] = acc / (49.0 * 255.0);
            }
        d.push_back(feat, y);
    }
    // Seeded Fisher-Yates shuffle of the rows.
    Rng rng(spec.seed);
    for (std::size_t i = d.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        if (j == i - 1) continue;
        for (int c = 0; c < d.dim; ++c) std::swap(d.xs[(i - 1) * d.dim + c], d.xs[j * d.dim + c]);
        std::swap(d.ys[i - 1], d.ys[j]);
    }
    return d;
}

inline LabeledDataset load_reduced_mnist(const MnistReductionSpec& spec) {
    return reduce_images(read_idx_images(spec.images_path), read_idx_labels(spec.labels_path), spec);
}

// ---------------------------------------------------------------------------
// Bundled stand-in for the real digits: ring-shaped "0"s and stroke-shaped
// "1"s on a 28x28 canvas, with jittered geometry and pixel noise. Lets every
// experiment and test run without external files.
// ---------------------------------------------------------------------------

inline std::pair<RawImages, std::vector<std::uint8_t>> synthesize_digits(int per_class,
                                                                         std::uint64_t seed) {
    if (per_class < 1) throw std::invalid_argument("per_class must be >= 1");
    Rng rng(seed);
    RawImages imgs;
    imgs.rows = 28;
    imgs.cols = 28;
    imgs.pixels.assign(static_cast<std::size_t>(2 * per_class) * 28 * 28, 0);
    std::vector<std::uint8_t> labels(2 * per_class);
    for (int i = 0; i < 2 * per_class; ++i) {
        const int digit = i % 2;
        labels[i] = static_cast<std::uint8_t>(digit);
        std::uint8_t* img = imgs.pixels.data() + static_cast<std::size_t>(i) * 28 * 28;
        const double cx = 13.5 + rng.uniform(-1.0, 1.0);
        const double cy = 13.5 + rng.uniform(-1.0, 1.0);
        const double ink = rng.uniform(215.0, 250.0);
        if (digit == 0) {
            // Wide ring: bright periphery blocks, dark centre.
            const double radius = rng.uniform(8.5, 10.0);
            const double thickness = rng.uniform(2.2, 3.0);
            const double squash = rng.uniform(0.85, 1.0);
            for (int r = 0; r < 28; ++r)
                for (int c = 0; c < 28; ++c) {
                    const double dx = (c - cx) * squash;
                    const double dy = r - cy;
                    const double d = std::abs(std::sqrt(dx * dx + dy * dy) - radius);
                    if (d < thickness) {
                        const double v = ink * (1.0 - 0.5 * d / thickness) + rng.uniform(-12.0, 12.0);
                        img[r * 28 + c] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
                    }
                }
        } else {
            // Narrow vertical stroke through the centre column.
            const double slant = rng.uniform(-0.08, 0.08);
            const double halfwidth = rng.uniform(1.6, 2.4);
            const double top = rng.uniform(2.0, 4.0);
            const double bottom = rng.uniform(24.0, 26.0);
            for (int r = 0; r < 28; ++r) {
                if (r < top || r > bottom) continue;
                const double center = cx + slant * (r - cy);
                for (int c = 0; c < 28; ++c) {
                    const double d = std::abs(c - center);
                    if (d < halfwidth + 0.8) {
                        const double v = ink * std::min(1.0, 1.4 - d / (halfwidth + 0.8)) +
                                         rng.uniform(-12.0, 12.0);
                        img[r * 28 + c] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
                    }
                }
            }
        }
        // Faint background speckle.
        for (int k = 0; k < 8; ++k) {
            const int r = static_cast<int>(rng.below(28));
            const int c = static_cast<int>(rng.below(28));
            img[r * 28 + c] = std::max(img[r * 28 + c], static_cast<std::uint8_t>(rng.below(30)));
        }
    }
    return {std::move(imgs), std::move(labels)};
}

inline LabeledDataset synthetic_reduced_mnist(int per_class_cap, std::uint64_t seed) {
    auto [imgs, labels] = synthesize_digits(per_class_cap, seed);
    MnistReductionSpec spec;
    spec.per_class_cap = per_class_cap;
    spec.seed = seed;
    return reduce_images(imgs, labels, spec);
}

// ---------------------------------------------------------------------------
// Splits and export.
// ---------------------------------------------------------------------------

// Disjoint train/validation subsets drawn by a seeded shuffle of row indices.
inline std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& d, int train_n, int valid_n,
                                                       std::uint64_t seed) {
    if (train_n < 0 || valid_n < 0 || static_cast<std::size_t>(train_n) + valid_n > d.size())
        throw std::invalid_argument("split sizes exceed dataset");
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
    LabeledDataset train, valid;
    train.dim = valid.dim = d.dim;
    for (int i = 0; i < train_n; ++i) train.push_back(d.x(order[i]), d.ys[order[i]]);
    for (int i = 0; i < valid_n; ++i) {
        const std::size_t row = order[train_n + i];
        valid.push_back(d.x(row), d.ys[row]);
    }
    return {std::move(train), std::move(valid)};
}

}  // namespace qhn
