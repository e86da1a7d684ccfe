#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>

#include "qhn/datasets.hpp"
#include "qhn/io.hpp"

using namespace qhn;
using Catch::Matchers::WithinAbs;

TEST_CASE("gaussian mixture respects component weights", "[datasets]") {
    const GaussianMixtureSpec spec = GaussianMixtureSpec::four_gaussians();
    const int n = 100000;
    const LabeledDataset d = sample_gaussian_mixture(spec, n, 2718);
    REQUIRE(d.size() == static_cast<std::size_t>(n));

    int red = 0;
    for (int y : d.ys) red += y;
    // Binomial 3 sigma at p = 1/2 is ~0.0047; the spec bound is 0.01.
    CHECK_THAT(red / static_cast<double>(n), WithinAbs(0.5, 0.01));

    for (double v : d.xs) CHECK(std::isfinite(v));
}

TEST_CASE("labels come from component identity", "[datasets]") {
    GaussianMixtureSpec degenerate;
    const std::array<double, 4> cov{0.2, 0.0, 0.0, 0.2};
    degenerate.components.push_back({{1.0, 1.0}, cov, 0.5, 1});
    degenerate.components.push_back({{1.0, 1.0}, cov, 0.5, 0});
    const LabeledDataset d = sample_gaussian_mixture(degenerate, 500, 5);
    std::set<int> labels(d.ys.begin(), d.ys.end());
    CHECK(labels == std::set<int>{0, 1});
}

TEST_CASE("mixture sampling is seed-deterministic", "[datasets]") {
    const GaussianMixtureSpec spec = GaussianMixtureSpec::closer();
    const LabeledDataset a = sample_gaussian_mixture(spec, 200, 99);
    const LabeledDataset b = sample_gaussian_mixture(spec, 200, 99);
    CHECK(a.xs == b.xs);
    CHECK(a.ys == b.ys);

    GaussianMixtureSpec bad;
    bad.components.push_back({{0.0, 0.0}, {1.0, 2.0, 2.0, 1.0}, 1.0, 0});  // not SPD
    CHECK_THROWS_AS(sample_gaussian_mixture(bad, 10, 1), std::invalid_argument);
}

TEST_CASE("average pooling arithmetic", "[datasets]") {
    RawImages imgs;
    imgs.rows = imgs.cols = 28;
    imgs.pixels.assign(3 * 28 * 28, 0);
    // Image 1: all 255. Image 2: one 7x7 block (row block 2, col block 1) at 255.
    std::fill(imgs.pixels.begin() + 28 * 28, imgs.pixels.begin() + 2 * 28 * 28, 255);
    std::uint8_t* img2 = imgs.pixels.data() + 2 * 28 * 28;
    for (int r = 14; r < 21; ++r)
        for (int c = 7; c < 14; ++c) img2[r * 28 + c] = 255;
    const std::vector<std::uint8_t> labels{0, 1, 0};

    MnistReductionSpec spec;
    spec.per_class_cap = 10;
    spec.seed = 0;
    const LabeledDataset d = reduce_images(imgs, labels, spec);
    REQUIRE(d.size() == 3);
    REQUIRE(d.dim == 16);

    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto x = d.x(i);
        if (d.ys[i] == 1) {
            for (double v : x) CHECK_THAT(v, WithinAbs(1.0, 1e-12));  // the all-255 image
        } else {
            // Either all zeros or exactly one block at 1.
            double sum = 0.0;
            int ones = 0;
            for (double v : x) {
                sum += v;
                if (v == 1.0) ++ones;
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
            CHECK((sum == 0.0 || (ones == 1 && std::abs(sum - 1.0) < 1e-12)));
        }
    }

    // The single-block image maps block (2,1) to feature index 2*4+1 = 9.
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto x = d.x(i);
        if (d.ys[i] == 0 && x[9] == 1.0) {
            for (int k = 0; k < 16; ++k)
                if (k != 9) CHECK(x[k] == 0.0);
        }
    }
}

TEST_CASE("idx files round trip and validate", "[datasets]") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto img_path = (dir / "qhn_test_images.idx").string();
    const auto lbl_path = (dir / "qhn_test_labels.idx").string();

    auto [imgs, labels] = synthesize_digits(20, 7);
    write_idx_images(img_path, imgs);
    write_idx_labels(lbl_path, labels);

    MnistReductionSpec spec;
    spec.images_path = img_path;
    spec.labels_path = lbl_path;
    spec.per_class_cap = 15;
    spec.seed = 3;
    const LabeledDataset d = load_reduced_mnist(spec);
    CHECK(d.size() == 30);
    CHECK(d.dim == 16);
    int ones = 0;
    for (int y : d.ys) {
        CHECK((y == 0 || y == 1));
        ones += y;
    }
    CHECK(ones == 15);
    for (double v : d.xs) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    // Same spec -> same dataset.
    const LabeledDataset d2 = load_reduced_mnist(spec);
    CHECK(d.xs == d2.xs);
    CHECK(d.ys == d2.ys);

    // Corrupt magic.
    write_idx_labels(lbl_path, labels);
    {
        std::fstream f(lbl_path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        const char zero[4] = {0, 0, 0, 0};
        f.write(zero, 4);
    }
    CHECK_THROWS(read_idx_labels(lbl_path));

    // Count mismatch.
    write_idx_labels(lbl_path, std::vector<std::uint8_t>(labels.begin(), labels.begin() + 5));
    MnistReductionSpec bad = spec;
    CHECK_THROWS(load_reduced_mnist(bad));

    // Truncated payload.
    {
        const std::string raw = read_file(img_path);
        write_file(img_path, raw.substr(0, raw.size() / 2));
    }
    CHECK_THROWS(read_idx_images(img_path));

    std::filesystem::remove(img_path);
    std::filesystem::remove(lbl_path);
}

TEST_CASE("synthetic digits vary but stay reproducible", "[datasets]") {
    const LabeledDataset a = synthetic_reduced_mnist(50, 11);
    const LabeledDataset b = synthetic_reduced_mnist(50, 11);
    CHECK(a.xs == b.xs);
    const LabeledDataset c = synthetic_reduced_mnist(50, 12);
    CHECK(a.xs != c.xs);
    REQUIRE(a.size() == 100);
}

TEST_CASE("splits are disjoint and seeded", "[datasets]") {
    LabeledDataset d;
    d.dim = 1;
    for (int i = 0; i < 1200; ++i) d.push_back(std::vector<double>{static_cast<double>(i)}, i % 2);

    const auto [train, valid] = split(d, 2, 1000, 4);
    CHECK(train.size() == 2);
    CHECK(valid.size() == 1000);

    std::set<double> train_ids(train.xs.begin(), train.xs.end());
    std::set<double> valid_ids(valid.xs.begin(), valid.xs.end());
    for (double v : train_ids) CHECK(valid_ids.count(v) == 0);

    // Union of outputs is a subset of the input multiset (ids are unique here).
    for (double v : train.xs) CHECK(v >= 0.0);
    CHECK(train_ids.size() + valid_ids.size() == 1002);

    const auto [train2, valid2] = split(d, 2, 1000, 4);
    CHECK(train.xs == train2.xs);
    CHECK(valid.ys == valid2.ys);

    CHECK_THROWS_AS(split(d, 1200, 1, 0), std::invalid_argument);
}
