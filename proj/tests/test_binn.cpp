#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qhn/binn.hpp"
#include "qhn/rng.hpp"

using namespace qhn;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

LabeledDataset single_point(std::vector<double> x, int y) {
    LabeledDataset d;
    d.dim = static_cast<int>(x.size());
    d.push_back(x, y);
    return d;
}

}  // namespace

TEST_CASE("spec layouts have the advertised sizes", "[binn]") {
    CHECK(BinnSpec::gaussian_act().n_qubits() == 14);
    CHECK(BinnSpec::gaussian_act_width().n_qubits() == 15);
    CHECK(BinnSpec::mnist_logreg().n_qubits() == 17);
}

TEST_CASE("decode maps bits to signs and choices", "[binn]") {
    const BinnSpec spec = BinnSpec::gaussian_act();

    const DecodedBinn zeros = decode(spec, index_to_config(0, 14));
    for (double w : zeros.w1) CHECK(w == -1.0);
    for (double b : zeros.b1) CHECK(b == -1.0);
    for (double w : zeros.w2) CHECK(w == -1.0);
    CHECK(zeros.b2 == -1.0);
    CHECK(zeros.activation == Activation::sigmoid);
    CHECK(zeros.n_hid == 3);

    const DecodedBinn ones = decode(spec, index_to_config((1u << 14) - 1, 14));
    for (double w : ones.w1) CHECK(w == 1.0);
    CHECK(ones.b2 == 1.0);
    CHECK(ones.activation == Activation::relu);

    CHECK_THROWS_AS(decode(spec, index_to_config(0, 13)), std::invalid_argument);
}

TEST_CASE("width qubit masks the third hidden unit", "[binn]") {
    const BinnSpec spec = BinnSpec::gaussian_act_width();
    REQUIRE(spec.has_width_choice());

    // Width qubit is the last one; 0 selects n_hid = 2.
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::uint32_t base = static_cast<std::uint32_t>(rng.below(1u << 14));  // width bit clear
        const Config c = index_to_config(base, 15);
        const DecodedBinn b = decode(spec, c);
        REQUIRE(b.n_hid == 2);
        const std::vector<int> masked = inactive_qubits(spec, b);
        // Third unit's W1 row (qubits 4,5), b1 entry (qubit 8), W2 entry (qubit 11).
        REQUIRE(masked == std::vector<int>{4, 5, 8, 11});

        const std::vector<double> x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const double base_out = forward(b, x);
        for (std::size_t subset = 1; subset < (1u << masked.size()); ++subset) {
            std::uint32_t flipped = base;
            for (std::size_t m = 0; m < masked.size(); ++m)
                if (subset & (1u << m)) flipped ^= 1u << masked[m];
            CHECK_THAT(forward(decode(spec, index_to_config(flipped, 15)), x),
                       WithinAbs(base_out, 0.0));
        }
    }

    const Config wide = index_to_config(1u << 14, 15);
    CHECK(decode(spec, wide).n_hid == 3);
    CHECK(inactive_qubits(spec, decode(spec, wide)).empty());
}

TEST_CASE("forward pass closed forms", "[binn]") {
    // Linear model, all weights +1, bias +1, x = 0 -> sigmoid(1).
    const BinnSpec mnist = BinnSpec::mnist_logreg();
    const DecodedBinn all_ones = decode(mnist, index_to_config((1u << 17) - 1, 17));
    const std::vector<double> x0(16, 0.0);
    CHECK_THAT(forward(all_ones, x0), WithinAbs(0.7310585786300049, 1e-12));

    // Hidden model, everything -1, sigmoid activation, x = (0,0).
    const BinnSpec gauss = BinnSpec::gaussian_act();
    const DecodedBinn neg = decode(gauss, index_to_config(0, 14));
    const double h = sigmoid(-1.0);
    const double expected = sigmoid(-3.0 * h - 1.0);
    CHECK_THAT(forward(neg, std::vector<double>{0.0, 0.0}), WithinAbs(expected, 1e-12));
    CHECK_THAT(expected, WithinAbs(0.1410, 5e-4));

    // ReLU kill case: W1 = -1 rows, b1 = -1, x = (1,1) -> hidden all ReLU(-3) = 0.
    std::uint32_t word = 0;
    word |= 1u << 13;  // activation qubit -> ReLU
    // b2 qubit (index 12) stays 0 -> b2 = -1.
    const DecodedBinn relu_net = decode(gauss, index_to_config(word, 14));
    REQUIRE(relu_net.activation == Activation::relu);
    CHECK_THAT(forward(relu_net, std::vector<double>{1.0, 1.0}), WithinAbs(sigmoid(-1.0), 1e-12));

    CHECK_THROWS_AS(forward(relu_net, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("cost is clamped mean cross-entropy", "[binn]") {
    const BinnSpec mnist = BinnSpec::mnist_logreg();

    // Saturated correct prediction: p clamps to 1 - 1e-12.
    const DecodedBinn all_ones = decode(mnist, index_to_config((1u << 17) - 1, 17));
    std::vector<double> big(16, 10.0);
    const double c_sat = cost(all_ones, single_point(big, 1));
    CHECK_THAT(c_sat, WithinRel(1e-12, 1e-3));

    // p = 0.5 for a single point -> ln 2.
    std::vector<double> zeros16(16, 0.0);
    DecodedBinn half = all_ones;
    half.b2 = 0.0;  // synthetic: zero logit
    CHECK_THAT(cost(half, single_point(zeros16, 1)), WithinAbs(std::log(2.0), 1e-12));

    CHECK_THROWS_AS(cost(all_ones, LabeledDataset{}), std::invalid_argument);
}

TEST_CASE("cross-entropy symmetry and positivity", "[binn]") {
    Rng rng(17);
    for (int k = 0; k < 200; ++k) {
        const double p = rng.uniform();
        CHECK_THAT(binary_cross_entropy(p, 1), WithinAbs(binary_cross_entropy(1.0 - p, 0), 1e-12));
        CHECK(binary_cross_entropy(p, 0) >= 0.0);
        CHECK(binary_cross_entropy(p, 1) >= 0.0);
    }
}

TEST_CASE("masked qubits never change the cost", "[binn]") {
    const BinnSpec spec = BinnSpec::gaussian_act_width();
    LabeledDataset d;
    d.dim = 2;
    Rng rng(5);
    for (int i = 0; i < 4; ++i)
        d.push_back(std::vector<double>{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)},
                    static_cast<int>(rng.below(2)));

    // Exhaustive at N = 15: every configuration's cost equals the cost of its
    // canonical form with masked qubits cleared.
    const std::uint32_t mask_bits = (1u << 4) | (1u << 5) | (1u << 8) | (1u << 11);
    for (std::uint32_t word = 0; word < (1u << 15); ++word) {
        const Config c = index_to_config(word, 15);
        if ((word >> 14) & 1u) continue;  // n_hid = 3: nothing masked
        const std::uint32_t canon = word & ~mask_bits;
        if (canon == word) continue;
        CHECK(cost(spec, c, d) == cost(spec, index_to_config(canon, 15), d));
    }
}
