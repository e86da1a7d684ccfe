#include <catch2/catch_amalgamated.hpp>

#include "qhn/bits.hpp"
#include "qhn/rng.hpp"

using namespace qhn;

TEST_CASE("index round trips through configurations", "[bits]") {
    CHECK(config_bits(index_to_config(0, 3)) == std::vector<int>{0, 0, 0});
    CHECK(config_bits(index_to_config(5, 3)) == std::vector<int>{1, 0, 1});

    const Config all_ones = index_to_config((1u << 14) - 1, 14);
    for (int j = 0; j < 14; ++j) CHECK(all_ones.bit(j) == 1);

    // Exhaustive for small n.
    for (int n = 1; n <= 10; ++n)
        for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << n); ++idx)
            CHECK(config_to_index(index_to_config(idx, n)) == idx);

    // Random spot checks up to n = 16.
    Rng rng(11);
    for (int k = 0; k < 2000; ++k) {
        const std::uint64_t idx = rng.below(std::uint64_t{1} << 16);
        CHECK(config_to_index(index_to_config(idx, 16)) == idx);
    }
}

TEST_CASE("index preconditions", "[bits]") {
    CHECK_THROWS_AS(index_to_config(8, 3), std::out_of_range);
    CHECK_THROWS_AS(index_to_config(0, 0), std::invalid_argument);
    CHECK_THROWS_AS(index_to_config(0, 31), std::invalid_argument);
}

TEST_CASE("spins are 2 sigma - 1", "[bits]") {
    CHECK(spin(0) == -1);
    CHECK(spin(1) == 1);

    CHECK(config_to_spins(index_to_config(2, 2)) == std::vector<int>{-1, 1});
    CHECK(config_to_spins(index_to_config(3, 3)) == std::vector<int>{1, 1, -1});

    const auto zeros = config_to_spins(index_to_config(0, 14));
    for (int s : zeros) CHECK(s == -1);
}
