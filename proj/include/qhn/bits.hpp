#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qhn {

// An N-bit configuration sigma in {0,1}^N identified with an integer index.
// Convention used everywhere in this library: qubit j (0-based) is bit j of
// the index, i.e. the first qubit is the least-significant bit.
struct Config {
    std::uint32_t word = 0;
    int n = 0;

    int bit(int j) const { return static_cast<int>((word >> j) & 1u); }

    bool operator==(const Config&) const = default;
};

// sigma in {0,1} -> spin in {-1,+1}, with spin(0) = -1.
inline constexpr int spin(int bit) { return 2 * bit - 1; }

inline Config index_to_config(std::uint64_t idx, int n) {
    if (n < 1 || n > 30) throw std::invalid_argument("qubit count out of range [1,30]");
    if (idx >= (std::uint64_t{1} << n)) throw std::out_of_range("configuration index out of range");
    return Config{static_cast<std::uint32_t>(idx), n};
}

inline std::uint64_t config_to_index(const Config& c) { return c.word; }

inline std::vector<int> config_bits(const Config& c) {
    std::vector<int> bits(c.n);
    for (int j = 0; j < c.n; ++j) bits[j] = c.bit(j);
    return bits;
}

inline std::vector<int> config_to_spins(const Config& c) {
    std::vector<int> spins(c.n);
    for (int j = 0; j < c.n; ++j) spins[j] = spin(c.bit(j));
    return spins;
}

}  // namespace qhn
