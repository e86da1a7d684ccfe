#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qhn/binn.hpp"
#include "qhn/bits.hpp"
#include "qhn/parallel.hpp"

namespace qhn {

// Dense table of the training cost over all 2^n configurations;
// values[idx] = cost(index_to_config(idx, n)).
struct CostTable {
    int n = 0;
    std::vector<double> values;

    std::uint64_t size() const { return values.size(); }
};

inline constexpr int kMaxTableQubits = 24;

inline CostTable build_cost_table(const BinnSpec& spec, const LabeledDataset& d, int n_threads = 1) {
    const int n = spec.n_qubits();
    if (n > kMaxTableQubits) throw std::invalid_argument("qubit count exceeds cost-table limit");
    if (d.size() == 0) throw std::invalid_argument("empty dataset");
    CostTable t;
    t.n = n;
    t.values.resize(std::uint64_t{1} << n);
    parallel_for_blocks(t.size(), n_threads, 4096, [&](std::uint64_t idx) {
        t.values[idx] = cost(spec, index_to_config(idx, n), d);
    });
    return t;
}

struct OptimumReport {
    std::uint64_t best_index = 0;
    double best_cost = 0.0;
    DecodedBinn best;
    // k smallest (cost, index) pairs, nondecreasing cost, ties by ascending index.
    std::vector<std::pair<double, std::uint64_t>> lowest;
};

inline OptimumReport find_optimum(const CostTable& t, const BinnSpec& spec, int k) {
    if (k < 1 || static_cast<std::uint64_t>(k) > t.size()) throw std::invalid_argument("k out of range");
    std::vector<std::pair<double, std::uint64_t>> entries(t.size());
    for (std::uint64_t i = 0; i < t.size(); ++i) entries[i] = {t.values[i], i};
    std::partial_sort(entries.begin(), entries.begin() + k, entries.end());
    entries.resize(k);
    OptimumReport r;
    r.best_index = entries.front().second;
    r.best_cost = entries.front().first;
    r.best = decode(spec, index_to_config(r.best_index, t.n));
    r.lowest = std::move(entries);
    return r;
}

// The k lowest cost values, a sample set for KDE ("density of configurations").
inline std::vector<double> density_of_configurations(const CostTable& t, int k) {
    if (k < 1 || static_cast<std::uint64_t>(k) > t.size()) throw std::invalid_argument("k out of range");
    std::vector<double> v = t.values;
    std::nth_element(v.begin(), v.begin() + (k - 1), v.end());
    v.resize(k);
    std::sort(v.begin(), v.end());
    return v;
}

// FNV-1a over the fields that determine the decoding map.
inline std::uint64_t spec_hash(const BinnSpec& spec) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(static_cast<std::uint64_t>(spec.input_dim));
    mix(static_cast<std::uint64_t>(spec.max_hidden));
    mix(static_cast<std::uint64_t>(spec.output_dim));
    for (const auto& r : spec.layout) {
        mix(static_cast<std::uint64_t>(r.kind));
        mix(static_cast<std::uint64_t>(r.row));
        mix(static_cast<std::uint64_t>(r.col));
    }
    return h;
}

// Binary cache of a cost table. Header: magic, n, dataset size, spec hash;
// payload: 2^n little-endian doubles.
inline constexpr char kTableMagic[8] = {'Q', 'H', 'N', 'C', 'O', 'S', 'T', '1'};

inline void save_cost_table(const std::string& path, const CostTable& t, std::uint64_t n_samples,
                            std::uint64_t spec_h) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(kTableMagic, 8);
    const std::uint64_t n64 = static_cast<std::uint64_t>(t.n);
    out.write(reinterpret_cast<const char*>(&n64), 8);
    out.write(reinterpret_cast<const char*>(&n_samples), 8);
    out.write(reinterpret_cast<const char*>(&spec_h), 8);
    out.write(reinterpret_cast<const char*>(t.values.data()),
              static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("short write to " + path);
}

inline CostTable load_cost_table(const std::string& path, std::uint64_t expected_spec_hash,
                                 std::uint64_t* n_samples_out = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kTableMagic, 8) != 0)
        throw std::runtime_error("bad cost-table magic in " + path);
    std::uint64_t n64 = 0, n_samples = 0, spec_h = 0;
    in.read(reinterpret_cast<char*>(&n64), 8);
    in.read(reinterpret_cast<char*>(&n_samples), 8);
    in.read(reinterpret_cast<char*>(&spec_h), 8);
    if (!in || n64 < 1 || n64 > kMaxTableQubits) throw std::runtime_error("bad cost-table header in " + path);
    if (spec_h != expected_spec_hash) throw std::runtime_error("cost-table spec hash mismatch in " + path);
    CostTable t;
    t.n = static_cast<int>(n64);
    t.values.resize(std::uint64_t{1} << t.n);
    in.read(reinterpret_cast<char*>(t.values.data()),
            static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated cost table in " + path);
    if (n_samples_out) *n_samples_out = n_samples;
    return t;
}

}  // namespace qhn
