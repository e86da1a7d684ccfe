#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qhn/bits.hpp"
#include "qhn/oracle.hpp"

namespace qhn {

// Coefficients of the cost function over diagonal Pauli strings:
// f[T] = 2^-n sum_sigma C(sigma) * prod_{i in T} (2 sigma_i - 1), where bit i
// of the mask T marks a sigma^z factor on qubit i. The sign convention is
// sigma^z |sigma_i> = (2 sigma_i - 1) |sigma_i>, i.e. sigma_i = 0 maps to -1.
struct WalshSpectrum {
    int n = 0;
    std::vector<double> f;
};

// Fast transform, O(n 2^n) in-place butterflies. Equivalent to evaluating the
// trace formula f(T) = 2^-n Tr[C * prod sigma^z_i] for every string.
inline WalshSpectrum walsh_transform(const CostTable& t) {
    if (t.n > kMaxTableQubits) throw std::invalid_argument("qubit count exceeds table limit");
    WalshSpectrum ws;
    ws.n = t.n;
    ws.f = t.values;
    const std::uint64_t size = ws.f.size();
    for (int q = 0; q < t.n; ++q) {
        const std::uint64_t stride = std::uint64_t{1} << q;
        for (std::uint64_t base = 0; base < size; base += 2 * stride) {
            for (std::uint64_t off = 0; off < stride; ++off) {
                const double a = ws.f[base + off];
                const double b = ws.f[base + off + stride];
                // Character on this qubit: -1 at sigma=0, +1 at sigma=1.
                ws.f[base + off] = a + b;
                ws.f[base + off + stride] = b - a;
            }
        }
    }
    const double scale = 1.0 / static_cast<double>(size);
    for (double& v : ws.f) v *= scale;
    return ws;
}

// W(S): total squared Fourier mass of strings with exactly S non-identity
// factors, S = 0..n.
inline std::vector<double> weight_spectrum(const WalshSpectrum& ws) {
    std::vector<double> w(ws.n + 1, 0.0);
    for (std::uint64_t mask = 0; mask < ws.f.size(); ++mask)
        w[std::popcount(mask)] += ws.f[mask] * ws.f[mask];
    return w;
}

// C(sigma) = sum_T f[T] * prod_{i in T} (2 sigma_i - 1); the round-trip
// inverse of walsh_transform for a single configuration.
inline double reconstruct_cost(const WalshSpectrum& ws, const Config& c) {
    double acc = 0.0;
    const std::uint32_t bits = c.word;
    for (std::uint64_t mask = 0; mask < ws.f.size(); ++mask) {
        // Sign is (-1)^(zeros of sigma inside T).
        const int flips = std::popcount(static_cast<std::uint32_t>(mask) & ~bits);
        acc += (flips & 1) ? -ws.f[mask] : ws.f[mask];
    }
    return acc;
}

// Full inverse transform; entry idx equals reconstruct_cost at idx.
inline std::vector<double> inverse_walsh(const WalshSpectrum& ws) {
    std::vector<double> v = ws.f;
    const std::uint64_t size = v.size();
    for (int q = 0; q < ws.n; ++q) {
        const std::uint64_t stride = std::uint64_t{1} << q;
        for (std::uint64_t base = 0; base < size; base += 2 * stride) {
            for (std::uint64_t off = 0; off < stride; ++off) {
                const double a = v[base + off];
                const double b = v[base + off + stride];
                v[base + off] = a - b;
                v[base + off + stride] = a + b;
            }
        }
    }
    return v;
}

// Copy of the spectrum with all strings of weight > max_weight zeroed; used
// for locality/truncation studies.
inline WalshSpectrum truncate_spectrum(const WalshSpectrum& ws, int max_weight) {
    WalshSpectrum out = ws;
    for (std::uint64_t mask = 0; mask < out.f.size(); ++mask)
        if (std::popcount(mask) > max_weight) out.f[mask] = 0.0;
    return out;
}

}  // namespace qhn
