#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "qhn/bits.hpp"
#include "qhn/rng.hpp"

namespace qhn {

using Amplitude = std::complex<double>;
using Statevector = std::vector<Amplitude>;

// Layered hardware-efficient ansatz on a line of n qubits. A layer is two
// unitary blocks; each block applies RZ then RY on every qubit followed by a
// CX ladder on alternating nearest-neighbour pairs (odd blocks start the
// ladder at qubit 1, even blocks at qubit 0). n_layers == 0 selects the
// entanglement-free product ansatz: a single RZ+RY round and no CX.
struct CircuitSpec {
    int n = 0;
    int n_layers = 0;

    int blocks() const { return 2 * n_layers; }
    int param_count() const { return 2 * n * std::max(blocks(), 1); }

    static CircuitSpec product(int n) { return {n, 0}; }
    static CircuitSpec layered(int n, int n_layers) { return {n, n_layers}; }

    bool operator==(const CircuitSpec&) const = default;
};

struct Gate {
    enum Kind { RZ, RY, CX } kind;
    int qubit = 0;        // target
    int control = -1;     // CX only
    int theta_index = -1; // index into the flat parameter vector; -1 for CX
};

// Flat parameter layout: block-major, qubit-middle, with [theta_z, theta_y]
// per (block, qubit) in application order.
inline int theta_index(const CircuitSpec& spec, int block, int qubit, bool is_y) {
    return 2 * (block * spec.n + qubit) + (is_y ? 1 : 0);
}

inline std::vector<Gate> gate_sequence(const CircuitSpec& spec) {
    std::vector<Gate> gates;
    const int rounds = std::max(spec.blocks(), 1);
    for (int k = 0; k < rounds; ++k) {
        for (int j = 0; j < spec.n; ++j) {
            gates.push_back({Gate::RZ, j, -1, theta_index(spec, k, j, false)});
            gates.push_back({Gate::RY, j, -1, theta_index(spec, k, j, true)});
        }
        if (spec.n_layers == 0) break;  // product ansatz: rotations only
        // Brick pattern: block 0 couples (1,2),(3,4),...; block 1 couples (0,1),(2,3),...
        for (int c = (k % 2 == 0) ? 1 : 0; c + 1 < spec.n; c += 2)
            gates.push_back({Gate::CX, c + 1, c, -1});
    }
    return gates;
}

inline void check_qubit(const Statevector& s, int j) {
    if (j < 0 || (std::size_t{1} << (j + 1)) > s.size()) throw std::out_of_range("qubit index out of range");
}

inline void apply_ry(Statevector& s, int qubit, double theta) {
    check_qubit(s, qubit);
    const double c = std::cos(0.5 * theta);
    const double sn = std::sin(0.5 * theta);
    const std::size_t stride = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < s.size(); base += 2 * stride) {
        for (std::size_t off = 0; off < stride; ++off) {
            Amplitude& a = s[base + off];
            Amplitude& b = s[base + off + stride];
            const Amplitude a0 = a;
            a = c * a0 - sn * b;
            b = sn * a0 + c * b;
        }
    }
}

inline void apply_rz(Statevector& s, int qubit, double theta) {
    check_qubit(s, qubit);
    const Amplitude e0 = std::polar(1.0, -0.5 * theta);
    const Amplitude e1 = std::polar(1.0, 0.5 * theta);
    const std::size_t stride = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < s.size(); base += 2 * stride) {
        for (std::size_t off = 0; off < stride; ++off) {
            s[base + off] *= e0;
            s[base + off + stride] *= e1;
        }
    }
}

inline void apply_cx(Statevector& s, int control, int target) {
    if (control == target) throw std::invalid_argument("control equals target");
    check_qubit(s, control);
    check_qubit(s, target);
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    for (std::size_t i = 0; i < s.size(); ++i)
        if ((i & cmask) && !(i & tmask)) std::swap(s[i], s[i | tmask]);
}

inline void apply_gate(Statevector& s, const Gate& g, std::span<const double> theta, double sign = 1.0) {
    switch (g.kind) {
        case Gate::RZ: apply_rz(s, g.qubit, sign * theta[g.theta_index]); break;
        case Gate::RY: apply_ry(s, g.qubit, sign * theta[g.theta_index]); break;
        case Gate::CX: apply_cx(s, g.control, g.qubit); break;
    }
}

inline void prepare_into(Statevector& s, const CircuitSpec& spec, std::span<const double> theta) {
    if (static_cast<int>(theta.size()) != spec.param_count())
        throw std::invalid_argument("parameter vector length does not match circuit");
    s.assign(std::size_t{1} << spec.n, Amplitude{0.0, 0.0});
    s[0] = Amplitude{1.0, 0.0};
    for (const Gate& g : gate_sequence(spec)) apply_gate(s, g, theta);
}

inline Statevector prepare(const CircuitSpec& spec, std::span<const double> theta) {
    Statevector s;
    prepare_into(s, spec, theta);
    return s;
}

// Uniform U(0, 2pi) angles for every parameter, the initialization used by
// all restart sweeps.
inline std::vector<double> random_theta(const CircuitSpec& spec, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> theta(spec.param_count());
    for (double& v : theta) v = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    return theta;
}

inline double norm_squared(const Statevector& s) {
    double acc = 0.0;
    for (const Amplitude& a : s) acc += std::norm(a);
    return acc;
}

inline int qubit_count(const Statevector& s) {
    int n = 0;
    while ((std::size_t{1} << n) < s.size()) ++n;
    return n;
}

// I.i.d. projective measurements: n_shots draws from |psi(sigma)|^2.
inline std::vector<Config> sample(const Statevector& s, int n_shots, std::uint64_t seed) {
    if (n_shots < 1) throw std::invalid_argument("n_shots must be >= 1");
    const int n = qubit_count(s);
    std::vector<double> cdf(s.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        acc += std::norm(s[i]);
        cdf[i] = acc;
    }
    Rng rng(seed);
    std::vector<Config> shots;
    shots.reserve(n_shots);
    for (int k = 0; k < n_shots; ++k) {
        const double u = rng.uniform() * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::uint64_t idx = std::min<std::uint64_t>(it - cdf.begin(), s.size() - 1);
        shots.push_back(index_to_config(idx, n));
    }
    return shots;
}

}  // namespace qhn
