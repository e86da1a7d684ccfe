#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qhn/bits.hpp"

namespace qhn {

// Labeled classification data, rows stored flat (size() x dim).
struct LabeledDataset {
    int dim = 0;
    std::vector<double> xs;
    std::vector<int> ys;

    std::size_t size() const { return ys.size(); }
    std::span<const double> x(std::size_t i) const {
        return {xs.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
    void push_back(std::span<const double> x, int y) {
        xs.insert(xs.end(), x.begin(), x.end());
        ys.push_back(y);
    }
};

enum class Activation { sigmoid, relu };

// Role of one qubit in the flattened network layout.
struct QubitRole {
    enum Kind { W1, B1, W2, B2, ActivationChoice, HiddenWidthChoice } kind;
    int row = 0;  // hidden unit index for W1/B1/W2
    int col = 0;  // input index for W1
};

// Fixed decoding map from qubit indices to network parameters and choices.
//
// Hidden model (max_hidden > 0):  out = S(w2 . f(W1 x + b1) + b2), where f is
// the selected activation and only the first n_hid hidden units are active.
// Linear model (max_hidden == 0): out = S(w . x + b), with the weights held in
// W1 row 0 and the bias in B2.
struct BinnSpec {
    int input_dim = 0;
    int max_hidden = 0;
    int output_dim = 1;
    std::vector<QubitRole> layout;

    int n_qubits() const { return static_cast<int>(layout.size()); }
    bool has_width_choice() const {
        for (const auto& r : layout)
            if (r.kind == QubitRole::HiddenWidthChoice) return true;
        return false;
    }

    // 2-in / 3-hidden / 1-out classifier plus an activation-choice qubit (N = 14).
    static BinnSpec gaussian_act() { return mlp(2, 3, /*width_choice=*/false); }

    // Same network plus a hidden-width qubit selecting n_hid in {2,3} (N = 15).
    static BinnSpec gaussian_act_width() { return mlp(2, 3, /*width_choice=*/true); }

    // Binary logistic regression on 16 inputs: 16 weights + 1 bias (N = 17).
    static BinnSpec mnist_logreg() { return linear(16); }

    // Flattened layout: W1 row-major, b1, W2, b2, activation qubit, width qubit.
    static BinnSpec mlp(int input_dim, int max_hidden, bool width_choice) {
        BinnSpec s;
        s.input_dim = input_dim;
        s.max_hidden = max_hidden;
        for (int r = 0; r < max_hidden; ++r)
            for (int c = 0; c < input_dim; ++c) s.layout.push_back({QubitRole::W1, r, c});
        for (int r = 0; r < max_hidden; ++r) s.layout.push_back({QubitRole::B1, r, 0});
        for (int r = 0; r < max_hidden; ++r) s.layout.push_back({QubitRole::W2, r, 0});
        s.layout.push_back({QubitRole::B2, 0, 0});
        s.layout.push_back({QubitRole::ActivationChoice, 0, 0});
        if (width_choice) s.layout.push_back({QubitRole::HiddenWidthChoice, 0, 0});
        return s;
    }

    static BinnSpec linear(int input_dim) {
        BinnSpec s;
        s.input_dim = input_dim;
        s.max_hidden = 0;
        for (int c = 0; c < input_dim; ++c) s.layout.push_back({QubitRole::W1, 0, c});
        s.layout.push_back({QubitRole::B2, 0, 0});
        return s;
    }
};

// One concrete network read off a configuration. Weights and biases are +-1.
struct DecodedBinn {
    int input_dim = 0;
    int max_hidden = 0;
    int n_hid = 0;  // active hidden units; 0 for the linear model
    Activation activation = Activation::sigmoid;
    std::vector<double> w1;  // max_hidden x input_dim, row-major (or 1 x input_dim linear weights)
    std::vector<double> b1;  // max_hidden
    std::vector<double> w2;  // max_hidden
    double b2 = 0.0;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline DecodedBinn decode(const BinnSpec& spec, const Config& c) {
    if (c.n != spec.n_qubits()) throw std::invalid_argument("configuration length does not match spec");
    DecodedBinn b;
    b.input_dim = spec.input_dim;
    b.max_hidden = spec.max_hidden;
    b.n_hid = spec.max_hidden;
    const int rows = spec.max_hidden > 0 ? spec.max_hidden : 1;
    b.w1.assign(static_cast<std::size_t>(rows) * spec.input_dim, 0.0);
    b.b1.assign(spec.max_hidden, 0.0);
    b.w2.assign(spec.max_hidden, 0.0);
    for (int q = 0; q < c.n; ++q) {
        const double s = spin(c.bit(q));
        const QubitRole& role = spec.layout[q];
        switch (role.kind) {
            case QubitRole::W1: b.w1[static_cast<std::size_t>(role.row) * spec.input_dim + role.col] = s; break;
            case QubitRole::B1: b.b1[role.row] = s; break;
            case QubitRole::W2: b.w2[role.row] = s; break;
            case QubitRole::B2: b.b2 = s; break;
            case QubitRole::ActivationChoice:
                b.activation = c.bit(q) == 0 ? Activation::sigmoid : Activation::relu;
                break;
            case QubitRole::HiddenWidthChoice:
                b.n_hid = c.bit(q) == 0 ? 2 : 3;
                break;
        }
    }
    return b;
}

// Qubits that cannot affect the forward pass of the decoded network: the
// parameter entries of hidden units at rows >= n_hid.
inline std::vector<int> inactive_qubits(const BinnSpec& spec, const DecodedBinn& b) {
    std::vector<int> out;
    for (int q = 0; q < spec.n_qubits(); ++q) {
        const QubitRole& role = spec.layout[q];
        const bool row_role =
            role.kind == QubitRole::W1 || role.kind == QubitRole::B1 || role.kind == QubitRole::W2;
        if (row_role && spec.max_hidden > 0 && role.row >= b.n_hid) out.push_back(q);
    }
    return out;
}

inline double forward(const DecodedBinn& b, std::span<const double> x) {
    if (static_cast<int>(x.size()) != b.input_dim) throw std::invalid_argument("input dimension mismatch");
    if (b.max_hidden == 0) {
        double z = b.b2;
        for (int c = 0; c < b.input_dim; ++c) z += b.w1[c] * x[c];
        return sigmoid(z);
    }
    double out = b.b2;
    for (int r = 0; r < b.n_hid; ++r) {
        double z = b.b1[r];
        const double* wrow = b.w1.data() + static_cast<std::size_t>(r) * b.input_dim;
        for (int c = 0; c < b.input_dim; ++c) z += wrow[c] * x[c];
        const double h = b.activation == Activation::sigmoid ? sigmoid(z) : (z > 0.0 ? z : 0.0);
        out += b.w2[r] * h;
    }
    return sigmoid(out);
}

// Clamp applied to predicted probabilities before taking logs; keeps every
// cross-entropy value finite and cost tables bit-reproducible.
inline constexpr double kProbClamp = 1e-12;

inline double binary_cross_entropy(double p, int y) {
    if (p < kProbClamp) p = kProbClamp;
    if (p > 1.0 - kProbClamp) p = 1.0 - kProbClamp;
    return y == 1 ? -std::log(p) : -std::log(1.0 - p);
}

inline double cost(const DecodedBinn& b, const LabeledDataset& d) {
    if (d.size() == 0) throw std::invalid_argument("empty dataset");
    double acc = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) acc += binary_cross_entropy(forward(b, d.x(i)), d.ys[i]);
    return acc / static_cast<double>(d.size());
}

inline double cost(const BinnSpec& spec, const Config& c, const LabeledDataset& d) {
    return cost(decode(spec, c), d);
}

inline std::string activation_name(Activation a) {
    return a == Activation::sigmoid ? "sigmoid" : "relu";
}

}  // namespace qhn
