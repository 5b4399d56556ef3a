#pragma once

// Shared fixtures for the test suites: seeded random matrices, trained
// models with LUTs attached, and a hand-built fully lossless model whose
// prototype concatenations reproduce the exact product bit-for-bit.

#include <random>
#include <vector>

#include "lutamm/trainer.hpp"

namespace testutil {

inline lutamm::MatF random_matf(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                double lo = 0.0, double hi = 4.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    lutamm::MatF m(rows, cols);
    for (auto& v : m.data()) v = dist(rng);
    return m;
}

inline lutamm::MatU8 random_matu8(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    lutamm::MatU8 m(rows, cols);
    for (auto& v : m.data()) v = static_cast<uint8_t>(rng() & 0xff);
    return m;
}

/// Trained model with a random weight LUT attached; d = 4 * m (sub_dim 4).
inline lutamm::LearnedModel trained_model(uint64_t seed, int m, int n_out, int levels = 4,
                                          std::size_t samples = 400) {
    std::mt19937_64 rng(seed);
    const lutamm::MatF data = random_matf(rng, samples, static_cast<std::size_t>(4 * m));
    lutamm::LearnedModel model =
        lutamm::train_model(data, lutamm::TrainingConfig{levels, m, seed});
    const lutamm::MatF w =
        random_matf(rng, static_cast<std::size_t>(4 * m), static_cast<std::size_t>(n_out), -0.5, 0.5);
    lutamm::attach_lut(model, w);
    return model;
}

/// Hand-built model where every quantity is integer-representable: 4-dim
/// subspaces, level-l node splits dim l at threshold 128, prototype k has
/// element j equal to 192 when bit (3-j) of k is set, else 64. Encoding a
/// prototype recovers its own index, act_scale = 1 and all LUT scales are 1,
/// so prototype concatenations reproduce the exact product to the last bit.
struct LosslessModel {
    lutamm::LearnedModel model;
    lutamm::MatF w;
};

inline LosslessModel lossless_model(int m, int n_out) {
    using namespace lutamm;
    LosslessModel lm;
    LearnedModel& model = lm.model;
    model.scheme = PartitionScheme::make(4 * m, m);
    model.levels = 4;
    model.act_scale = 1.0;

    std::vector<BdtNode> nodes(15);
    for (int idx = 0; idx < 15; ++idx) {
        int level = 0;
        while (idx + 1 >= (2 << level)) ++level; // level = floor(log2(idx + 1))
        nodes[static_cast<std::size_t>(idx)] = BdtNode{level, 128, false};
    }
    MatF protos(16, 4);
    for (int k = 0; k < 16; ++k)
        for (int j = 0; j < 4; ++j)
            protos.at(static_cast<std::size_t>(k), static_cast<std::size_t>(j)) =
                ((k >> (3 - j)) & 1) ? 192.0 : 64.0;

    model.codebooks.scheme = model.scheme;
    model.codebooks.k = 16;
    for (int mm = 0; mm < m; ++mm) {
        model.trees.push_back(BdtTree::make(4, nodes, 4));
        model.codebooks.prototypes.push_back(protos);
    }
    model.empty_leaves.assign(static_cast<std::size_t>(16 * m), false);

    // one +0.25 per column within each subspace keeps every dot product an
    // integer in [-48, 48]: no clamping with scale 1
    lm.w = MatF(static_cast<std::size_t>(4 * m), static_cast<std::size_t>(n_out));
    for (int j = 0; j < n_out; ++j)
        for (int mm = 0; mm < m; ++mm)
            lm.w.at(static_cast<std::size_t>(4 * mm + j % 4), static_cast<std::size_t>(j)) =
                (mm % 2 == 0) ? 0.25 : -0.25;
    model.lut = build_lut(model.codebooks, lm.w, std::vector<double>(static_cast<std::size_t>(n_out), 1.0));
    model.has_lut = true;
    return lm;
}

/// Rows that are exact prototype concatenations of the lossless model.
inline lutamm::MatU8 prototype_rows(std::mt19937_64& rng, const lutamm::LearnedModel& model,
                                    std::size_t count) {
    const int m = model.scheme.m;
    lutamm::MatU8 x(count, static_cast<std::size_t>(4 * m));
    for (std::size_t r = 0; r < count; ++r)
        for (int mm = 0; mm < m; ++mm) {
            const int k = static_cast<int>(rng() % 16);
            const auto& p = model.codebooks.prototypes[static_cast<std::size_t>(mm)];
            for (int j = 0; j < 4; ++j)
                x.at(r, static_cast<std::size_t>(4 * mm + j)) = static_cast<uint8_t>(
                    p.at(static_cast<std::size_t>(k), static_cast<std::size_t>(j)));
        }
    return x;
}

} // namespace testutil
