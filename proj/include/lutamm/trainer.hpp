#pragma once

// Learns decision-tree split dimensions/thresholds, prototypes and
// quantization scales from sample data. Also provides Manhattan/Euclidean
// reference encoders for accuracy comparison.
//
// Training is deterministic: same samples and configuration produce a
// bit-identical model. The split criterion (max per-dimension variance,
// median threshold) is a deliberately simple stand-in; it lives entirely
// behind the BdtTree interface and can be swapped without touching encode
// or decode.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "lutamm/amm.hpp"

namespace lutamm {

struct TrainingConfig {
    int levels = 4;
    int m = 1;
    uint64_t seed = 0;
};

struct LearnedModel {
    PartitionScheme scheme;
    int levels = 4;
    std::vector<BdtTree> trees;
    CodebookSet codebooks;          ///< prototypes in the real activation domain
    std::vector<bool> empty_leaves; ///< m * K flags, true where a leaf saw no samples
    double act_scale = 1.0;
    QuantizedLut lut;               ///< valid only when has_lut
    bool has_lut = false;

    int k() const { return 1 << levels; }
};

/// Greedy level-wise tree construction over unsigned 8-bit rows.
/// At each node: split on the dimension with maximal within-bucket variance
/// (ties toward the smaller index); threshold = median of that dimension
/// over the bucket (sorted[n/2], deterministic). Children partition the
/// bucket by the >=-threshold rule. An empty bucket inherits the parent's
/// split dimension with threshold 0 and is marked degenerate.
inline BdtTree learn_bdt(const MatU8& sub_samples, int levels) {
    if (levels < 1) throw dim_error("learn_bdt: levels must be >= 1");
    if (sub_samples.empty()) throw dim_error("learn_bdt: no samples");
    const int sd = static_cast<int>(sub_samples.cols());
    const int node_count = (1 << levels) - 1;
    std::vector<BdtNode> nodes(static_cast<std::size_t>(node_count));

    std::vector<std::size_t> all(sub_samples.rows());
    std::iota(all.begin(), all.end(), 0);
    std::vector<std::vector<std::size_t>> buckets{all};

    int idx = 0;
    for (int level = 0; level < levels; ++level) {
        std::vector<std::vector<std::size_t>> next;
        next.reserve(buckets.size() * 2);
        for (std::size_t b = 0; b < buckets.size(); ++b, ++idx) {
            auto& bucket = buckets[b];
            BdtNode& node = nodes[static_cast<std::size_t>(idx)];
            if (bucket.empty()) {
                const int parent = (idx - 1) / 2;
                node.split_dim = idx == 0 ? 0 : nodes[static_cast<std::size_t>(parent)].split_dim;
                node.threshold = 0;
                node.degenerate = true;
                next.emplace_back();
                next.emplace_back(); // threshold 0: everything would go right
                continue;
            }
            // pick dimension with max variance
            int best_dim = 0;
            double best_var = -1.0;
            for (int dim = 0; dim < sd; ++dim) {
                double s = 0.0, s2 = 0.0;
                for (std::size_t r : bucket) {
                    const double v = sub_samples.at(r, static_cast<std::size_t>(dim));
                    s += v;
                    s2 += v * v;
                }
                const double n = static_cast<double>(bucket.size());
                const double var = s2 / n - (s / n) * (s / n);
                if (var > best_var) {
                    best_var = var;
                    best_dim = dim;
                }
            }
            std::vector<uint8_t> vals;
            vals.reserve(bucket.size());
            for (std::size_t r : bucket)
                vals.push_back(sub_samples.at(r, static_cast<std::size_t>(best_dim)));
            std::sort(vals.begin(), vals.end());
            node.split_dim = best_dim;
            node.threshold = vals[vals.size() / 2];
            node.degenerate = best_var <= 0.0;

            std::vector<std::size_t> left, right;
            for (std::size_t r : bucket)
                (sub_samples.at(r, static_cast<std::size_t>(best_dim)) >= node.threshold ? right
                                                                                         : left)
                    .push_back(r);
            next.push_back(std::move(left));
            next.push_back(std::move(right));
        }
        buckets = std::move(next);
    }
    return BdtTree::make(levels, std::move(nodes), sd);
}

/// Prototype k = arithmetic mean of the samples the tree routes to leaf k.
/// Empty leaves get a zero prototype and a flag.
inline MatF fit_prototypes(const MatU8& sub_samples, const BdtTree& tree,
                           std::vector<bool>* empty_flags = nullptr) {
    const int k = tree.leaf_count();
    const std::size_t sd = sub_samples.cols();
    MatF protos(static_cast<std::size_t>(k), sd);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t r = 0; r < sub_samples.rows(); ++r) {
        const int code = bdt_encode(sub_samples.row(r), tree);
        ++counts[static_cast<std::size_t>(code)];
        for (std::size_t c = 0; c < sd; ++c)
            protos.at(static_cast<std::size_t>(code), c) += sub_samples.at(r, c);
    }
    if (empty_flags) empty_flags->assign(static_cast<std::size_t>(k), false);
    for (int kk = 0; kk < k; ++kk) {
        if (counts[static_cast<std::size_t>(kk)] == 0) {
            if (empty_flags) (*empty_flags)[static_cast<std::size_t>(kk)] = true;
            continue;
        }
        for (std::size_t c = 0; c < sd; ++c)
            protos.at(static_cast<std::size_t>(kk), c) /=
                static_cast<double>(counts[static_cast<std::size_t>(kk)]);
    }
    return protos;
}

/// Argmin over prototypes of the L1 distance; ties toward the smaller index.
inline int manhattan_encode(std::span<const double> sub, const MatF& protos) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t kk = 0; kk < protos.rows(); ++kk) {
        double d = 0.0;
        for (std::size_t c = 0; c < protos.cols(); ++c) d += std::abs(sub[c] - protos.at(kk, c));
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(kk);
        }
    }
    return best;
}

/// Argmin over prototypes of the squared L2 distance; ties toward smaller index.
inline int euclidean_encode(std::span<const double> sub, const MatF& protos) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t kk = 0; kk < protos.rows(); ++kk) {
        double d = 0.0;
        for (std::size_t c = 0; c < protos.cols(); ++c) {
            const double e = sub[c] - protos.at(kk, c);
            d += e * e;
        }
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(kk);
        }
    }
    return best;
}

/// Per-tensor activation scale: max element / 255 (full 8-bit range with no
/// clamping on the training set). The hardware comparator domain is unsigned,
/// so non-positive data degenerates to scale 1.
inline double pick_act_scale(const MatF& samples) {
    double mx = 0.0;
    for (double v : samples.data()) mx = std::max(mx, v);
    return mx > 0.0 ? mx / 255.0 : 1.0;
}

/// Trains trees and prototypes per subspace. Prototypes are stored in the
/// real activation domain (leaf means rescaled by act_scale), so a LUT built
/// from them approximates products against unquantized inputs directly.
inline LearnedModel train_model(const MatF& samples, const TrainingConfig& cfg) {
    if (samples.empty()) throw dim_error("train_model: samples are empty");
    LearnedModel model;
    model.scheme = PartitionScheme::make(static_cast<int>(samples.cols()), cfg.m);
    model.levels = cfg.levels;
    model.act_scale = pick_act_scale(samples);

    MatU8 q(samples.rows(), samples.cols());
    for (std::size_t r = 0; r < samples.rows(); ++r) {
        auto qr = quantize_activation(samples.row(r), model.act_scale);
        std::copy(qr.begin(), qr.end(), q.row(r).begin());
    }

    const int sd = model.scheme.sub_dim();
    model.codebooks.scheme = model.scheme;
    model.codebooks.k = 1 << cfg.levels;
    for (int mm = 0; mm < cfg.m; ++mm) {
        MatU8 sub(q.rows(), static_cast<std::size_t>(sd));
        for (std::size_t r = 0; r < q.rows(); ++r)
            for (int c = 0; c < sd; ++c)
                sub.at(r, static_cast<std::size_t>(c)) =
                    q.at(r, static_cast<std::size_t>(mm * sd + c));
        model.trees.push_back(learn_bdt(sub, cfg.levels));
        std::vector<bool> empty;
        MatF protos = fit_prototypes(sub, model.trees.back(), &empty);
        for (double& v : protos.data()) v *= model.act_scale;
        model.codebooks.prototypes.push_back(std::move(protos));
        model.empty_leaves.insert(model.empty_leaves.end(), empty.begin(), empty.end());
    }
    return model;
}

/// Per column, scale = max |float dot product| / 127 so nothing clamps at
/// LUT build time (falls back to 1 on an all-zero column).
inline std::vector<double> pick_lut_scales(const CodebookSet& codebooks, const MatF& w) {
    codebooks.validate();
    const int sd = codebooks.scheme.sub_dim();
    std::vector<double> scales(w.cols(), 0.0);
    for (int mm = 0; mm < codebooks.scheme.m; ++mm) {
        const MatF& protos = codebooks.prototypes[static_cast<std::size_t>(mm)];
        for (int kk = 0; kk < codebooks.k; ++kk)
            for (std::size_t j = 0; j < w.cols(); ++j) {
                double dot = 0.0;
                for (int e = 0; e < sd; ++e)
                    dot += protos.at(static_cast<std::size_t>(kk), static_cast<std::size_t>(e)) *
                           w.at(static_cast<std::size_t>(mm * sd + e), j);
                scales[j] = std::max(scales[j], std::abs(dot));
            }
    }
    for (double& s : scales) s = s > 0.0 ? s / 127.0 : 1.0;
    return scales;
}

inline void attach_lut(LearnedModel& model, const MatF& w) {
    auto scales = pick_lut_scales(model.codebooks, w);
    model.lut = build_lut(model.codebooks, w, scales);
    model.has_lut = true;
}

enum class EncoderKind { Bdt, Manhattan, Euclidean };

inline const char* encoder_name(EncoderKind k) {
    switch (k) {
    case EncoderKind::Bdt: return "bdt";
    case EncoderKind::Manhattan: return "manhattan";
    default: return "euclidean";
    }
}

/// Run the lookup GEMM with the chosen encoder substituted and report the
/// error against the exact product.
inline ErrorReport evaluate_encoder(EncoderKind kind, const MatF& rows,
                                    const LearnedModel& model, const MatF& w) {
    if (!model.has_lut) throw dim_error("evaluate_encoder: model has no LUT");
    const int sd = model.scheme.sub_dim();
    MatF approx(rows.rows(), static_cast<std::size_t>(model.lut.n_out));
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        const auto qrow = quantize_activation(rows.row(i), model.act_scale);
        std::vector<int> codes(static_cast<std::size_t>(model.scheme.m));
        for (int mm = 0; mm < model.scheme.m; ++mm) {
            if (kind == EncoderKind::Bdt) {
                codes[static_cast<std::size_t>(mm)] = bdt_encode(
                    std::span<const uint8_t>(qrow).subspan(static_cast<std::size_t>(mm * sd),
                                                           static_cast<std::size_t>(sd)),
                    model.trees[static_cast<std::size_t>(mm)]);
            } else {
                // nearest-prototype encoders work in the real domain
                auto sub = rows.row(i).subspan(static_cast<std::size_t>(mm * sd),
                                               static_cast<std::size_t>(sd));
                const auto& protos = model.codebooks.prototypes[static_cast<std::size_t>(mm)];
                codes[static_cast<std::size_t>(mm)] = kind == EncoderKind::Manhattan
                                                          ? manhattan_encode(sub, protos)
                                                          : euclidean_encode(sub, protos);
            }
        }
        const auto dec = decode_accumulate(codes, model.lut);
        for (int j = 0; j < model.lut.n_out; ++j)
            approx.at(i, static_cast<std::size_t>(j)) =
                static_cast<double>(dec.out[static_cast<std::size_t>(j)]) *
                model.lut.scales[static_cast<std::size_t>(j)];
    }
    return error_metrics(approx, exact_gemm(rows, w));
}

} // namespace lutamm
