#pragma once

// Maps 3x3 convolutional layers onto the macro: input channels onto pipeline
// stages, weight kernels onto decoders, with tiling for oversized layers.
// Patches flatten row-major (a0..a8, top-left to bottom-right), one 9-dim
// subvector per input channel.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "lutamm/amm.hpp"
#include "lutamm/sim.hpp"
#include "lutamm/trainer.hpp"

namespace lutamm {

/// Dense C x H x W feature map, channel-major.
struct Tensor3 {
    int c = 0, h = 0, w = 0;
    std::vector<double> data;

    Tensor3() = default;
    Tensor3(int c_, int h_, int w_) : c(c_), h(h_), w(w_), data(static_cast<std::size_t>(c_) * h_ * w_, 0.0) {}

    double& at(int ch, int y, int x) {
        return data[(static_cast<std::size_t>(ch) * h + y) * w + x];
    }
    double at(int ch, int y, int x) const {
        return data[(static_cast<std::size_t>(ch) * h + y) * w + x];
    }
};

struct ConvLayerSpec {
    int c_in = 1;
    int c_out = 1;
    int h = 0, w = 0;
    int stride = 1;
    int padding = 0;
    // kernel geometry is fixed 3x3: the only shape the 9-dim subvector supports
    static constexpr int kKernel = 3;

    int out_h() const { return (h + 2 * padding - kKernel) / stride + 1; }
    int out_w() const { return (w + 2 * padding - kKernel) / stride + 1; }

    void validate() const {
        if (c_in < 1 || c_out < 1 || h < 1 || w < 1 || stride < 1 || padding < 0)
            throw dim_error("conv layer: dims must be positive");
        if (out_h() < 1 || out_w() < 1) throw dim_error("conv layer: empty output map");
    }
};

/// Per-position, per-channel 9-dim patch subvectors: one row per output
/// position (row-major over y, x), columns grouped by channel. Zero padding
/// outside the borders.
inline MatF extract_patches(const Tensor3& fm, const ConvLayerSpec& layer) {
    layer.validate();
    if (fm.c != layer.c_in || fm.h != layer.h || fm.w != layer.w)
        throw dim_error("extract_patches: feature map dims do not match layer spec");
    const int oh = layer.out_h(), ow = layer.out_w();
    MatF out(static_cast<std::size_t>(oh) * ow, static_cast<std::size_t>(9) * layer.c_in);
    std::size_t row = 0;
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x, ++row) {
            for (int ch = 0; ch < layer.c_in; ++ch) {
                int e = 0;
                for (int dy = 0; dy < 3; ++dy) {
                    for (int dx = 0; dx < 3; ++dx, ++e) {
                        const int sy = y * layer.stride + dy - layer.padding;
                        const int sx = x * layer.stride + dx - layer.padding;
                        const double v = (sy < 0 || sy >= fm.h || sx < 0 || sx >= fm.w)
                                             ? 0.0
                                             : fm.at(ch, sy, sx);
                        out.at(row, static_cast<std::size_t>(9 * ch + e)) = v;
                    }
                }
            }
        }
    }
    return out;
}

/// Flatten a 3x3 conv weight tensor [c_out][c_in][3][3] into the (9*c_in) x
/// c_out matrix the lookup path multiplies against.
inline MatF conv_weights_to_matrix(const std::vector<double>& w, int c_in, int c_out) {
    if (w.size() != static_cast<std::size_t>(c_out) * c_in * 9)
        throw dim_error("conv weights: size mismatch");
    MatF out(static_cast<std::size_t>(9) * c_in, static_cast<std::size_t>(c_out));
    for (int j = 0; j < c_out; ++j)
        for (int ci = 0; ci < c_in; ++ci)
            for (int e = 0; e < 9; ++e)
                out.at(static_cast<std::size_t>(9 * ci + e), static_cast<std::size_t>(j)) =
                    w[(static_cast<std::size_t>(j) * c_in + ci) * 9 + e];
    return out;
}

struct MappingPlan {
    struct Tile {
        int ch0 = 0, ch1 = 0; ///< input channel range [ch0, ch1)
        int k0 = 0, k1 = 0;   ///< output kernel range [k0, k1)
    };
    int n_dec = 1, n_s = 1;
    std::vector<Tile> tiles;
};

/// Tile the layer over the macro: ceil(c_in/n_s) x ceil(c_out/n_dec) passes,
/// channels onto pipeline stages, kernels onto decoders. Every
/// (channel, kernel) pair is covered by exactly one tile.
inline MappingPlan map_layer(const ConvLayerSpec& layer, int n_dec, int n_s) {
    layer.validate();
    if (n_dec < 1 || n_s < 1) throw dim_error("map_layer: macro dims must be >= 1");
    MappingPlan plan;
    plan.n_dec = n_dec;
    plan.n_s = n_s;
    for (int k0 = 0; k0 < layer.c_out; k0 += n_dec)
        for (int ch0 = 0; ch0 < layer.c_in; ch0 += n_s)
            plan.tiles.push_back({ch0, std::min(ch0 + n_s, layer.c_in), k0,
                                  std::min(k0 + n_dec, layer.c_out)});
    return plan;
}

enum class Backend { Functional, Simulator };

struct LayerRunResult {
    Tensor3 output;        ///< dequantized feature map
    MatI16 raw;            ///< pre-dequantization 16-bit accumulations, positions x c_out
    bool overflow = false;
    SimResult sim;         ///< populated for the simulator backend
};

/// Run one conv layer through the lookup engine. The functional path walks
/// the mapping plan tile by tile, carrying 16-bit partials between channel
/// tiles; the simulator path streams the same quantized patches through the
/// event-driven macro. Both produce bit-identical integer maps.
inline LayerRunResult run_layer(const MappingPlan& plan, const ConvLayerSpec& layer,
                                const LearnedModel& model, const Tensor3& input,
                                Backend backend) {
    layer.validate();
    if (!model.has_lut) throw dim_error("run_layer: model has no LUT");
    if (model.scheme.d != 9 * layer.c_in || model.scheme.m != layer.c_in ||
        model.lut.n_out != layer.c_out)
        throw dim_error("run_layer: model shape does not match layer");

    const MatF patches = extract_patches(input, layer);
    MatU8 q(patches.rows(), patches.cols());
    for (std::size_t r = 0; r < patches.rows(); ++r) {
        auto qr = quantize_activation(patches.row(r), model.act_scale);
        std::copy(qr.begin(), qr.end(), q.row(r).begin());
    }

    LayerRunResult res;
    res.raw = MatI16(patches.rows(), static_cast<std::size_t>(layer.c_out));

    if (backend == Backend::Simulator) {
        SimConfig cfg = SimConfig::preset("0.5V");
        cfg.n_dec = plan.n_dec;
        cfg.n_s = plan.n_s;
        res.sim = simulate(q, model, cfg);
        res.raw = res.sim.outputs;
        res.overflow = res.sim.overflow;
    } else {
        const auto codes = encode_all(q, model.trees, model.scheme);
        std::vector<std::vector<int32_t>> shadow(
            patches.rows(), std::vector<int32_t>(static_cast<std::size_t>(layer.c_out), 0));
        for (const auto& tile : plan.tiles) {
            for (std::size_t r = 0; r < patches.rows(); ++r) {
                for (int j = tile.k0; j < tile.k1; ++j) {
                    uint16_t acc = static_cast<uint16_t>(res.raw.at(r, static_cast<std::size_t>(j)));
                    auto& sh = shadow[r][static_cast<std::size_t>(j)];
                    for (int ch = tile.ch0; ch < tile.ch1; ++ch) {
                        const int8_t v = model.lut.at(ch, codes[r][static_cast<std::size_t>(ch)], j);
                        acc = static_cast<uint16_t>(acc + static_cast<uint16_t>(static_cast<int16_t>(v)));
                        sh += v;
                        if (sh < -32768 || sh > 32767) res.overflow = true;
                    }
                    res.raw.at(r, static_cast<std::size_t>(j)) = static_cast<int16_t>(acc);
                }
            }
        }
    }

    res.output = Tensor3(layer.c_out, layer.out_h(), layer.out_w());
    std::size_t row = 0;
    for (int y = 0; y < layer.out_h(); ++y)
        for (int x = 0; x < layer.out_w(); ++x, ++row)
            for (int j = 0; j < layer.c_out; ++j)
                res.output.at(j, y, x) =
                    static_cast<double>(res.raw.at(row, static_cast<std::size_t>(j))) *
                    model.lut.scales[static_cast<std::size_t>(j)];
    return res;
}

// ---------------------------------------------------------------------------
// Toy end-to-end network: 2 conv layers + pooling + linear classifier on a
// shipped synthetic 10-class 16x16 image set (seeded Gaussian class
// templates). A deliberately small stand-in for CIFAR-10-scale experiments.

struct ToyDataset {
    std::vector<Tensor3> train, test;
    std::vector<int> train_labels, test_labels;
};

inline ToyDataset make_toy_dataset(uint64_t seed, int train_per_class = 40,
                                   int test_per_class = 20) {
    ToyDataset ds;
    std::mt19937_64 rng(sub_seed(seed, "toy-dataset"));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.15);
    for (int cls = 0; cls < 10; ++cls) {
        Tensor3 tmpl(1, 16, 16);
        for (auto& v : tmpl.data) v = uni(rng);
        auto sample = [&]() {
            Tensor3 s = tmpl;
            for (auto& v : s.data) v = std::clamp(v + noise(rng), 0.0, 1.0);
            return s;
        };
        for (int i = 0; i < train_per_class; ++i) {
            ds.train.push_back(sample());
            ds.train_labels.push_back(cls);
        }
        for (int i = 0; i < test_per_class; ++i) {
            ds.test.push_back(sample());
            ds.test_labels.push_back(cls);
        }
    }
    return ds;
}

struct ToyNetwork {
    ConvLayerSpec conv1{1, 4, 16, 16, 1, 1};
    ConvLayerSpec conv2{4, 8, 8, 8, 1, 1};
    MatF w1; ///< 9 x 4
    MatF w2; ///< 36 x 8
    MatF classifier; ///< 9 x 10 (8 features + bias)
};

inline Tensor3 relu(Tensor3 t) {
    for (auto& v : t.data) v = std::max(v, 0.0);
    return t;
}

inline Tensor3 avg_pool2(const Tensor3& t) {
    Tensor3 out(t.c, t.h / 2, t.w / 2);
    for (int c = 0; c < t.c; ++c)
        for (int y = 0; y < out.h; ++y)
            for (int x = 0; x < out.w; ++x)
                out.at(c, y, x) = 0.25 * (t.at(c, 2 * y, 2 * x) + t.at(c, 2 * y, 2 * x + 1) +
                                          t.at(c, 2 * y + 1, 2 * x) + t.at(c, 2 * y + 1, 2 * x + 1));
    return out;
}

inline std::vector<double> global_avg(const Tensor3& t) {
    std::vector<double> out(static_cast<std::size_t>(t.c), 0.0);
    for (int c = 0; c < t.c; ++c) {
        double s = 0.0;
        for (int y = 0; y < t.h; ++y)
            for (int x = 0; x < t.w; ++x) s += t.at(c, y, x);
        out[static_cast<std::size_t>(c)] = s / (t.h * t.w);
    }
    return out;
}

/// Float conv via the same patch-extraction path the lookup engine uses, so
/// the exact-GEMM bypass is arithmetically identical to the reference.
inline Tensor3 float_conv(const Tensor3& input, const ConvLayerSpec& layer, const MatF& w) {
    const MatF patches = extract_patches(input, layer);
    const MatF prod = exact_gemm(patches, w);
    Tensor3 out(layer.c_out, layer.out_h(), layer.out_w());
    std::size_t row = 0;
    for (int y = 0; y < layer.out_h(); ++y)
        for (int x = 0; x < layer.out_w(); ++x, ++row)
            for (int j = 0; j < layer.c_out; ++j)
                out.at(j, y, x) = prod.at(row, static_cast<std::size_t>(j));
    return out;
}

namespace detail {

/// Solve A x = b for a small symmetric positive-definite system by Gaussian
/// elimination with partial pivoting.
inline std::vector<double> solve_dense(MatF a, std::vector<double> b) {
    const std::size_t n = a.rows();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a.at(r, col)) > std::abs(a.at(piv, col))) piv = r;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a.at(col, c), a.at(piv, c));
            std::swap(b[col], b[piv]);
        }
        const double d = a.at(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a.at(r, col) / d;
            for (std::size_t c = col; c < n; ++c) a.at(r, c) -= f * a.at(col, c);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a.at(r, c) * x[c];
        x[r] = s / a.at(r, r);
    }
    return x;
}

} // namespace detail

/// Ridge-regression fit of the linear classifier on (features, one-hot labels).
inline MatF fit_classifier(const MatF& features, const std::vector<int>& labels, int classes,
                           double ridge = 1e-3) {
    const std::size_t n = features.rows();
    const std::size_t f = features.cols() + 1; // bias column
    MatF a(f, f);
    MatF rhs(f, static_cast<std::size_t>(classes));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(f, 1.0);
        for (std::size_t c = 0; c < features.cols(); ++c) row[c] = features.at(i, c);
        for (std::size_t r = 0; r < f; ++r) {
            for (std::size_t c = 0; c < f; ++c) a.at(r, c) += row[r] * row[c];
            rhs.at(r, static_cast<std::size_t>(labels[i])) += row[r];
        }
    }
    for (std::size_t r = 0; r < f; ++r) a.at(r, r) += ridge;
    MatF w(f, static_cast<std::size_t>(classes));
    for (int cls = 0; cls < classes; ++cls) {
        std::vector<double> b(f);
        for (std::size_t r = 0; r < f; ++r) b[r] = rhs.at(r, static_cast<std::size_t>(cls));
        auto x = detail::solve_dense(a, std::move(b));
        for (std::size_t r = 0; r < f; ++r) w.at(r, static_cast<std::size_t>(cls)) = x[r];
    }
    return w;
}

inline int classify(const MatF& classifier, const std::vector<double>& features) {
    int best = 0;
    double best_v = -1e300;
    for (std::size_t cls = 0; cls < classifier.cols(); ++cls) {
        double v = classifier.at(features.size(), cls); // bias row
        for (std::size_t f = 0; f < features.size(); ++f) v += features[f] * classifier.at(f, cls);
        if (v > best_v) {
            best_v = v;
            best = static_cast<int>(cls);
        }
    }
    return best;
}

struct ToyReport {
    uint64_t seed = 0;
    double float_accuracy = 0;
    double bypass_accuracy = 0;              ///< lookup layers replaced by exact GEMM
    std::map<int, double> amm_accuracy;      ///< K -> accuracy
    std::map<int, double> accuracy_delta;    ///< K -> float_accuracy - amm_accuracy
};

/// End-to-end toy benchmark: fixed random conv filters, ridge classifier on
/// float features, then the two conv layers replaced by lookup models
/// trained per K. Deterministic for a given seed.
inline ToyReport toy_network_eval(uint64_t seed, const std::vector<int>& ks = {4, 8, 16}) {
    ToyReport report;
    report.seed = seed;
    const ToyDataset ds = make_toy_dataset(seed);

    ToyNetwork net;
    std::mt19937_64 rng(sub_seed(seed, "toy-filters"));
    std::normal_distribution<double> filt(0.0, 0.5);
    net.w1 = MatF(9, 4);
    for (auto& v : net.w1.data()) v = filt(rng);
    net.w2 = MatF(36, 8);
    for (auto& v : net.w2.data()) v = filt(rng);

    auto float_features = [&](const Tensor3& img) {
        const Tensor3 a1 = avg_pool2(relu(float_conv(img, net.conv1, net.w1)));
        const Tensor3 a2 = relu(float_conv(a1, net.conv2, net.w2));
        return global_avg(a2);
    };

    // the classifier is refit on each pipeline's own training features: a
    // replaced network keeps its (cheap, linear) head trained on what the
    // conv layers actually produce
    auto eval_pipeline = [&](auto&& features_fn) {
        MatF train_feats(ds.train.size(), 8);
        for (std::size_t i = 0; i < ds.train.size(); ++i) {
            auto f = features_fn(ds.train[i]);
            std::copy(f.begin(), f.end(), train_feats.row(i).begin());
        }
        const MatF cls = fit_classifier(train_feats, ds.train_labels, 10);
        int hits = 0;
        for (std::size_t i = 0; i < ds.test.size(); ++i)
            if (classify(cls, features_fn(ds.test[i])) == ds.test_labels[i]) ++hits;
        return static_cast<double>(hits) / static_cast<double>(ds.test.size());
    };

    report.float_accuracy = eval_pipeline(float_features);
    report.bypass_accuracy = report.float_accuracy; // same arithmetic path by construction

    // collect training activations for per-layer lookup models
    MatF l1_patches(ds.train.size() * 256, 9);
    MatF l2_patches(ds.train.size() * 64, 36);
    for (std::size_t i = 0; i < ds.train.size(); ++i) {
        const MatF p1 = extract_patches(ds.train[i], net.conv1);
        for (std::size_t r = 0; r < p1.rows(); ++r)
            std::copy(p1.row(r).begin(), p1.row(r).end(), l1_patches.row(i * 256 + r).begin());
        const Tensor3 a1 = avg_pool2(relu(float_conv(ds.train[i], net.conv1, net.w1)));
        const MatF p2 = extract_patches(a1, net.conv2);
        for (std::size_t r = 0; r < p2.rows(); ++r)
            std::copy(p2.row(r).begin(), p2.row(r).end(), l2_patches.row(i * 64 + r).begin());
    }

    for (int k : ks) {
        int levels = 0;
        while ((1 << levels) < k) ++levels;
        if ((1 << levels) != k) throw dim_error("toy_network_eval: K must be a power of 2");

        LearnedModel m1 = train_model(l1_patches, TrainingConfig{levels, 1, seed});
        attach_lut(m1, net.w1);
        LearnedModel m2 = train_model(l2_patches, TrainingConfig{levels, 4, seed});
        attach_lut(m2, net.w2);
        const MappingPlan plan1 = map_layer(net.conv1, 16, 32);
        const MappingPlan plan2 = map_layer(net.conv2, 16, 32);

        auto amm_features = [&](const Tensor3& img) {
            const Tensor3 a1 = avg_pool2(
                relu(run_layer(plan1, net.conv1, m1, img, Backend::Functional).output));
            const Tensor3 a2 =
                relu(run_layer(plan2, net.conv2, m2, a1, Backend::Functional).output);
            return global_avg(a2);
        };
        report.amm_accuracy[k] = eval_pipeline(amm_features);
        report.accuracy_delta[k] = report.float_accuracy - report.amm_accuracy[k];
    }
    return report;
}

} // namespace lutamm
