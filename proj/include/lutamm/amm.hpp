#pragma once

// Functional (timing-free) lookup-table approximate matrix multiplication:
// subvector partitioning, balanced-decision-tree encoding, LUT construction,
// lookup-accumulate GEMM, exact reference GEMM and error metrics.
//
// All functions here are pure over immutable inputs and safe to call from
// many threads concurrently.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lutamm/common.hpp"
#include "lutamm/matrix.hpp"

namespace lutamm {

/// How a d-dimensional input splits into M equal subvectors.
struct PartitionScheme {
    int d = 0; ///< input dimensionality
    int m = 0; ///< number of subspaces

    int sub_dim() const { return d / m; }

    static PartitionScheme make(int d, int m) {
        if (m < 1 || d < 1 || d % m != 0)
            throw dim_error("partition scheme: d=" + std::to_string(d) +
                            " not divisible into m=" + std::to_string(m) + " subvectors");
        return PartitionScheme{d, m};
    }

    bool operator==(const PartitionScheme&) const = default;
};

struct BdtNode {
    int split_dim = 0;       ///< index into the subvector
    uint8_t threshold = 0;   ///< unsigned 8-bit compare value
    bool degenerate = false; ///< set by training when the node's bucket was empty/constant

    bool operator==(const BdtNode&) const = default;
};

/// Balanced binary decision tree, nodes stored level-by-level (heap order:
/// children of node i are 2i+1 / 2i+2). Depth `levels`, 2^levels - 1 nodes.
struct BdtTree {
    int levels = 4;
    std::vector<BdtNode> nodes;

    int leaf_count() const { return 1 << levels; }

    static BdtTree make(int levels, std::vector<BdtNode> nodes, int sub_dim) {
        if (levels < 1) throw dim_error("bdt: levels must be >= 1");
        const std::size_t expect = (std::size_t{1} << levels) - 1;
        if (nodes.size() != expect)
            throw dim_error("bdt: expected " + std::to_string(expect) + " nodes, got " +
                            std::to_string(nodes.size()));
        for (const auto& n : nodes)
            if (n.split_dim < 0 || n.split_dim >= sub_dim)
                throw dim_error("bdt: split_dim " + std::to_string(n.split_dim) +
                                " out of range for sub_dim " + std::to_string(sub_dim));
        return BdtTree{levels, std::move(nodes)};
    }

    bool operator==(const BdtTree&) const = default;
};

/// Per-subspace prototype vectors: m matrices of shape K x sub_dim.
struct CodebookSet {
    PartitionScheme scheme;
    int k = 16;
    std::vector<MatF> prototypes; ///< one K x sub_dim matrix per subspace

    void validate() const {
        if (static_cast<int>(prototypes.size()) != scheme.m)
            throw dim_error("codebook: need one prototype matrix per subspace");
        for (const auto& p : prototypes)
            if (static_cast<int>(p.rows()) != k ||
                static_cast<int>(p.cols()) != scheme.sub_dim())
                throw dim_error("codebook: prototype matrix shape mismatch");
    }
};

/// M x K x N_out signed 8-bit precomputed dot products plus per-output-column
/// dequantization scales.
struct QuantizedLut {
    int m = 0;
    int k = 0;
    int n_out = 0;
    std::vector<int8_t> entries;  ///< size m*k*n_out, index [mm][kk][j]
    std::vector<double> scales;   ///< size n_out, all > 0

    int8_t at(int mm, int kk, int j) const {
        return entries[(static_cast<std::size_t>(mm) * k + kk) * n_out + j];
    }
    int8_t& at(int mm, int kk, int j) {
        return entries[(static_cast<std::size_t>(mm) * k + kk) * n_out + j];
    }
};

struct ErrorReport {
    double mse = 0.0;
    double rel_frobenius = 0.0; ///< ||approx - exact||_F / ||exact||_F
    double max_abs = 0.0;
};

// ---------------------------------------------------------------------------

/// Split x into M equal subvectors. Concatenation of the result equals x.
inline std::vector<std::vector<double>> partition_input(std::span<const double> x,
                                                        const PartitionScheme& scheme) {
    if (static_cast<int>(x.size()) != scheme.d)
        throw dim_error("partition_input: vector length " + std::to_string(x.size()) +
                        " != d=" + std::to_string(scheme.d));
    const int sd = scheme.sub_dim();
    std::vector<std::vector<double>> out(scheme.m);
    for (int i = 0; i < scheme.m; ++i)
        out[i].assign(x.begin() + static_cast<std::ptrdiff_t>(i) * sd,
                      x.begin() + static_cast<std::ptrdiff_t>(i + 1) * sd);
    return out;
}

/// Quantize a real vector to unsigned 8-bit counts: round(x/act_scale),
/// half away from zero, clamped to [0, 255].
inline std::vector<uint8_t> quantize_activation(std::span<const double> x, double act_scale) {
    if (!(act_scale > 0.0)) throw dim_error("quantize_activation: act_scale must be > 0");
    std::vector<uint8_t> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) throw data_error("quantize_activation: non-finite input");
        out[i] = clamp_u8(round_haz_i64(x[i] / act_scale));
    }
    return out;
}

/// Walk the tree over an unsigned 8-bit subvector. At each level the branch
/// bit is 1 iff element >= threshold; the level-0 decision is the MSB of the
/// returned code. Reads exactly `levels` elements.
inline int bdt_encode(std::span<const uint8_t> sub, const BdtTree& tree) {
    int code = 0;
    int idx = 0;
    for (int level = 0; level < tree.levels; ++level) {
        const BdtNode& n = tree.nodes[idx];
        const int bit = sub[static_cast<std::size_t>(n.split_dim)] >= n.threshold ? 1 : 0;
        code = (code << 1) | bit;
        idx = 2 * idx + 1 + bit;
    }
    return code;
}

/// Encode every row of X: codes[i][mm] = bdt_encode(subvector mm of row i).
inline std::vector<std::vector<int>> encode_all(const MatU8& x,
                                                const std::vector<BdtTree>& trees,
                                                const PartitionScheme& scheme) {
    if (static_cast<int>(x.cols()) != scheme.d)
        throw dim_error("encode_all: row length != d");
    if (static_cast<int>(trees.size()) != scheme.m)
        throw dim_error("encode_all: need one tree per subspace");
    const int sd = scheme.sub_dim();
    std::vector<std::vector<int>> codes(x.rows(), std::vector<int>(scheme.m));
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto row = x.row(i);
        for (int mm = 0; mm < scheme.m; ++mm)
            codes[i][mm] = bdt_encode(row.subspan(static_cast<std::size_t>(mm) * sd, sd),
                                      trees[static_cast<std::size_t>(mm)]);
    }
    return codes;
}

/// Precompute the quantized LUT: entry[mm][kk][j] = clamp(round(
/// dot(prototype, W row-slice column j) / scale_j), -128, 127).
inline QuantizedLut build_lut(const CodebookSet& codebooks, const MatF& w,
                              const std::vector<double>& lut_scales) {
    codebooks.validate();
    const auto& scheme = codebooks.scheme;
    if (static_cast<int>(w.rows()) != scheme.d)
        throw dim_error("build_lut: weight row count != d");
    const int n_out = static_cast<int>(w.cols());
    if (static_cast<int>(lut_scales.size()) != n_out)
        throw dim_error("build_lut: need one scale per output column");
    for (double s : lut_scales)
        if (!(s > 0.0)) throw dim_error("build_lut: scales must be > 0");

    const int sd = scheme.sub_dim();
    QuantizedLut lut;
    lut.m = scheme.m;
    lut.k = codebooks.k;
    lut.n_out = n_out;
    lut.scales = lut_scales;
    lut.entries.resize(static_cast<std::size_t>(lut.m) * lut.k * n_out);
    for (int mm = 0; mm < lut.m; ++mm) {
        const MatF& protos = codebooks.prototypes[static_cast<std::size_t>(mm)];
        for (int kk = 0; kk < lut.k; ++kk) {
            for (int j = 0; j < n_out; ++j) {
                double dot = 0.0;
                for (int e = 0; e < sd; ++e)
                    dot += protos.at(kk, e) * w.at(static_cast<std::size_t>(mm) * sd + e, j);
                lut.at(mm, kk, j) = clamp_i8(round_haz_i64(dot / lut_scales[static_cast<std::size_t>(j)]));
            }
        }
    }
    return lut;
}

struct DecodeResult {
    std::vector<int16_t> out;
    bool overflow = false; ///< some partial sum left [-32768, 32767]; diagnostic, not fatal
};

/// Accumulate the selected LUT rows in signed 16-bit two's-complement
/// arithmetic (wrapping), flagging any excursion past the 16-bit range.
inline DecodeResult decode_accumulate(std::span<const int> codes, const QuantizedLut& lut) {
    if (static_cast<int>(codes.size()) != lut.m)
        throw dim_error("decode_accumulate: code count != m");
    for (int c : codes)
        if (c < 0 || c >= lut.k) throw dim_error("decode_accumulate: code out of range");
    DecodeResult r;
    r.out.assign(static_cast<std::size_t>(lut.n_out), 0);
    for (int j = 0; j < lut.n_out; ++j) {
        int32_t true_sum = 0;
        uint16_t acc = 0;
        for (int mm = 0; mm < lut.m; ++mm) {
            const int8_t e = lut.at(mm, codes[static_cast<std::size_t>(mm)], j);
            true_sum += e;
            acc = static_cast<uint16_t>(acc + static_cast<uint16_t>(static_cast<int16_t>(e)));
            if (true_sum < -32768 || true_sum > 32767) r.overflow = true;
        }
        r.out[static_cast<std::size_t>(j)] = static_cast<int16_t>(acc);
    }
    return r;
}

/// Plain real-valued matrix product; accumulation in 64-bit floating point.
inline MatF exact_gemm(const MatF& x, const MatF& w) {
    if (x.cols() != w.rows()) throw dim_error("exact_gemm: inner dimensions disagree");
    MatF out(x.rows(), w.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t kk = 0; kk < x.cols(); ++kk) {
            const double xv = x.at(i, kk);
            for (std::size_t j = 0; j < w.cols(); ++j) out.at(i, j) += xv * w.at(kk, j);
        }
    return out;
}

/// Lookup-accumulate GEMM over already-quantized rows; output dequantized
/// with the LUT's per-column scales.
inline MatF amm_gemm(const MatU8& xq, const std::vector<BdtTree>& trees,
                     const QuantizedLut& lut, const PartitionScheme& scheme,
                     bool* overflow = nullptr) {
    const auto codes = encode_all(xq, trees, scheme);
    MatF out(xq.rows(), static_cast<std::size_t>(lut.n_out));
    bool ovf = false;
    for (std::size_t i = 0; i < xq.rows(); ++i) {
        const auto dec = decode_accumulate(codes[i], lut);
        ovf = ovf || dec.overflow;
        for (int j = 0; j < lut.n_out; ++j)
            out.at(i, static_cast<std::size_t>(j)) =
                static_cast<double>(dec.out[static_cast<std::size_t>(j)]) *
                lut.scales[static_cast<std::size_t>(j)];
    }
    if (overflow) *overflow = ovf;
    return out;
}

inline ErrorReport error_metrics(const MatF& approx, const MatF& exact) {
    if (approx.rows() != exact.rows() || approx.cols() != exact.cols())
        throw dim_error("error_metrics: shape mismatch");
    ErrorReport r;
    double sq = 0.0, ref_sq = 0.0;
    for (std::size_t i = 0; i < approx.size(); ++i) {
        const double d = approx.data()[i] - exact.data()[i];
        sq += d * d;
        ref_sq += exact.data()[i] * exact.data()[i];
        r.max_abs = std::max(r.max_abs, std::abs(d));
    }
    r.mse = approx.size() ? sq / static_cast<double>(approx.size()) : 0.0;
    r.rel_frobenius = ref_sq > 0.0 ? std::sqrt(sq / ref_sq) : (sq > 0.0 ? INFINITY : 0.0);
    return r;
}

} // namespace lutamm
