#pragma once

// Event-driven, bit-exact model of the self-synchronous accelerator:
// dynamic-logic-comparator encoder timing, SRAM-LUT decode with
// read-completion detection, carry-save pipeline accumulation, four-phase
// handshake between blocks, and energy/latency accounting.
//
// Granularity: one event per encoder traverse, decoder read, handshake
// phase and final ripple-carry add. The per-bit comparator stages inside a
// DLC are folded into a closed-form latency; only the resolved stage count
// affects timing. One simulation instance owns its event queue and is
// single-threaded; independent instances may run concurrently.

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <ostream>
#include <queue>
#include <span>
#include <vector>

#include "lutamm/amm.hpp"
#include "lutamm/sim_params.hpp"
#include "lutamm/trainer.hpp"

namespace lutamm {

// ---------------------------------------------------------------------------
// Dynamic logic comparator

/// Dual-rail comparator outcome. `stages` is the bit position at which the
/// dual-rail output resolved: 1 when the MSBs differ, 8 when the operands
/// agree down to bit 1 (equality propagates through all eight stages and
/// resolves as not-greater).
struct DlcResult {
    bool greater = false;
    int stages = 8;
};

inline DlcResult dlc_compare(uint8_t a, uint8_t b) {
    for (int bit = 7; bit >= 0; --bit) {
        const int ab = (a >> bit) & 1;
        const int bb = (b >> bit) & 1;
        if (ab != bb) return DlcResult{ab > bb, 8 - bit};
    }
    return DlcResult{false, 8};
}

// ---------------------------------------------------------------------------
// Encoder / decoder unit models

struct TraverseResult {
    int code = 0;
    double latency_ps = 0;
    double energy_fj = 0;
};

/// Walk the 4-level DLC tournament. Only the four DLCs on the taken path
/// evaluate (the others keep their precharge), so energy is 4 x e_dlc_eval
/// regardless of data; latency is the sum of the resolved stage depths plus
/// the per-level path-select overhead. The code is bit-exact with the
/// functional bdt_encode: branch bit = (element >= threshold), which the
/// DLC realizes as NOT(threshold > element).
inline TraverseResult encoder_traverse(std::span<const uint8_t> sub, const BdtTree& tree,
                                       const SimConfig& cfg) {
    if (tree.levels != 4) throw sim_fault("encoder_traverse: hardware tree depth is 4");
    TraverseResult r;
    int idx = 0;
    for (int level = 0; level < tree.levels; ++level) {
        const BdtNode& n = tree.nodes[static_cast<std::size_t>(idx)];
        const DlcResult d = dlc_compare(n.threshold, sub[static_cast<std::size_t>(n.split_dim)]);
        const int bit = d.greater ? 0 : 1;
        r.latency_ps += d.stages * cfg.timing.t_dlc_stage + cfg.timing.t_mux;
        r.code = (r.code << 1) | bit;
        idx = 2 * idx + 1 + bit;
    }
    r.energy_fj = 4 * cfg.energy.e_dlc_eval;
    return r;
}

/// Number of NAND/NOR levels in the read-completion tree: depth 3 covers the
/// 8 columns of one LUT, plus ceil(log2(n_dec)) levels of cross-LUT
/// aggregation into the block-level RCD signal.
inline int rcd_depth(int n_dec) {
    int extra = 0;
    while ((1 << extra) < n_dec) ++extra;
    return 3 + extra;
}

inline double decoder_latency_ps(const SimConfig& cfg) {
    return cfg.timing.t_sram_read + cfg.timing.t_fa + cfg.timing.t_rcd_gate * rcd_depth(cfg.n_dec);
}

inline double decoder_energy_fj(const SimConfig& cfg) {
    return 8 * cfg.energy.e_sram_read_col + cfg.energy.e_fa + cfg.energy.e_latch;
}

struct DecoderReadResult {
    int8_t value = 0;
    double latency_ps = 0;
    double energy_fj = 0;
};

/// One decoder read: the 16-row SRAM slice holds one 8-bit entry per code.
/// A code outside the row range means a wordline one-hot failure; that is an
/// invariant breach and halts the run.
inline DecoderReadResult decoder_read(int code, std::span<const int8_t> rows,
                                      const SimConfig& cfg) {
    if (code < 0 || code >= static_cast<int>(rows.size()))
        throw sim_fault("decoder_read: code " + std::to_string(code) + " out of range");
    return DecoderReadResult{rows[static_cast<std::size_t>(code)], decoder_latency_ps(cfg),
                             decoder_energy_fj(cfg)};
}

// ---------------------------------------------------------------------------
// Carry-save accumulation

/// (sum, carry) accumulator state. Semantic value = sum + carry mod 2^16,
/// two's complement; preserved by every csa_add.
struct CsaPair {
    int16_t sum = 0;
    int16_t carry = 0;

    bool operator==(const CsaPair&) const = default;
};

inline CsaPair csa_add(CsaPair acc, int16_t value) {
    const uint16_t s = static_cast<uint16_t>(acc.sum);
    const uint16_t c = static_cast<uint16_t>(acc.carry);
    const uint16_t v = static_cast<uint16_t>(value);
    const uint16_t sum = s ^ c ^ v;
    const uint16_t carry = static_cast<uint16_t>(((s & c) | (s & v) | (c & v)) << 1);
    return CsaPair{static_cast<int16_t>(sum), static_cast<int16_t>(carry)};
}

/// Resolve the pair with the final ripple-carry addition (wrapping 16-bit).
/// The optional flag reports a wrap past the 16-bit range.
inline int16_t final_rca(CsaPair acc, bool* overflow = nullptr) {
    const int32_t wide = static_cast<int32_t>(acc.sum) + static_cast<int32_t>(acc.carry);
    const int16_t out =
        static_cast<int16_t>(static_cast<uint16_t>(acc.sum) + static_cast<uint16_t>(acc.carry));
    if (overflow) *overflow = wide < -32768 || wide > 32767;
    return out;
}

// ---------------------------------------------------------------------------
// Four-phase handshake

enum class HsPhase : uint8_t { Idle, ReqUp, AckUp, ReqDown };
enum class HsEvent : uint8_t { ReqAssert, AckAssert, ReqRelease, AckRelease };

struct HandshakeState {
    HsPhase phase = HsPhase::Idle;

    bool operator==(const HandshakeState&) const = default;
};

inline const char* hs_phase_name(HsPhase p) {
    switch (p) {
    case HsPhase::Idle: return "idle";
    case HsPhase::ReqUp: return "req_up";
    case HsPhase::AckUp: return "ack_up";
    default: return "req_down";
    }
}

/// Advance one link through the idle -> req_up -> ack_up -> req_down -> idle
/// cycle. Data transfer is committed exactly once per full cycle, at ack_up.
/// Any other (state, event) pairing is an illegal transition and faults.
inline HandshakeState handshake_advance(HandshakeState link, HsEvent event) {
    switch (link.phase) {
    case HsPhase::Idle:
        if (event == HsEvent::ReqAssert) return HandshakeState{HsPhase::ReqUp};
        break;
    case HsPhase::ReqUp:
        if (event == HsEvent::AckAssert) return HandshakeState{HsPhase::AckUp};
        break;
    case HsPhase::AckUp:
        if (event == HsEvent::ReqRelease) return HandshakeState{HsPhase::ReqDown};
        break;
    case HsPhase::ReqDown:
        if (event == HsEvent::AckRelease) return HandshakeState{HsPhase::Idle};
        break;
    }
    throw sim_fault(std::string("handshake: illegal event in phase ") +
                    hs_phase_name(link.phase));
}

// ---------------------------------------------------------------------------
// Accounting

enum class Category : int { Encoder = 0, Decoder = 1, PipelineControl = 2, Other = 3 };
inline constexpr std::array<const char*, 4> kCategoryNames = {"encoder", "decoder",
                                                              "pipeline_control", "other"};

struct EnergyLedger {
    std::array<double, 4> fj{};
    std::array<uint64_t, 4> events{};

    void add(Category c, double e) {
        fj[static_cast<std::size_t>(c)] += e;
        ++events[static_cast<std::size_t>(c)];
    }
    double total() const { return fj[0] + fj[1] + fj[2] + fj[3]; }
};

struct LatencyReport {
    std::array<double, 4> ps{};
    std::array<uint64_t, 4> events{};
    double makespan_ps = 0;
    double steady_interval_ps = 0; ///< output-to-output spacing once the pipeline is full

    void add(Category c, double t) {
        ps[static_cast<std::size_t>(c)] += t;
        ++events[static_cast<std::size_t>(c)];
    }
    double total() const { return ps[0] + ps[1] + ps[2] + ps[3]; }
};

struct SimResult {
    MatI16 outputs; ///< B x N_out, bit-exact equal to the functional decode
    bool overflow = false;
    EnergyLedger energy;
    LatencyReport latency;
    uint64_t lookups = 0; ///< decoder read events
};

// ---------------------------------------------------------------------------
// Event-driven pipeline

namespace detail {

struct SimEvent {
    double t = 0;
    uint64_t seq = 0;
    int kind = 0; // 0 enc_done, 1 dec_done, 2 hs_phase, 3 rca_done
    int block = 0;
    int token = 0;
    int phase = 0;      // hs_phase only: 2..4
    double payload = 0; // enc_done only: traverse latency

    bool operator>(const SimEvent& o) const { return t != o.t ? t > o.t : seq > o.seq; }
};

/// One streaming run of the pipeline: `nb` active blocks handle subspaces
/// [sub0, sub0+nb), serving the output columns in `cols`, over all tokens.
/// Carried CsaPair state lives in `pairs` (token x full column index);
/// `shadow` mirrors the true integer partial sums for the 16-bit excursion
/// diagnostic.
class PipelineRun {
public:
    PipelineRun(const MatU8& inputs, const LearnedModel& model, const SimConfig& cfg,
                int sub0, int nb, const std::vector<int>& cols, bool final_tile,
                std::vector<std::vector<CsaPair>>& pairs,
                std::vector<std::vector<int32_t>>& shadow, SimResult& result,
                std::ostream* trace, double start_time)
        : inputs_(inputs), model_(model), cfg_(cfg), sub0_(sub0), nb_(nb), cols_(cols),
          final_tile_(final_tile), pairs_(pairs), shadow_(shadow), result_(result),
          trace_(trace), t0_(start_time) {
        const std::size_t n = static_cast<std::size_t>(nb);
        enc_next_.assign(n, 0);
        enc_busy_.assign(n, false);
        enc_pending_code_.assign(n, 0);
        code_ready_tok_.assign(n, -1);
        code_buffer_.assign(n, 0);
        dec_next_.assign(n, 0);
        dec_busy_.assign(n, false);
        dec_code_.assign(n, 0);
        commit_count_.assign(n, 0);
        upstream_ready_.assign(n, 0);
        upstream_ready_[0] = static_cast<int>(inputs.rows());
        links_.assign(n, HandshakeState{});
        link_busy_.assign(n, false);
        latched_.assign(n, std::deque<int>{});
        // contiguous LUT slices: slices_[b][c][k] for (subspace sub0+b, column cols[c])
        slices_.resize(n);
        for (int bb = 0; bb < nb; ++bb) {
            slices_[static_cast<std::size_t>(bb)].resize(cols.size());
            for (std::size_t c = 0; c < cols.size(); ++c) {
                auto& s = slices_[static_cast<std::size_t>(bb)][c];
                s.resize(static_cast<std::size_t>(model.lut.k));
                for (int kk = 0; kk < model.lut.k; ++kk)
                    s[static_cast<std::size_t>(kk)] = model.lut.at(sub0 + bb, kk, cols[c]);
            }
        }
    }

    /// Returns the time of the last event (the run's makespan endpoint).
    double run() {
        for (int bb = 0; bb < nb_; ++bb) try_start_enc(bb, t0_);
        double now = t0_;
        while (!queue_.empty()) {
            const SimEvent ev = queue_.top();
            queue_.pop();
            now = ev.t;
            dispatch(ev);
        }
        if (completed_ < static_cast<int>(inputs_.rows()))
            throw sim_fault("pipeline deadlock: no event progress with " +
                            std::to_string(static_cast<int>(inputs_.rows()) - completed_) +
                            " tokens pending");
        if (final_times_.size() >= 4) {
            // steady-state spacing measured over the back half of the run
            const std::size_t mid = final_times_.size() / 2;
            result_.latency.steady_interval_ps =
                (final_times_.back() - final_times_[mid]) /
                static_cast<double>(final_times_.size() - 1 - mid);
        }
        return now;
    }

private:
    void schedule(double t, int kind, int block, int token, int phase = 0, double payload = 0) {
        queue_.push(SimEvent{t, seq_++, kind, block, token, phase, payload});
    }

    void trace_line(double t, int block, const char* unit, const char* kind, double fj) {
        if (trace_)
            *trace_ << t << " " << block << " " << unit << " " << kind << " " << fj << "\n";
    }

    void try_start_enc(int block, double now) {
        const std::size_t b = static_cast<std::size_t>(block);
        if (enc_busy_[b] || enc_next_[b] >= static_cast<int>(inputs_.rows())) return;
        if (code_ready_tok_[b] >= 0) return; // previous code not yet consumed
        const int tok = enc_next_[b];
        const int sd = model_.scheme.sub_dim();
        auto sub = inputs_.row(static_cast<std::size_t>(tok))
                       .subspan(static_cast<std::size_t>((sub0_ + block) * sd),
                                static_cast<std::size_t>(sd));
        const TraverseResult tr =
            encoder_traverse(sub, model_.trees[static_cast<std::size_t>(sub0_ + block)], cfg_);
        enc_pending_code_[b] = tr.code;
        enc_busy_[b] = true;
        schedule(now + tr.latency_ps, 0, block, tok, 0, tr.latency_ps);
    }

    void try_start_dec(int block, double now) {
        const std::size_t b = static_cast<std::size_t>(block);
        if (dec_busy_[b]) return;
        const int tok = dec_next_[b];
        if (tok >= static_cast<int>(inputs_.rows())) return;
        if (code_ready_tok_[b] != tok) return; // encoder output not ready
        if (upstream_ready_[b] <= tok) return; // preceding block's partial missing
        if (commit_count_[b] < tok) return;    // output latch still holds the previous token
        dec_busy_[b] = true;
        dec_code_[b] = code_buffer_[b];
        code_ready_tok_[b] = -1; // code consumed; encoder may move on
        ++dec_next_[b];
        schedule(now + decoder_latency_ps(cfg_), 1, block, tok);
        try_start_enc(block, now);
    }

    void try_start_hs(int block, double now) {
        const std::size_t b = static_cast<std::size_t>(block);
        if (link_busy_[b] || latched_[b].empty()) return;
        link_busy_[b] = true;
        const int tok = latched_[b].front();
        latched_[b].pop_front();
        links_[b] = handshake_advance(links_[b], HsEvent::ReqAssert);
        for (int ph = 2; ph <= 4; ++ph)
            schedule(now + (ph - 1) * cfg_.timing.t_hs_phase, 2, block, tok, ph);
    }

    void dispatch(const SimEvent& ev) {
        const std::size_t b = static_cast<std::size_t>(ev.block);
        switch (ev.kind) {
        case 0: { // encoder traverse done
            enc_busy_[b] = false;
            code_buffer_[b] = enc_pending_code_[b];
            code_ready_tok_[b] = ev.token;
            ++enc_next_[b];
            const double e = 4 * cfg_.energy.e_dlc_eval;
            result_.energy.add(Category::Encoder, e);
            result_.latency.add(Category::Encoder, ev.payload);
            trace_line(ev.t, ev.block, "encoder", "traverse_done", e);
            try_start_dec(ev.block, ev.t);
            break;
        }
        case 1: { // all decoders in the block latched
            dec_busy_[b] = false;
            apply_decode(ev.block, ev.token);
            const double per_read = decoder_energy_fj(cfg_);
            for (std::size_t c = 0; c < cols_.size(); ++c) {
                result_.energy.add(Category::Decoder, per_read);
                ++result_.lookups;
            }
            result_.latency.add(Category::Decoder, decoder_latency_ps(cfg_));
            trace_line(ev.t, ev.block, "decoder", "read_done",
                       per_read * static_cast<double>(cols_.size()));
            latched_[b].push_back(ev.token);
            try_start_hs(ev.block, ev.t);
            try_start_dec(ev.block, ev.t); // next token may already be fully enabled
            break;
        }
        case 2: { // handshake phase transition
            switch (ev.phase) {
            case 2:
                links_[b] = handshake_advance(links_[b], HsEvent::AckAssert);
                commit(ev.block, ev.token, ev.t); // data moves exactly here
                break;
            case 3:
                links_[b] = handshake_advance(links_[b], HsEvent::ReqRelease);
                break;
            case 4:
                links_[b] = handshake_advance(links_[b], HsEvent::AckRelease);
                link_busy_[b] = false;
                result_.energy.add(Category::PipelineControl, cfg_.energy.e_hs);
                result_.latency.add(Category::PipelineControl, 4 * cfg_.timing.t_hs_phase);
                trace_line(ev.t, ev.block, "link", "hs_cycle_done", cfg_.energy.e_hs);
                try_start_hs(ev.block, ev.t);
                break;
            default: break;
            }
            break;
        }
        case 3: // ripple-carry resolution of the final pair
            resolve_output(ev.token, ev.t);
            break;
        default: break;
        }
    }

    void apply_decode(int block, int tok) {
        const std::size_t b = static_cast<std::size_t>(block);
        auto& pair_row = pairs_[static_cast<std::size_t>(tok)];
        auto& shadow_row = shadow_[static_cast<std::size_t>(tok)];
        const int code = dec_code_[b];
        if (code < 0 || code >= model_.lut.k)
            throw sim_fault("decoder: code out of range during run");
        for (std::size_t c = 0; c < cols_.size(); ++c) {
            const int8_t v = slices_[b][c][static_cast<std::size_t>(code)];
            const std::size_t col = static_cast<std::size_t>(cols_[c]);
            pair_row[col] = csa_add(pair_row[col], static_cast<int16_t>(v));
            shadow_row[col] += v;
            if (shadow_row[col] < -32768 || shadow_row[col] > 32767) result_.overflow = true;
        }
    }

    void commit(int block, int token, double now) {
        if (block + 1 < nb_) {
            ++upstream_ready_[static_cast<std::size_t>(block + 1)];
            try_start_dec(block + 1, now);
        } else if (final_tile_) {
            schedule(now + 16 * cfg_.timing.t_fa, 3, block, token);
        } else {
            ++completed_; // pair parked for the next subspace tile
            final_times_.push_back(now);
        }
        ++commit_count_[static_cast<std::size_t>(block)];
        try_start_dec(block, now);
    }

    void resolve_output(int token, double now) {
        auto& pair_row = pairs_[static_cast<std::size_t>(token)];
        for (std::size_t c = 0; c < cols_.size(); ++c) {
            const std::size_t col = static_cast<std::size_t>(cols_[c]);
            result_.outputs.at(static_cast<std::size_t>(token), col) = final_rca(pair_row[col]);
            result_.energy.add(Category::Other, cfg_.energy.e_rca);
        }
        result_.latency.add(Category::Other, 16 * cfg_.timing.t_fa);
        trace_line(now, nb_ - 1, "rca", "resolve",
                   cfg_.energy.e_rca * static_cast<double>(cols_.size()));
        ++completed_;
        final_times_.push_back(now);
    }

    const MatU8& inputs_;
    const LearnedModel& model_;
    const SimConfig& cfg_;
    int sub0_, nb_;
    const std::vector<int>& cols_;
    bool final_tile_;
    std::vector<std::vector<CsaPair>>& pairs_;
    std::vector<std::vector<int32_t>>& shadow_;
    SimResult& result_;
    std::ostream* trace_;
    double t0_;

    std::priority_queue<SimEvent, std::vector<SimEvent>, std::greater<>> queue_;
    uint64_t seq_ = 0;
    int completed_ = 0;
    std::vector<int> enc_next_, dec_next_, commit_count_, upstream_ready_;
    std::vector<bool> enc_busy_, dec_busy_, link_busy_;
    std::vector<int> enc_pending_code_, code_ready_tok_, code_buffer_, dec_code_;
    std::vector<HandshakeState> links_;
    std::vector<std::deque<int>> latched_;
    std::vector<std::vector<std::vector<int8_t>>> slices_;
    std::vector<double> final_times_;
};

} // namespace detail

/// Run the macro over a batch of already-quantized activation rows.
///
/// Subspaces map onto the n_s pipeline stages and output columns onto the
/// n_dec decoders; oversized models run in ceil(M/n_s) x ceil(N_out/n_dec)
/// passes with CsaPair partials carried across subspace passes. Outputs are
/// bit-exact equal to the functional decode_accumulate per input row.
inline SimResult simulate(const MatU8& inputs, const LearnedModel& model, const SimConfig& cfg,
                          std::ostream* trace = nullptr) {
    cfg.validate();
    if (!model.has_lut) throw dim_error("simulate: model has no LUT");
    if (model.levels != 4) throw dim_error("simulate: the macro encoder is a 4-level tree");
    if (static_cast<int>(inputs.cols()) != model.scheme.d)
        throw dim_error("simulate: input row length != d");
    if (inputs.rows() == 0) throw dim_error("simulate: no inputs");

    const int m = model.scheme.m;
    const int n_out = model.lut.n_out;
    const std::size_t b_count = inputs.rows();

    SimResult result;
    result.outputs = MatI16(b_count, static_cast<std::size_t>(n_out));

    std::vector<std::vector<CsaPair>> pairs(b_count,
                                            std::vector<CsaPair>(static_cast<std::size_t>(n_out)));
    std::vector<std::vector<int32_t>> shadow(
        b_count, std::vector<int32_t>(static_cast<std::size_t>(n_out), 0));

    double now = 0.0;
    int passes = 0;
    for (int c0 = 0; c0 < n_out; c0 += cfg.n_dec) {
        std::vector<int> cols;
        for (int j = c0; j < std::min(c0 + cfg.n_dec, n_out); ++j) cols.push_back(j);
        for (int s0 = 0; s0 < m; s0 += cfg.n_s) {
            const int nb = std::min(cfg.n_s, m - s0);
            const bool final_tile = s0 + nb >= m;
            detail::PipelineRun run(inputs, model, cfg, s0, nb, cols, final_tile, pairs, shadow,
                                    result, trace, now);
            now = run.run();
            ++passes;
        }
    }
    // a token's sustained cost is one initiation interval per sequential pass
    result.latency.steady_interval_ps *= passes;
    result.latency.makespan_ps = now;
    return result;
}

// ---------------------------------------------------------------------------
// Derived metrics

struct Metrics {
    double tops = 0;         ///< total ops / makespan
    double tops_steady = 0;  ///< implied by the steady-state output interval
    double tops_per_watt = 0;
    double analytic_anchor_tops_per_watt = 0; ///< 1/(decoder + encoder fJ/op) of the preset
    std::array<double, 4> energy_shares{};
    std::array<double, 4> latency_shares{};
    uint64_t total_ops = 0;
    double total_energy_fj = 0;
    double total_time_ps = 0;
};

/// Turn raw ledgers into throughput/efficiency figures. One op = one of the
/// multiplies or additions a lookup replaces (ops_per_lookup of them).
inline Metrics report_metrics(const EnergyLedger& ledger, const LatencyReport& report,
                              int ops_per_lookup, uint64_t total_lookups,
                              std::size_t token_count = 0) {
    if (!(report.makespan_ps > 0)) throw dim_error("report_metrics: zero-duration run");
    Metrics m;
    m.total_ops = static_cast<uint64_t>(ops_per_lookup) * total_lookups;
    m.total_energy_fj = ledger.total();
    m.total_time_ps = report.makespan_ps;
    m.tops = static_cast<double>(m.total_ops) / report.makespan_ps; // 1 op/ps = 1 TOPS
    if (report.steady_interval_ps > 0 && token_count > 0)
        m.tops_steady = static_cast<double>(m.total_ops) / static_cast<double>(token_count) /
                        report.steady_interval_ps;
    m.tops_per_watt =
        m.total_energy_fj > 0
            ? static_cast<double>(m.total_ops) / m.total_energy_fj * 1000.0 // op/fJ -> TOPS/W
            : 0.0;
    const double e_total = ledger.total();
    const double l_total = report.total();
    for (std::size_t c = 0; c < 4; ++c) {
        m.energy_shares[c] = e_total > 0 ? ledger.fj[c] / e_total : 0.0;
        m.latency_shares[c] = l_total > 0 ? report.ps[c] / l_total : 0.0;
    }
    return m;
}

inline Metrics metrics_from_result(const SimResult& r, const SimConfig& cfg,
                                   std::size_t token_count) {
    Metrics m = report_metrics(r.energy, r.latency, cfg.ops_per_lookup, r.lookups, token_count);
    if (cfg.ref_decoder_fj_per_op + cfg.ref_encoder_fj_per_op > 0)
        m.analytic_anchor_tops_per_watt =
            1000.0 / (cfg.ref_decoder_fj_per_op + cfg.ref_encoder_fj_per_op);
    return m;
}

// ---------------------------------------------------------------------------
// Area model

struct AreaEstimate {
    double total_mm2 = 0;
    std::array<double, 4> shares{}; ///< decoder / encoder / control / global, Category order
};

/// Linear parametric area model: the decoder array grows as n_dec * n_s,
/// encoder and per-stage control as n_s, plus a fixed global overhead.
/// Default constants are calibrated so area(16, 32) = 0.20 mm^2.
inline AreaEstimate area_estimate(const SimConfig& cfg) {
    const double dec = cfg.area.a_dec * cfg.n_dec * cfg.n_s;
    const double enc = cfg.area.a_enc * cfg.n_s;
    const double ctrl = cfg.area.a_ctrl * cfg.n_s;
    const double glob = cfg.area.a_global;
    AreaEstimate a;
    a.total_mm2 = dec + enc + ctrl + glob;
    a.shares[static_cast<std::size_t>(Category::Encoder)] = enc / a.total_mm2;
    a.shares[static_cast<std::size_t>(Category::Decoder)] = dec / a.total_mm2;
    a.shares[static_cast<std::size_t>(Category::PipelineControl)] = ctrl / a.total_mm2;
    a.shares[static_cast<std::size_t>(Category::Other)] = glob / a.total_mm2;
    return a;
}

} // namespace lutamm
