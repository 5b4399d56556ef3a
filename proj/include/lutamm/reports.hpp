#pragma once

// Machine-readable run artifacts: metrics JSON, breakdown CSV and the run
// manifest written alongside every output set. JSON for downstream tools,
// CSV for tabular/plot pipelines; both are always emitted by the CLI.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "lutamm/sim.hpp"

namespace lutamm {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kVersionString = "lutamm-0.1.0";

inline nlohmann::json metrics_to_json(const Metrics& m, const SimResult& r,
                                      const SimConfig& cfg) {
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["n_dec"] = cfg.n_dec;
    j["n_s"] = cfg.n_s;
    j["preset"] = cfg.voltage_preset;
    j["ops_per_lookup"] = cfg.ops_per_lookup;
    j["tops"] = m.tops;
    j["tops_steady"] = m.tops_steady;
    j["tops_per_watt"] = m.tops_per_watt;
    j["analytic_anchor_tops_per_watt"] = m.analytic_anchor_tops_per_watt;
    j["total_ops"] = m.total_ops;
    j["total_energy_fj"] = m.total_energy_fj;
    j["makespan_ps"] = r.latency.makespan_ps;
    j["steady_interval_ps"] = r.latency.steady_interval_ps;
    j["lookups"] = r.lookups;
    j["overflow"] = r.overflow;
    for (std::size_t c = 0; c < 4; ++c) {
        j["energy_fj"][kCategoryNames[c]] = r.energy.fj[c];
        j["energy_share"][kCategoryNames[c]] = m.energy_shares[c];
        j["latency_ps"][kCategoryNames[c]] = r.latency.ps[c];
        j["latency_share"][kCategoryNames[c]] = m.latency_shares[c];
        j["energy_events"][kCategoryNames[c]] = r.energy.events[c];
    }
    const AreaEstimate area = area_estimate(cfg);
    j["area_mm2"] = area.total_mm2;
    for (std::size_t c = 0; c < 4; ++c)
        j["area_share"][kCategoryNames[c]] = area.shares[c];
    return j;
}

/// Breakdown table: category, energy_fj, latency_ps, energy_share.
inline void write_breakdown_csv(const Metrics& m, const SimResult& r, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot open for writing: " + path);
    f << "category,energy_fj,latency_ps,energy_share,latency_share\n";
    for (std::size_t c = 0; c < 4; ++c)
        f << kCategoryNames[c] << "," << r.energy.fj[c] << "," << r.latency.ps[c] << ","
          << m.energy_shares[c] << "," << m.latency_shares[c] << "\n";
}

inline void write_json_atomic(const nlohmann::json& j, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw data_error("cannot open for writing: " + tmp);
        f << j.dump(2) << "\n";
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw data_error("cannot rename " + tmp + " -> " + path);
}

/// Written atomically alongside every output set; the only artifact that
/// carries a timestamp, so primary outputs stay byte-identical across
/// re-runs.
inline void write_manifest(const std::string& command, const std::string& config_path,
                           uint64_t seed, const std::vector<std::string>& outputs,
                           const std::string& path) {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config_path;
    j["seed"] = seed;
    j["version"] = kVersionString;
    const auto now = std::chrono::system_clock::now();
    j["timestamp_unix_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
    j["outputs"] = outputs;
    write_json_atomic(j, path);
}

/// Merge per-run metrics documents into one comparison CSV keyed by
/// (preset, n_dec, n_s). Mixed schema versions are refused.
inline void merge_metrics(const std::vector<std::string>& inputs, std::ostream& out) {
    out << "preset,n_dec,n_s,ops_per_lookup,tops,tops_steady,tops_per_watt,"
           "decoder_energy_share,encoder_latency_share,area_mm2\n";
    int schema = -1;
    for (const auto& path : inputs) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw data_error("cannot open metrics file: " + path);
        nlohmann::json j;
        try {
            f >> j;
        } catch (const nlohmann::json::exception& e) {
            throw data_error(path + ": parse error: " + e.what());
        }
        const int v = j.value("schema_version", -1);
        if (schema == -1) schema = v;
        if (v != schema || v == -1)
            throw dim_error(path + ": schema version mismatch (" + std::to_string(v) + " vs " +
                            std::to_string(schema) + ")");
        out << j["preset"].get<std::string>() << "," << j["n_dec"] << "," << j["n_s"] << ","
            << j["ops_per_lookup"] << "," << j["tops"] << "," << j["tops_steady"] << ","
            << j["tops_per_watt"] << "," << j["energy_share"]["decoder"] << ","
            << j["latency_share"]["encoder"] << "," << j["area_mm2"] << "\n";
    }
}

} // namespace lutamm
