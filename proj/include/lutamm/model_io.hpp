#pragma once

// Model serialization (single self-describing JSON document with a mandatory
// schema version) and the two training-data ingestion formats: CSV rows of
// decimal values, and a raw little-endian float32 binary with a 16-byte
// header (8-byte magic, uint32 rows, uint32 cols).

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lutamm/trainer.hpp"

namespace lutamm {

inline constexpr int kModelSchemaVersion = 1;
inline constexpr char kF32Magic[8] = {'L', 'A', 'M', 'M', 'F', '3', '2', '\0'};

inline nlohmann::json model_to_json(const LearnedModel& model) {
    nlohmann::json j;
    j["schema_version"] = kModelSchemaVersion;
    j["d"] = model.scheme.d;
    j["m"] = model.scheme.m;
    j["levels"] = model.levels;
    j["act_scale"] = model.act_scale;
    auto trees = nlohmann::json::array();
    for (const auto& t : model.trees) {
        auto nodes = nlohmann::json::array();
        for (const auto& n : t.nodes)
            nodes.push_back({{"dim", n.split_dim},
                             {"thr", static_cast<int>(n.threshold)},
                             {"deg", n.degenerate}});
        trees.push_back(std::move(nodes));
    }
    j["trees"] = std::move(trees);
    auto protos = nlohmann::json::array();
    for (const auto& p : model.codebooks.prototypes) protos.push_back(p.data());
    j["prototypes"] = std::move(protos);
    j["empty_leaves"] = model.empty_leaves;
    if (model.has_lut) {
        j["lut"] = {{"m", model.lut.m},
                    {"k", model.lut.k},
                    {"n_out", model.lut.n_out},
                    {"entries", model.lut.entries},
                    {"scales", model.lut.scales}};
    }
    return j;
}

inline LearnedModel model_from_json(const nlohmann::json& j) {
    if (!j.contains("schema_version"))
        throw data_error("model: missing schema_version");
    if (j["schema_version"].get<int>() != kModelSchemaVersion)
        throw data_error("model: unsupported schema_version " +
                         j["schema_version"].dump());
    LearnedModel model;
    model.scheme = PartitionScheme::make(j["d"].get<int>(), j["m"].get<int>());
    model.levels = j["levels"].get<int>();
    model.act_scale = j["act_scale"].get<double>();
    const int sd = model.scheme.sub_dim();
    for (const auto& jt : j["trees"]) {
        std::vector<BdtNode> nodes;
        for (const auto& jn : jt)
            nodes.push_back(BdtNode{jn["dim"].get<int>(),
                                    static_cast<uint8_t>(jn["thr"].get<int>()),
                                    jn["deg"].get<bool>()});
        model.trees.push_back(BdtTree::make(model.levels, std::move(nodes), sd));
    }
    model.codebooks.scheme = model.scheme;
    model.codebooks.k = 1 << model.levels;
    for (const auto& jp : j["prototypes"]) {
        MatF p(static_cast<std::size_t>(model.codebooks.k), static_cast<std::size_t>(sd));
        p.data() = jp.get<std::vector<double>>();
        if (p.data().size() != static_cast<std::size_t>(model.codebooks.k) * sd)
            throw data_error("model: prototype matrix size mismatch");
        model.codebooks.prototypes.push_back(std::move(p));
    }
    model.empty_leaves = j.value("empty_leaves", std::vector<bool>{});
    if (j.contains("lut")) {
        const auto& jl = j["lut"];
        model.lut.m = jl["m"].get<int>();
        model.lut.k = jl["k"].get<int>();
        model.lut.n_out = jl["n_out"].get<int>();
        model.lut.entries = jl["entries"].get<std::vector<int8_t>>();
        model.lut.scales = jl["scales"].get<std::vector<double>>();
        if (model.lut.entries.size() !=
            static_cast<std::size_t>(model.lut.m) * model.lut.k * model.lut.n_out)
            throw data_error("model: lut entry count mismatch");
        model.has_lut = true;
    }
    model.codebooks.validate();
    return model;
}

inline void save_model(const LearnedModel& model, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot open for writing: " + path);
    f << model_to_json(model).dump(2) << "\n";
}

inline LearnedModel load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot open model file: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("model parse error: ") + e.what());
    }
    return model_from_json(j);
}

/// CSV matrix reader: one row of comma-separated decimal values per line.
/// Blank lines are skipped; a malformed cell reports its line number.
inline MatF read_csv_matrix(std::istream& in, const std::string& name = "<stream>") {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(cell, &pos);
                while (pos < cell.size() &&
                       (cell[pos] == ' ' || cell[pos] == '\t' || cell[pos] == '\r'))
                    ++pos;
                if (pos != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                throw data_error(name + ": malformed value '" + cell + "' at line " +
                                 std::to_string(lineno));
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw data_error(name + ": inconsistent column count at line " +
                             std::to_string(lineno));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw data_error(name + ": no data rows");
    MatF out(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        std::copy(rows[r].begin(), rows[r].end(), out.row(r).begin());
    return out;
}

inline MatF read_csv_matrix(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw data_error("cannot open data file: " + path);
    return read_csv_matrix(f, path);
}

inline void write_f32_matrix(const MatF& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot open for writing: " + path);
    f.write(kF32Magic, 8);
    const uint32_t rows = static_cast<uint32_t>(m.rows());
    const uint32_t cols = static_cast<uint32_t>(m.cols());
    f.write(reinterpret_cast<const char*>(&rows), 4);
    f.write(reinterpret_cast<const char*>(&cols), 4);
    for (double v : m.data()) {
        const float fv = static_cast<float>(v);
        f.write(reinterpret_cast<const char*>(&fv), 4);
    }
}

inline MatF read_f32_matrix(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw data_error("cannot open data file: " + path);
    char magic[8];
    f.read(magic, 8);
    if (!f || !std::equal(magic, magic + 8, kF32Magic))
        throw data_error(path + ": bad magic, not a float32 matrix file");
    uint32_t rows = 0, cols = 0;
    f.read(reinterpret_cast<char*>(&rows), 4);
    f.read(reinterpret_cast<char*>(&cols), 4);
    if (!f || rows == 0 || cols == 0) throw data_error(path + ": bad header");
    MatF out(rows, cols);
    for (std::size_t i = 0; i < out.size(); ++i) {
        float fv = 0.0f;
        f.read(reinterpret_cast<char*>(&fv), 4);
        if (!f) throw data_error(path + ": truncated payload");
        out.data()[i] = static_cast<double>(fv);
    }
    return out;
}

} // namespace lutamm
