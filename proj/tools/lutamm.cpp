// Command-line front door: train lookup models, evaluate approximation
// error, run macro simulations and merge report files.
//
// Exit codes: 0 success, 1 usage/config error, 2 data/IO error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lutamm/cnn.hpp"
#include "lutamm/model_io.hpp"
#include "lutamm/reports.hpp"
#include "lutamm/sim.hpp"
#include "lutamm/trainer.hpp"

namespace fs = std::filesystem;
using namespace lutamm;

namespace {

MatF load_matrix_any(const std::string& path) {
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return read_csv_matrix(path);
    return read_f32_matrix(path);
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw dim_error("bad integer list element: " + item);
        }
    }
    if (out.empty()) throw dim_error("empty integer list");
    return out;
}

struct TrainArgs {
    std::string data, weights, out;
    int levels = 4, m = 1;
    uint64_t seed = 0;
};

int cmd_train(const TrainArgs& a) {
    fs::create_directories(a.out);
    const MatF samples = load_matrix_any(a.data);
    LearnedModel model = train_model(samples, TrainingConfig{a.levels, a.m, a.seed});
    if (!a.weights.empty()) attach_lut(model, load_matrix_any(a.weights));
    const std::string model_path = (fs::path(a.out) / "model.json").string();
    save_model(model, model_path);
    write_manifest("train", a.data, a.seed, {model_path},
                   (fs::path(a.out) / "manifest.json").string());
    std::cout << "model written to " << model_path << "\n";
    return 0;
}

struct EvalArgs {
    std::string model, weights, data, out;
};

int cmd_eval(const EvalArgs& a) {
    fs::create_directories(a.out);
    LearnedModel model = load_model(a.model);
    const MatF w = load_matrix_any(a.weights);
    attach_lut(model, w); // evaluation is always against the supplied weights
    const MatF rows = load_matrix_any(a.data);

    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    const std::string csv_path = (fs::path(a.out) / "eval.csv").string();
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw data_error("cannot open for writing: " + csv_path);
    csv << "encoder,mse,rel_frobenius,max_abs\n";
    for (EncoderKind kind : {EncoderKind::Bdt, EncoderKind::Manhattan, EncoderKind::Euclidean}) {
        const ErrorReport r = evaluate_encoder(kind, rows, model, w);
        j["encoders"][encoder_name(kind)] = {{"mse", r.mse},
                                             {"rel_frobenius", r.rel_frobenius},
                                             {"max_abs", r.max_abs}};
        csv << encoder_name(kind) << "," << r.mse << "," << r.rel_frobenius << "," << r.max_abs
            << "\n";
    }
    const std::string json_path = (fs::path(a.out) / "eval.json").string();
    write_json_atomic(j, json_path);
    write_manifest("eval", a.data, 0, {json_path, csv_path},
                   (fs::path(a.out) / "manifest.json").string());
    std::cout << "error report written to " << json_path << "\n";
    return 0;
}

struct SimArgs {
    std::string model, config, preset, ndec, inputs, trace, out;
    int ns = 0;
    int ops_per_lookup = 0;
    int count = 256;
    int jobs = 1;
    uint64_t seed = 0;
};

int cmd_sim(const SimArgs& a, const CLI::App* sub) {
    fs::create_directories(a.out);
    LearnedModel model = load_model(a.model);
    if (!model.has_lut) throw data_error("sim: model has no LUT; train with --weights");

    SimConfig base;
    if (!a.config.empty()) {
        std::ifstream f(a.config);
        if (!f) throw data_error("cannot open config: " + a.config);
        base = load_sim_config(f, a.config);
    } else {
        base = SimConfig::preset(a.preset.empty() ? "0.5V" : a.preset);
    }
    // flags override config-file values
    if (sub->count("--preset") && !a.config.empty()) {
        const SimConfig p = SimConfig::preset(a.preset);
        base.timing = p.timing;
        base.energy = p.energy;
        base.voltage_preset = p.voltage_preset;
        base.ref_encoder_fj_per_op = p.ref_encoder_fj_per_op;
        base.ref_decoder_fj_per_op = p.ref_decoder_fj_per_op;
    }
    if (a.ns > 0) base.n_s = a.ns;
    if (a.ops_per_lookup > 0) base.ops_per_lookup = a.ops_per_lookup;
    std::vector<int> ndecs = a.ndec.empty() ? std::vector<int>{base.n_dec}
                                            : parse_int_list(a.ndec);

    MatU8 q;
    if (!a.inputs.empty()) {
        const MatF real = load_matrix_any(a.inputs);
        q = MatU8(real.rows(), real.cols());
        for (std::size_t r = 0; r < real.rows(); ++r) {
            auto qr = quantize_activation(real.row(r), model.act_scale);
            std::copy(qr.begin(), qr.end(), q.row(r).begin());
        }
    } else {
        std::mt19937_64 rng(sub_seed(a.seed, "sim-inputs"));
        q = MatU8(static_cast<std::size_t>(a.count), static_cast<std::size_t>(model.scheme.d));
        for (auto& v : q.data()) v = static_cast<uint8_t>(rng() & 0xff);
    }

    std::vector<std::string> outputs;
    std::mutex mu;
    std::vector<std::exception_ptr> errors(ndecs.size());
    auto run_one = [&](std::size_t idx) {
        try {
            SimConfig cfg = base;
            cfg.n_dec = ndecs[idx];
            std::ofstream trace_f;
            std::ostream* trace = nullptr;
            if (!a.trace.empty() && ndecs.size() == 1) {
                trace_f.open(a.trace, std::ios::binary);
                if (!trace_f) throw data_error("cannot open trace file: " + a.trace);
                trace = &trace_f;
            }
            const SimResult r = simulate(q, model, cfg, trace);
            const Metrics m = metrics_from_result(r, cfg, q.rows());
            const std::string tag =
                ndecs.size() == 1 ? std::string{} : "_ndec" + std::to_string(cfg.n_dec);
            const std::string json_path = (fs::path(a.out) / ("metrics" + tag + ".json")).string();
            const std::string csv_path = (fs::path(a.out) / ("breakdown" + tag + ".csv")).string();
            write_json_atomic(metrics_to_json(m, r, cfg), json_path);
            write_breakdown_csv(m, r, csv_path);
            std::lock_guard<std::mutex> lk(mu);
            outputs.push_back(json_path);
            outputs.push_back(csv_path);
            std::cout << "n_dec=" << cfg.n_dec << " n_s=" << cfg.n_s << " preset="
                      << cfg.voltage_preset << ": " << m.tops_per_watt << " TOPS/W, "
                      << m.tops << " TOPS (anchor " << m.analytic_anchor_tops_per_watt
                      << " TOPS/W)\n";
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    };

    const int jobs = std::max(1, a.jobs);
    for (std::size_t i0 = 0; i0 < ndecs.size(); i0 += static_cast<std::size_t>(jobs)) {
        std::vector<std::thread> pool;
        for (std::size_t i = i0; i < std::min(i0 + static_cast<std::size_t>(jobs), ndecs.size());
             ++i)
            pool.emplace_back(run_one, i);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    write_manifest("sim", a.config, a.seed, outputs,
                   (fs::path(a.out) / "manifest.json").string());
    return 0;
}

struct ReportArgs {
    std::vector<std::string> inputs;
    std::string out;
};

int cmd_report(const ReportArgs& a) {
    std::ostringstream buf;
    merge_metrics(a.inputs, buf);
    if (a.out.empty()) {
        std::cout << buf.str();
    } else {
        std::ofstream f(a.out, std::ios::binary);
        if (!f) throw data_error("cannot open for writing: " + a.out);
        f << buf.str();
    }
    return 0;
}

struct ToyArgs {
    uint64_t seed = 0;
    std::string out;
};

int cmd_toy(const ToyArgs& a) {
    fs::create_directories(a.out);
    const ToyReport r = toy_network_eval(a.seed);
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["seed"] = r.seed;
    j["float_accuracy"] = r.float_accuracy;
    j["bypass_accuracy"] = r.bypass_accuracy;
    for (const auto& [k, acc] : r.amm_accuracy) {
        j["amm_accuracy"][std::to_string(k)] = acc;
        j["accuracy_delta"][std::to_string(k)] = r.accuracy_delta.at(k);
    }
    const std::string path = (fs::path(a.out) / "toy_report.json").string();
    write_json_atomic(j, path);
    write_manifest("toy", "", a.seed, {path}, (fs::path(a.out) / "manifest.json").string());
    std::cout << "float accuracy " << r.float_accuracy;
    for (const auto& [k, acc] : r.amm_accuracy) std::cout << ", K=" << k << " " << acc;
    std::cout << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lookup-table approximate GEMM engine and accelerator simulator"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "learn a lookup model from sample data");
    train->add_option("--data", train_args.data, "training matrix (.csv or float32 binary)")
        ->required();
    train->add_option("--weights", train_args.weights, "weight matrix to bake into the LUT");
    train->add_option("--levels", train_args.levels, "tree depth (K = 2^levels)");
    train->add_option("--m", train_args.m, "number of subspaces")->required();
    train->add_option("--seed", train_args.seed, "global seed");
    train->add_option("--out", train_args.out, "output directory")->required();

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "evaluate approximation error per encoder");
    eval->add_option("--model", eval_args.model, "model file")->required();
    eval->add_option("--weights", eval_args.weights, "weight matrix")->required();
    eval->add_option("--data", eval_args.data, "evaluation rows")->required();
    eval->add_option("--out", eval_args.out, "output directory")->required();

    SimArgs sim_args;
    auto* sim = app.add_subcommand("sim", "run the event-driven macro simulation");
    sim->add_option("--model", sim_args.model, "model file (with LUT)")->required();
    sim->add_option("--config", sim_args.config, "INI config ([macro]/[timing]/[energy]/[area])");
    sim->add_option("--preset", sim_args.preset, "voltage preset: 0.5V or 0.8V");
    sim->add_option("--ndec", sim_args.ndec, "decoders per block (comma list for a sweep)");
    sim->add_option("--ns", sim_args.ns, "pipeline stages");
    sim->add_option("--ops-per-lookup", sim_args.ops_per_lookup, "op-count convention (default 18)");
    sim->add_option("--inputs", sim_args.inputs, "activation matrix (real-valued; quantized)");
    sim->add_option("--count", sim_args.count, "random input count when --inputs is absent");
    sim->add_option("--seed", sim_args.seed, "global seed");
    sim->add_option("--trace", sim_args.trace, "write line-per-event trace to this path");
    sim->add_option("--jobs", sim_args.jobs, "parallel simulation instances for sweeps");
    sim->add_option("--out", sim_args.out, "output directory")->required();

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "merge metrics JSON files into one CSV");
    report->add_option("inputs", report_args.inputs, "metrics files")->required();
    report->add_option("--out", report_args.out, "output CSV (default stdout)");

    ToyArgs toy_args;
    auto* toy = app.add_subcommand("toy", "run the toy 2-conv network benchmark");
    toy->add_option("--seed", toy_args.seed, "global seed");
    toy->add_option("--out", toy_args.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*train) return cmd_train(train_args);
        if (*eval) return cmd_eval(eval_args);
        if (*sim) return cmd_sim(sim_args, sim);
        if (*report) return cmd_report(report_args);
        if (*toy) return cmd_toy(toy_args);
    } catch (const dim_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
