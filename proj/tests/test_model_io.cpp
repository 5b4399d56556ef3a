#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "lutamm/model_io.hpp"
#include "lutamm/sim_params.hpp"

using namespace lutamm;

namespace {
std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / (std::string("lutamm_io_") + name);
}
} // namespace

TEST_CASE("model round-trips through JSON with and without a LUT") {
    const LearnedModel model = testutil::trained_model(51, 3, 5);
    const auto path = temp_file("model.json");
    save_model(model, path.string());
    const LearnedModel back = load_model(path.string());
    CHECK(model_to_json(model).dump() == model_to_json(back).dump());
    CHECK(back.has_lut);
    CHECK(back.lut.entries == model.lut.entries);
    CHECK(back.trees == model.trees);
    CHECK(back.act_scale == model.act_scale);

    std::mt19937_64 rng(52);
    const LearnedModel bare =
        train_model(testutil::random_matf(rng, 100, 8), TrainingConfig{4, 2, 0});
    save_model(bare, path.string());
    CHECK_FALSE(load_model(path.string()).has_lut);
    std::filesystem::remove(path);
}

TEST_CASE("model loading rejects missing or wrong schema versions") {
    nlohmann::json j = model_to_json(testutil::trained_model(53, 1, 2));
    nlohmann::json no_version = j;
    no_version.erase("schema_version");
    CHECK_THROWS_AS(model_from_json(no_version), data_error);
    nlohmann::json wrong = j;
    wrong["schema_version"] = 999;
    CHECK_THROWS_AS(model_from_json(wrong), data_error);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), data_error);

    const auto path = temp_file("garbage.json");
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_model(path.string()), data_error);
    std::filesystem::remove(path);
}

TEST_CASE("CSV reader parses rows and reports malformed lines") {
    std::istringstream good("1,2.5,3\n\n4,-5,6e-1\n");
    const MatF m = read_csv_matrix(good, "good");
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 3);
    CHECK(m.at(0, 1) == 2.5);
    CHECK(m.at(1, 2) == doctest::Approx(0.6));

    std::istringstream bad("1,2\n3,oops\n");
    try {
        read_csv_matrix(bad, "bad");
        FAIL("expected data_error");
    } catch (const data_error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        CHECK(std::string(e.what()).find("oops") != std::string::npos);
    }

    std::istringstream ragged("1,2\n3\n");
    CHECK_THROWS_AS(read_csv_matrix(ragged, "ragged"), data_error);
    std::istringstream empty("\n  \n");
    CHECK_THROWS_AS(read_csv_matrix(empty, "empty"), data_error);
    CHECK_THROWS_AS(read_csv_matrix("/nonexistent/file.csv"), data_error);
}

TEST_CASE("float32 binary matrix round-trips and rejects corruption") {
    std::mt19937_64 rng(54);
    MatF m = testutil::random_matf(rng, 7, 3, -10, 10);
    for (auto& v : m.data()) v = static_cast<double>(static_cast<float>(v)); // representable
    const auto path = temp_file("mat.f32");
    write_f32_matrix(m, path.string());
    const MatF back = read_f32_matrix(path.string());
    CHECK(back == m);

    std::ofstream(path, std::ios::binary) << "WRONGMAG garbage";
    CHECK_THROWS_AS(read_f32_matrix(path.string()), data_error);

    write_f32_matrix(m, path.string());
    std::filesystem::resize_file(path, 24); // cut the payload short
    CHECK_THROWS_AS(read_f32_matrix(path.string()), data_error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_f32_matrix("/nonexistent/mat.f32"), data_error);
}

TEST_CASE("config file: preset selection with field overrides") {
    std::istringstream in("# comment\n[macro]\npreset = 0.8V\nn_dec = 8\nn_s=16\n"
                          "[timing]\nt_mux = 123.5\n[energy]\ne_hs = 2\n[area]\na_global=0.01\n");
    const SimConfig cfg = load_sim_config(in, "test.ini");
    CHECK(cfg.voltage_preset == "0.8V");
    CHECK(cfg.n_dec == 8);
    CHECK(cfg.n_s == 16);
    CHECK(cfg.timing.t_mux == 123.5);
    CHECK(cfg.timing.t_sram_read == SimConfig::preset("0.8V").timing.t_sram_read);
    CHECK(cfg.energy.e_hs == 2.0);
    CHECK(cfg.area.a_global == 0.01);
}

TEST_CASE("config file: malformed input and unknown presets are rejected") {
    std::istringstream bad_section("[macro\npreset=0.5V\n");
    CHECK_THROWS_AS(load_sim_config(bad_section, "x"), data_error);
    std::istringstream no_section("preset=0.5V\n");
    CHECK_THROWS_AS(load_sim_config(no_section, "x"), data_error);
    std::istringstream bad_number("[timing]\nt_mux = fast\n");
    CHECK_THROWS_AS(load_sim_config(bad_number, "x"), data_error);
    std::istringstream bad_preset("[macro]\npreset = 1.2V\n");
    CHECK_THROWS_AS(load_sim_config(bad_preset, "x"), dim_error);
    CHECK_THROWS_AS(SimConfig::preset("3.3V"), dim_error);

    std::istringstream bad_ndec("[macro]\nn_dec = 0\n");
    CHECK_THROWS_AS(load_sim_config(bad_ndec, "x"), dim_error);
}
