#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "innerlab/experiment.hpp"

using namespace innerlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("innerlab-test-" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("config parsing: values, comments, typed getters") {
    ExperimentConfig cfg = ExperimentConfig::from_text(
        "# a comment\n"
        "preset = theorem-c\n"
        "\n"
        "horizon = 5000\n"
        "lambda = 0.25\n"
        "assert_all_hit = false\n"
        "seed = 123\n",
        "inline.cfg");
    CHECK(cfg.preset() == "theorem-c");
    CHECK(cfg.get_int("horizon", 0) == 5000);
    CHECK(cfg.get_real("lambda", 0.0) == doctest::Approx(0.25));
    CHECK(cfg.get_bool("assert_all_hit", true) == false);
    CHECK(cfg.get_uint("seed", 0) == 123);
    CHECK(cfg.get_int("samples", 42) == 42);  // default applies
}

TEST_CASE("config parsing: strict schema rejects misspelled keys by name and line") {
    try {
        ExperimentConfig::from_text(
            "preset = theorem-c\n"
            "sampels = 100\n",
            "bad.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key == "sampels");
        CHECK(e.line == 2);
        CHECK(std::string(e.what()).find("sampels") != std::string::npos);
    }

    CHECK_THROWS_AS(ExperimentConfig::from_text("horizon = 10\n", "no-preset.cfg"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_text("preset = not-a-preset\n", "bad2.cfg"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_text("preset = theorem-c\nnonsense line\n",
                                                "bad3.cfg"),
                    ConfigError);
    CHECK_THROWS_AS(
        ExperimentConfig::from_text("preset = theorem-c\nhorizon = ten\n", "bad4.cfg")
            .get_int("horizon", 0),
        ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_text(
                        "preset = theorem-c\nhorizon = 1\nhorizon = 2\n", "dup.cfg"),
                    ConfigError);
}

TEST_CASE("list-presets: one row per preset, byte-identical across calls") {
    std::string a = list_presets();
    std::string b = list_presets();
    CHECK(a == b);
    for (const std::string& name : preset_names())
        CHECK(a.find(name) != std::string::npos);
    CHECK(a.find("theorem-c") != std::string::npos);
    CHECK(a.find("divergent") != std::string::npos);
    CHECK(a.find("ex-conjugated") != std::string::npos);
    CHECK(preset_names().size() == 11);
}

TEST_CASE("runs are reproducible: same seed gives byte-identical CSV bodies") {
    ExperimentConfig cfg = ExperimentConfig::from_text(
        "preset = theorem-c\n"
        "seed = 9\n"
        "horizon = 2000\n"
        "samples = 50\n"
        "assert_ratio_min = 0.5\n"
        "assert_ratio_max = 1.5\n",
        "repro.cfg");

    RunOptions opt1;
    opt1.out_dir = fresh_dir("repro1").string();
    opt1.threads = 1;
    RunOutcome r1 = run_experiment(cfg, opt1);

    RunOptions opt8;
    opt8.out_dir = fresh_dir("repro8").string();
    opt8.threads = 8;
    RunOutcome r2 = run_experiment(cfg, opt8);

    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    REQUIRE(r1.files == r2.files);
    for (const std::string& name : r1.files) {
        std::string b1 = slurp(fs::path(r1.out_dir) / name);
        std::string b2 = slurp(fs::path(r2.out_dir) / name);
        CHECK(!b1.empty());
        CHECK(b1 == b2);
    }

    // A different seed changes the sampled angles and the CSV body.
    RunOptions opt_seed;
    opt_seed.out_dir = fresh_dir("repro-seed").string();
    opt_seed.override_seed = true;
    opt_seed.seed = 10;
    RunOutcome r3 = run_experiment(cfg, opt_seed);
    CHECK(slurp(fs::path(r3.out_dir) / r3.files[0]) !=
          slurp(fs::path(r1.out_dir) / r1.files[0]));
}

TEST_CASE("CSV bodies carry documented headers and 17-digit reals") {
    ExperimentConfig cfg = ExperimentConfig::from_text(
        "preset = theorem-c\n"
        "horizon = 500\n"
        "samples = 10\n"
        "assert_ratio_min = 0.1\n"
        "assert_ratio_max = 2.0\n",
        "csv.cfg");
    RunOptions opt;
    opt.out_dir = fresh_dir("csv").string();
    RunOutcome r = run_experiment(cfg, opt);
    std::string body = slurp(fs::path(r.out_dir) / "theorem-c.csv");
    CHECK(body.substr(0, 2) == "# ");
    CHECK(body.find("sample,theta0,A,phi,ratio\n") != std::string::npos);
    CHECK(body.find("\r") == std::string::npos);  // LF only
    // 17 significant digits round-trip doubles exactly: the first sampled
    // angle for the default seed.
    CHECK(body.find("3.559811364734998") != std::string::npos);

    std::string manifest = slurp(fs::path(r.manifest_path));
    CHECK(manifest.find("\"fnv1a64\"") != std::string::npos);
    CHECK(manifest.find("\"all_pass\": true") != std::string::npos);
    CHECK(manifest.find("\"theorem-c.csv\"") != std::string::npos);
}

TEST_CASE("run_experiment: failing assertions give exit code 1") {
    ExperimentConfig cfg = ExperimentConfig::from_text(
        "preset = theorem-c\n"
        "horizon = 500\n"
        "samples = 10\n"
        "assert_ratio_min = 0.999\n"
        "assert_ratio_max = 1.001\n",
        "fail.cfg");
    RunOptions opt;
    opt.out_dir = fresh_dir("fail").string();
    RunOutcome r = run_experiment(cfg, opt);
    CHECK(r.exit_code == 1);
    bool found_fail = false;
    for (const auto& c : r.criteria) found_fail |= !c.pass;
    CHECK(found_fail);
}
