#include "autopv/cli_commands.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "autopv/csv_io.hpp"
#include "autopv/errors.hpp"
#include "doctest.h"

using namespace autopv;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("autopv_cfg_" + std::to_string(static_cast<unsigned long>(::getpid())) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

RunConfig small_config(const TempDir& tmp, int days, const char* test_start) {
    RunConfig cfg;
    cfg.data_dir = tmp.path / "data";
    cfg.model_dir = tmp.path / "models";
    cfg.report_dir = tmp.path / "reports";
    cfg.seed = 4;
    cfg.start = "2019-04-01T00:00:00Z";
    cfg.days = days;
    cfg.test_start = test_start;
    cfg.cycle_days = 2;
    cfg.window_samples = 192;
    cfg.max_trials = 5;
    return cfg;
}

}  // namespace

TEST_CASE("config defaults validate and serialize round-trip") {
    RunConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    const nlohmann::json j = cfg.to_json();
    const RunConfig back = RunConfig::from_json(j);
    CHECK(back.to_json() == j);
    CHECK(back.data_dir == cfg.data_dir);
    CHECK(back.seed == cfg.seed);
    CHECK(back.days == 1096);
    CHECK(back.window_samples == 2688);
    CHECK(back.adaptation_enabled);
}

TEST_CASE("config files reject unknown keys and bad values") {
    CHECK_THROWS_AS(RunConfig::from_json({{"sedd", 7}}), ConfigError);

    RunConfig partial = RunConfig::from_json({{"seed", 9}, {"days", 30}});
    CHECK(partial.seed == 9);
    CHECK(partial.days == 30);
    CHECK(partial.fleet == "default-11");

    RunConfig bad;
    bad.days = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.fleet = "unknown-fleet";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.start = "not-a-time";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.cycle_days = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.window_samples = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.max_trials = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.data_dir = "";
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    TempDir tmp;
    const fs::path file = tmp.path / "run.json";
    write_json_file(file, {{"seed", 12}});
    CHECK(RunConfig::from_file(file).seed == 12);
    CHECK_THROWS_AS(RunConfig::from_file(tmp.path / "none.json"), IoError);
}

TEST_CASE("generation writes a loadable fleet and is seed-stable") {
    TempDir tmp;
    const RunConfig cfg = small_config(tmp, 2, "2019-04-02T00:00:00Z");

    std::ostringstream out1;
    cmd_generate(cfg, out1);
    CHECK(out1.str().find("pv01") != std::string::npos);
    CHECK(out1.str().find("multi-roof mixture") != std::string::npos);

    const auto fleet = load_fleet(cfg.data_dir);
    REQUIRE(fleet.size() == 11);
    CHECK(fleet.front().id == "pv01");
    CHECK(fleet.front().power_kw.size() == 192);

    const nlohmann::json manifest = read_fleet_manifest(cfg.data_dir);
    CHECK(manifest.at("seed").get<std::uint64_t>() == cfg.seed);
    CHECK(manifest.at("days").get<int>() == 2);

    // regenerating with the same seed rewrites identical files
    const std::string before = read_text_file(cfg.data_dir / "pv01.power.csv");
    std::ostringstream out2;
    cmd_generate(cfg, out2);
    CHECK(read_text_file(cfg.data_dir / "pv01.power.csv") == before);
}

TEST_CASE("the implied split spans the fleet on disk") {
    TempDir tmp;
    const RunConfig cfg = small_config(tmp, 4, "2019-04-03T00:00:00Z");
    std::ostringstream sink;
    cmd_generate(cfg, sink);
    const auto fleet = load_fleet(cfg.data_dir);

    const EvalSplit split = config_split(cfg, fleet);
    CHECK(split.pretrain_start == parse_iso8601("2019-04-01T00:00:00Z"));
    CHECK(split.test_start == parse_iso8601("2019-04-03T00:00:00Z"));
    CHECK(split.test_end == parse_iso8601("2019-04-05T00:00:00Z"));

    // a boundary outside the generated span fails loudly
    RunConfig outside = cfg;
    outside.test_start = "2020-01-01T00:00:00Z";
    CHECK_THROWS_AS(config_split(outside, fleet), ConfigError);
}

TEST_CASE("report rendering reads back a written report") {
    TempDir tmp;
    fs::create_directories(tmp.path / "reports");

    EvaluationReport report;
    report.seed = 3;
    report.cycle_days = 2;
    report.window_samples = 192;
    report.split.pretrain_start = 0;
    report.split.test_start = kDay;
    report.split.test_end = 2 * kDay;
    PlantEvaluation plant;
    plant.plant_id = "px";
    plant.scores = MethodScores{0.1, 0.2, 0.3, 0.25};
    plant.weight_log.push_back(WeightLogEntry{kDay, {0.6, 0.4}, 0.01});
    report.plants.push_back(plant);
    report.mean = plant.scores;

    const fs::path file = tmp.path / "reports" / "report.json";
    write_json_file(file, report.to_json());

    RunConfig cfg;
    cfg.report_dir = tmp.path / "reports";
    std::ostringstream out;
    cmd_report(cfg, file, out);
    CHECK(out.str().find("px") != std::string::npos);
    CHECK(out.str().find("0.2500") != std::string::npos);

    std::ostringstream out2;
    cmd_report(cfg, {}, out2);  // default path: <report_dir>/report.json
    CHECK(out2.str() == out.str());

    CHECK_THROWS_AS(cmd_report(cfg, tmp.path / "absent.json", out), IoError);
}
