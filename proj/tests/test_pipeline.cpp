#include <catch_amalgamated.hpp>

#include "swarmap/pipeline.hpp"

#include <fstream>
#include <iterator>

using namespace swarmap;
namespace fs = std::filesystem;

namespace {

const std::string kData = SWARMAP_DATA_DIR;

DomainFile domain(const char* name) { return load_domain(kData + "/domains/" + name + ".json"); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

SimConfig short_run(std::uint64_t seed) {
    SimConfig s;
    s.robots = 20;
    s.duration = 120.0;
    s.seed = seed;
    return s;
}

}  // namespace

TEST_CASE("mae examples") {
    GroundTruthMap truth;
    truth.rows = 2;
    truth.cols = 2;
    truth.occupied = {false, true, false, false};
    BinaryMap est{2, 2, {true, false, true, true}};
    CHECK(mae(est, truth) == 0.0);
    est.free = {true, true, true, true};
    CHECK(mae(est, truth) == 0.25);
    est.free = {false, true, false, false};
    CHECK(mae(est, truth) == 1.0);
    BinaryMap wrong{1, 4, {true, true, true, true}};
    CHECK_THROWS_AS(mae(wrong, truth), dimension_error);
}

TEST_CASE("artifacts are byte-identical across reruns") {
    const DomainFile f = domain("d2_two");
    const fs::path base = fs::temp_directory_path() / "swarmap_test_pipeline";
    fs::remove_all(base);
    write_artifacts(base / "a", run_trial(f, short_run(4)), f);
    write_artifacts(base / "b", run_trial(f, short_run(4), kDefaultRho, 3), f);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(base / "a")) {
        const auto name = e.path().filename();
        if (name == "timing.txt") continue;
        INFO(name.string());
        CHECK(slurp(e.path()) == slurp(base / "b" / name));
        ++files;
    }
    CHECK(files == 12);
}

TEST_CASE("successful trials stay within the MAE envelope") {
    for (const char* name : {"d1_single", "d2_two"}) {
        const DomainFile f = domain(name);
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const TrialReport r = run_trial(f, short_run(seed)).report;
            INFO(name << " seed " << seed);
            if (r.success) CHECK(r.mae <= r.pao / 100.0 + 0.10);
            CHECK(r.pao == pao(f.domain));
            CHECK(r.gamma_map <= 1.0);
        }
    }
}

TEST_CASE("final map equals the sublevel set at delta_cls") {
    const DomainFile f = domain("d3_three");
    const TrialResult res = run_trial(f, short_run(9));
    CHECK(res.map.free == sublevel_map(res.smoothed, res.report.delta_cls).free);
    CHECK(res.report.gamma_est == Catch::Approx(1.0 - res.report.delta_cls));
}

TEST_CASE("single-cell sweep reproduces run_trial with the derived seed") {
    ExperimentConfig cfg;
    cfg.domain = domain("d1_single");
    cfg.sim = short_run(0);
    cfg.seed = 77;
    cfg.sweep = SweepVariable::duration;
    cfg.sweep_values = {90.0};
    cfg.trials = 1;
    const SweepResult s = sweep(cfg);
    REQUIRE(s.trials.size() == 1);
    REQUIRE(s.trials[0].report);
    SimConfig direct = cfg.sim;
    direct.duration = 90.0;
    direct.seed = derive_seed(77, 90.0, 0);
    const TrialReport r = run_trial(cfg.domain, direct).report;
    CHECK(s.trials[0].report->seed == r.seed);
    CHECK(s.trials[0].report->mae == r.mae);
    CHECK(s.trials[0].report->delta_cls == r.delta_cls);
    CHECK(s.rows[0].completed == 1);
    CHECK_FALSE(s.rows[0].mae.has_value());
}

TEST_CASE("sweep results do not depend on the worker count") {
    ExperimentConfig cfg;
    cfg.domain = domain("d0_empty");
    cfg.sim = short_run(0);
    cfg.sim.robots = 10;
    cfg.sim.duration = 40.0;
    cfg.sweep = SweepVariable::robots;
    cfg.sweep_values = {5, 10};
    cfg.trials = 3;
    const SweepResult one = sweep(cfg);
    cfg.jobs = 4;
    const SweepResult many = sweep(cfg);
    REQUIRE(one.trials.size() == 6);
    for (std::size_t k = 0; k < one.trials.size(); ++k) {
        REQUIRE(one.trials[k].report);
        CHECK(one.trials[k].report->mae == many.trials[k].report->mae);
        CHECK(one.trials[k].report->seed == many.trials[k].report->seed);
    }
    CHECK(one.rows[1].mean_mae == many.rows[1].mean_mae);
    REQUIRE(one.rows[0].mae);
}

TEST_CASE("noise sweep keeps the filter model fixed") {
    ExperimentConfig cfg;
    cfg.domain = domain("d0_empty");
    cfg.sweep = SweepVariable::noise;
    cfg.sweep_values = {0.6};
    const SimConfig s = sweep_config(cfg, 0.6, 0);
    CHECK(s.rssi_std == 0.6);
    REQUIRE(s.filter_rssi_std);
    CHECK(*s.filter_rssi_std == cfg.sim.rssi_std);
    CHECK(derive_seed(1, 0.6, 0) != derive_seed(1, 0.6, 1));
    CHECK(derive_seed(1, 0.6, 0) != derive_seed(1, 0.7, 0));
}

TEST_CASE("experiment parsing") {
    const ExperimentConfig c = load_experiment(kData + "/experiments/d2_two.json");
    CHECK(c.domain.domain.obstacles.size() == 2);
    CHECK(c.trials == 20);
    CHECK(c.sim.seed == c.seed);

    const auto parse = [](const char* text) { return parse_experiment(Json::parse(text), kData + "/experiments"); };
    CHECK_THROWS_AS(parse(R"({"seed": 1})"), config_error);
    CHECK_THROWS_AS(parse(R"({"domain": "../domains/d1_single.json", "trials": 0})"), config_error);
    CHECK_THROWS_AS(parse(R"({"domain": "../domains/d1_single.json", "sweep": {"variable": "Q", "values": [1]}})"),
                    config_error);
    CHECK_THROWS_AS(parse(R"({"domain": "../domains/d1_single.json", "sweep": {"variable": "N", "values": []}})"),
                    config_error);
    CHECK_THROWS_AS(parse(R"({"domain": "../domains/d1_single.json", "sim": {"p_turn": 2}})"), config_error);
    CHECK_THROWS_AS(parse(R"({"domain": "../domains/d1_single.json", "sim": {"process_noise": "x"}})"), config_error);
    CHECK_THROWS_AS(parse(R"({"domain": "../domains/nope.json"})"), config_error);

    const ExperimentConfig q = parse(R"({"domain": "../domains/d1_single.json", "sim": {"process_noise": [1, 2, 3, 4]}})");
    REQUIRE(q.sim.process_noise_override);
    CHECK(q.sim.process_noise_override->diagonal() == Vec4(1, 2, 3, 4));
}
