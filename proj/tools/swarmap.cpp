// Command-line driver. Each stage reads the previous stage's files from the
// output directory, so `simulate`, `map`, `threshold`, `report` in sequence
// produce the same artifacts as `run` (grids are re-read at 9 digits).

#include "swarmap/swarmap.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace swarmap;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> trials;
    std::optional<unsigned> jobs;
};

ExperimentConfig load(const Options& o) {
    ExperimentConfig cfg = load_experiment(o.config);
    if (o.seed) {
        cfg.seed = *o.seed;
        cfg.sim.seed = *o.seed;
    }
    if (o.out) cfg.out = *o.out;
    if (o.trials) cfg.trials = *o.trials;
    if (o.jobs) cfg.jobs = *o.jobs;
    cfg.validate();
    return cfg;
}

DensityGrid grid_from_csv(const fs::path& p, const GridSpec& spec) {
    const CsvGrid csv = read_grid_csv(p);
    if (csv.rows != spec.rows || csv.cols != spec.cols) throw dimension_error(p.string() + " does not match the domain grid");
    DensityGrid g;
    g.rows = csv.rows;
    g.cols = csv.cols;
    g.p_free = csv.values;
    return g;
}

void cmd_simulate(const ExperimentConfig& cfg) {
    const SwarmRun run = run_swarm(cfg.sim, cfg.domain.domain);
    write_tuples_csv(cfg.out / "tuples.csv", run.tuples);
    write_trajectory_csv(cfg.out / "trajectory.csv", run.trajectory);
    auto out = detail::open_out(cfg.out / "domain.json");
    out << domain_to_json(cfg.domain).dump(2) << '\n';
    std::cout << "tuples=" << run.tuples.size() << '\n';
}

void cmd_map(const ExperimentConfig& cfg) {
    const auto tuples = read_tuples_csv(cfg.out / "tuples.csv");
    const GridSpec grid = cfg.domain.grid();
    const DensityGrid raw = accumulate(tuples, grid, cfg.rho, cfg.jobs);
    const DensityGrid sm = smooth(raw);
    write_grid_csv(cfg.out / "density.csv", raw.rows, raw.cols, raw.p_free);
    write_grid_csv(cfg.out / "counts.csv", raw.rows, raw.cols, raw.count);
    write_grid_csv(cfg.out / "smoothed.csv", sm.rows, sm.cols, sm.p_free);
    std::cout << "saturated_terms=" << raw.saturated << '\n';
}

void cmd_threshold(const ExperimentConfig& cfg) {
    const DensityGrid sm = grid_from_csv(cfg.out / "smoothed.csv", cfg.domain.grid());
    const FilteredComplex c = build_complex(sm);
    const Barcode b = persistence(c);
    const ThresholdChoice choice = select_threshold(b);
    write_barcode(cfg.out / "barcode.txt", b);
    write_betti_curve(cfg.out / "betti_curve.csv", betti_curve(c));
    write_pgm(cfg.out / "map.pgm", threshold_map(sm, effective_gamma(sm, choice.delta_cls)));
    std::cout << "delta_cls=" << format_g9(choice.delta_cls) << "\ngamma_est=" << format_g9(choice.gamma_est) << '\n';
}

void cmd_report(const ExperimentConfig& cfg) {
    const GridSpec grid = cfg.domain.grid();
    const DensityGrid sm = grid_from_csv(cfg.out / "smoothed.csv", grid);
    const Barcode b = read_barcode(cfg.out / "barcode.txt");
    const GroundTruthMap truth = ground_truth(cfg.domain.domain, grid);
    const auto tuples = read_tuples_csv(cfg.out / "tuples.csv");

    TrialReport r;
    r.seed = cfg.sim.seed;
    BinaryMap map;
    classify(r, sm, b, truth, cfg.domain.domain, map);
    r.covered = coverage_check(tuples, grid, truth).covered;
    r.tuples = tuples.size();
    r.sigma_max = sigma_max(tuples);
    write_pgm(cfg.out / "truth.pgm", truth.rows, truth.cols, truth_free(truth));
    write_grid_csv(cfg.out / "error.csv", map.rows, map.cols, error_map(map, truth));
    write_key_values(cfg.out / "report.txt", report_key_values(r));
    for (const auto& [k, v] : report_key_values(r)) std::cout << k << '=' << v << '\n';
}

void cmd_run(const ExperimentConfig& cfg) {
    const TrialResult res = run_trial(cfg.domain, cfg.sim, cfg.rho, cfg.jobs);
    write_artifacts(cfg.out, res, cfg.domain);
    for (const auto& [k, v] : report_key_values(res.report)) std::cout << k << '=' << v << '\n';
}

void cmd_sweep(const ExperimentConfig& cfg) {
    const SweepResult res = sweep(cfg);
    write_sweep(cfg.out, cfg, res);
    for (const auto& row : res.rows) {
        std::cout << to_string(cfg.sweep) << '=' << format_g9(row.value) << " mae=" << format_g9(row.mean_mae)
                  << " gamma=" << format_g9(row.mean_gamma) << " success=" << format_g9(row.success_rate) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Swarm occupancy mapping with persistence-based thresholding"};
    app.require_subcommand(1);
    Options o;

    const auto add = [&](const std::string& name, const std::string& help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config, "experiment JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--trials", o.trials, "trials per sweep value")->check(CLI::PositiveNumber);
        sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
        return sub;
    };
    auto* simulate = add("simulate", "run the swarm and write tuples.csv, trajectory.csv");
    auto* map = add("map", "accumulate and smooth tuples.csv into density grids");
    auto* threshold = add("threshold", "persistence barcode and thresholded map from smoothed.csv");
    auto* report = add("report", "score the thresholded map against the ground truth");
    auto* run = add("run", "all stages for one seed");
    auto* sweep_cmd = add("sweep", "batch trials over the configured sweep variable");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const ExperimentConfig cfg = load(o);
        if (simulate->parsed()) cmd_simulate(cfg);
        else if (map->parsed()) cmd_map(cfg);
        else if (threshold->parsed()) cmd_threshold(cfg);
        else if (report->parsed()) cmd_report(cfg);
        else if (run->parsed()) cmd_run(cfg);
        else if (sweep_cmd->parsed()) cmd_sweep(cfg);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const dimension_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
