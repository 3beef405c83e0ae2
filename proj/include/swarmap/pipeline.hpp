#pragma once

// simulate -> localize -> accumulate -> smooth -> persist -> threshold -> report,
// plus batch sweeps over N, T or the injected RSSI noise.

#include "swarmap/complex.hpp"
#include "swarmap/io.hpp"
#include "swarmap/occupancy.hpp"
#include "swarmap/persistence.hpp"
#include "swarmap/stats.hpp"
#include "swarmap/swarm.hpp"
#include "swarmap/threshold.hpp"

#include <atomic>
#include <bit>
#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace swarmap {

enum class SweepVariable { none, robots, duration, noise };

struct ExperimentConfig {
    DomainFile domain;
    SimConfig sim;
    double rho = kDefaultRho;
    std::size_t trials = 1;
    SweepVariable sweep = SweepVariable::none;
    std::vector<double> sweep_values;
    std::filesystem::path out = "out";
    std::uint64_t seed = 1;
    unsigned jobs = 1;

    void validate() const {
        sim.validate();
        if (trials < 1) throw config_error("trial count must be at least 1");
        if (sweep != SweepVariable::none && sweep_values.empty()) throw config_error("sweep values must be non-empty");
        if (!(rho > 0.0 && rho < 1.0)) throw config_error("rho must lie in (0, 1)");
    }
};

inline SweepVariable parse_sweep_variable(const std::string& s) {
    if (s == "N") return SweepVariable::robots;
    if (s == "T") return SweepVariable::duration;
    if (s == "noise") return SweepVariable::noise;
    throw config_error("unknown sweep variable '" + s + "' (expected N, T or noise)");
}

inline const char* to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::robots: return "N";
        case SweepVariable::duration: return "T";
        case SweepVariable::noise: return "noise";
        default: return "none";
    }
}

namespace detail {

inline void apply_sim_overrides(SimConfig& s, const Json& j) {
    s.robots = j.value("robots", s.robots);
    s.duration = j.value("duration", s.duration);
    s.dt = j.value("dt", s.dt);
    s.speed = j.value("speed", s.speed);
    s.p_turn = j.value("p_turn", s.p_turn);
    s.sensing_radius = j.value("sensing_radius", s.sensing_radius);
    s.rssi_std = j.value("rssi_std", s.rssi_std);
    s.velocity_std = j.value("velocity_std", s.velocity_std);
    s.record_interval = j.value("record_interval", s.record_interval);
    s.start_strip = j.value("start_strip", s.start_strip);
    s.max_resamples = j.value("max_resamples", s.max_resamples);
    s.initial_variance = j.value("initial_variance", s.initial_variance);
    if (j.contains("filter_rssi_std")) s.filter_rssi_std = j["filter_rssi_std"].get<double>();
    if (j.contains("start_edge")) s.start_edge = j["start_edge"].get<int>();
    if (j.contains("process_noise")) {
        const auto& q = j["process_noise"];
        Mat4 Q = Mat4::Zero();
        if (q.is_number()) {
            Q = q.get<double>() * Mat4::Identity();
        } else if (q.is_array() && q.size() == 4 && q[0].is_number()) {
            for (int i = 0; i < 4; ++i) Q(i, i) = q[static_cast<std::size_t>(i)].get<double>();
        } else if (q.is_array() && q.size() == 4) {
            for (int i = 0; i < 4; ++i)
                for (int k = 0; k < 4; ++k) Q(i, k) = q[static_cast<std::size_t>(i)].at(static_cast<std::size_t>(k)).get<double>();
        } else {
            throw config_error("process_noise must be a number, a 4-vector diagonal or a 4x4 matrix");
        }
        s.process_noise_override = Q;
    }
}

}  // namespace detail

// Relative domain paths resolve against `base_dir` (the config file's folder).
inline ExperimentConfig parse_experiment(const Json& j, const std::filesystem::path& base_dir = {}) {
    try {
        ExperimentConfig c;
        const auto& d = j.at("domain");
        if (d.is_string()) {
            std::filesystem::path p = d.get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            c.domain = load_domain(p);
        } else {
            c.domain = parse_domain(d);
        }
        if (j.contains("sim")) detail::apply_sim_overrides(c.sim, j["sim"]);
        c.rho = j.value("rho", c.rho);
        c.trials = j.value("trials", c.trials);
        c.seed = j.value("seed", c.seed);
        c.jobs = j.value("jobs", c.jobs);
        if (j.contains("out")) c.out = j["out"].get<std::string>();
        if (j.contains("sweep")) {
            c.sweep = parse_sweep_variable(j["sweep"].at("variable").get<std::string>());
            c.sweep_values = j["sweep"].at("values").get<std::vector<double>>();
        }
        c.sim.seed = c.seed;
        c.validate();
        return c;
    } catch (const Json::exception& e) {
        throw config_error(std::string("experiment config: ") + e.what());
    }
}

inline ExperimentConfig load_experiment(const std::filesystem::path& p) {
    return parse_experiment(read_json(p), p.parent_path());
}

// Fraction of cells where the estimate disagrees with the truth.
inline double mae(const BinaryMap& est, const GroundTruthMap& truth) {
    if (est.rows != truth.rows || est.cols != truth.cols) throw dimension_error("map and truth grids differ");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < est.size(); ++i) wrong += (est.free[i] == truth.occupied[i]) ? 1 : 0;
    return static_cast<double>(wrong) / static_cast<double>(est.size());
}

inline std::vector<bool> truth_free(const GroundTruthMap& truth) {
    std::vector<bool> f(truth.occupied.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = !truth.occupied[i];
    return f;
}

struct StageTimes {
    double simulate = 0.0;
    double accumulate = 0.0;
    double smooth = 0.0;
    double persistence = 0.0;
    double threshold = 0.0;
};

struct TrialReport {
    std::uint64_t seed = 0;
    double gamma_est = 0.0;
    double delta_cls = 0.0;
    double gamma_map = 0.0;  // strict threshold that reproduces the delta_cls sublevel map
    double mae = 0.0;
    double pao = 0.0;        // %
    Betti betti;
    std::size_t obstacles = 0;
    bool success = false;
    bool covered = false;
    std::size_t tuples = 0;
    std::size_t saturated = 0;
    std::size_t singular_updates = 0;
    std::size_t held_steps = 0;
    double sigma_max = 0.0;
    StageTimes times;
};

struct TrialResult {
    TrialReport report;
    SwarmRun run;
    DensityGrid raw;
    DensityGrid smoothed;
    Barcode barcode;
    BinaryMap map;
    GroundTruthMap truth;
};

// Classification and scoring shared by `run` and the staged `report`.
inline void classify(TrialReport& r, const DensityGrid& smoothed, const Barcode& barcode, const GroundTruthMap& truth,
                     const DomainSpec& domain, BinaryMap& map) {
    const ThresholdChoice choice = select_threshold(barcode);
    r.delta_cls = choice.delta_cls;
    r.gamma_est = choice.gamma_est;
    r.gamma_map = effective_gamma(smoothed, choice.delta_cls);
    map = threshold_map(smoothed, r.gamma_map);
    r.mae = mae(map, truth);
    r.pao = pao(domain);
    r.betti = betti_of_map(map);
    r.obstacles = domain.obstacles.size();
    r.success = r.betti.b0 == 1 && r.betti.b1 == r.obstacles;
}

inline TrialResult run_trial(const DomainFile& df, const SimConfig& sim, double rho = kDefaultRho, unsigned jobs = 1) {
    using clock = std::chrono::steady_clock;
    const auto seconds = [](clock::time_point a, clock::time_point b) { return std::chrono::duration<double>(b - a).count(); };

    TrialResult res;
    TrialReport& r = res.report;
    r.seed = sim.seed;
    const GridSpec grid = df.grid();
    res.truth = ground_truth(df.domain, grid);

    auto t0 = clock::now();
    res.run = run_swarm(sim, df.domain);
    auto t1 = clock::now();
    r.times.simulate = seconds(t0, t1);

    res.raw = accumulate(res.run.tuples, grid, rho, jobs);
    auto t2 = clock::now();
    r.times.accumulate = seconds(t1, t2);
    res.smoothed = smooth(res.raw);
    auto t3 = clock::now();
    r.times.smooth = seconds(t2, t3);

    res.barcode = persistence(build_complex(res.smoothed));
    auto t4 = clock::now();
    r.times.persistence = seconds(t3, t4);

    classify(r, res.smoothed, res.barcode, res.truth, df.domain, res.map);
    r.times.threshold = seconds(t4, clock::now());

    r.covered = coverage_check(res.run.tuples, grid, res.truth).covered;
    r.tuples = res.run.tuples.size();
    r.saturated = res.raw.saturated;
    r.singular_updates = res.run.singular_updates;
    r.held_steps = res.run.held_steps;
    r.sigma_max = sigma_max(res.run.tuples);
    return res;
}

inline KeyValues report_key_values(const TrialReport& r) {
    return {
        {"seed", std::to_string(r.seed)},
        {"gamma_est", format_g9(r.gamma_est)},
        {"delta_cls", format_g9(r.delta_cls)},
        {"gamma_map", format_g9(r.gamma_map)},
        {"mae", format_g9(r.mae)},
        {"pao_percent", format_g9(r.pao)},
        {"betti0", std::to_string(r.betti.b0)},
        {"betti1", std::to_string(r.betti.b1)},
        {"obstacles", std::to_string(r.obstacles)},
        {"success", r.success ? "true" : "false"},
        {"coverage", r.covered ? "true" : "false"},
        {"tuples", std::to_string(r.tuples)},
        {"saturated_terms", std::to_string(r.saturated)},
        {"singular_updates", std::to_string(r.singular_updates)},
        {"held_steps", std::to_string(r.held_steps)},
        {"sigma_max", format_g9(r.sigma_max)},
    };
}

inline KeyValues timing_key_values(const StageTimes& t) {
    return {
        {"simulate_s", format_g9(t.simulate)},   {"accumulate_s", format_g9(t.accumulate)},
        {"smooth_s", format_g9(t.smooth)},       {"persistence_s", format_g9(t.persistence)},
        {"threshold_s", format_g9(t.threshold)},
    };
}

// Sublevel Betti numbers for delta = 0.05, 0.10, ..., 0.95.
inline std::vector<std::pair<double, Betti>> betti_curve(const FilteredComplex& c) {
    std::vector<std::pair<double, Betti>> out;
    for (int k = 1; k <= 19; ++k) {
        const double delta = 0.05 * k;
        out.emplace_back(delta, betti_at(c, delta));
    }
    return out;
}

inline void write_betti_curve(const std::filesystem::path& p, const std::vector<std::pair<double, Betti>>& curve) {
    auto out = detail::open_out(p);
    out << "delta,betti0,betti1\n";
    for (const auto& [d, b] : curve) out << format_g9(d) << ',' << b.b0 << ',' << b.b1 << '\n';
}

inline std::vector<int> error_map(const BinaryMap& est, const GroundTruthMap& truth) {
    std::vector<int> e(est.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = est.free[i] == truth.occupied[i] ? 1 : 0;
    return e;
}

// Everything except timing.txt is a pure function of the inputs and seed.
inline void write_artifacts(const std::filesystem::path& dir, const TrialResult& res, const DomainFile& df) {
    std::filesystem::create_directories(dir);
    const std::size_t rows = res.raw.rows, cols = res.raw.cols;
    write_tuples_csv(dir / "tuples.csv", res.run.tuples);
    write_trajectory_csv(dir / "trajectory.csv", res.run.trajectory);
    write_grid_csv(dir / "density.csv", rows, cols, res.raw.p_free);
    write_grid_csv(dir / "counts.csv", rows, cols, res.raw.count);
    write_grid_csv(dir / "smoothed.csv", rows, cols, res.smoothed.p_free);
    write_barcode(dir / "barcode.txt", res.barcode);
    write_betti_curve(dir / "betti_curve.csv", betti_curve(build_complex(res.smoothed)));
    write_pgm(dir / "map.pgm", res.map);
    write_pgm(dir / "truth.pgm", rows, cols, truth_free(res.truth));
    write_grid_csv(dir / "error.csv", rows, cols, error_map(res.map, res.truth));
    write_key_values(dir / "report.txt", report_key_values(res.report));
    write_key_values(dir / "timing.txt", timing_key_values(res.report.times));
    auto out = detail::open_out(dir / "domain.json");
    out << domain_to_json(df).dump(2) << '\n';
}

// Per-trial seed for sweep cell (value index, trial).
inline std::uint64_t derive_seed(std::uint64_t master, double value, std::size_t trial) {
    const std::uint64_t h = detail::splitmix64(detail::splitmix64(std::bit_cast<std::uint64_t>(value)) ^ trial);
    return master ^ h;
}

inline SimConfig sweep_config(const ExperimentConfig& cfg, double value, std::size_t trial) {
    SimConfig s = cfg.sim;
    switch (cfg.sweep) {
        case SweepVariable::robots: s.robots = static_cast<std::size_t>(std::llround(value)); break;
        case SweepVariable::duration: s.duration = value; break;
        case SweepVariable::noise:
            // The filter keeps its configured noise model; only the injected noise changes.
            if (!s.filter_rssi_std) s.filter_rssi_std = cfg.sim.rssi_std;
            s.rssi_std = value;
            break;
        default: break;
    }
    s.seed = derive_seed(cfg.seed, value, trial);
    return s;
}

struct SweepTrial {
    double value = 0.0;
    std::size_t trial = 0;
    std::optional<TrialReport> report;
    std::string error;  // set when the trial threw
};

struct SweepRow {
    double value = 0.0;
    std::size_t completed = 0;
    double success_rate = 0.0;
    std::optional<BatchStats> gamma;
    std::optional<BatchStats> mae;
    double mean_gamma = 0.0;
    double mean_mae = 0.0;
};

struct SweepResult {
    std::vector<SweepTrial> trials;  // (value, trial) order
    std::vector<SweepRow> rows;
};

inline SweepResult sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::vector<double> values =
        cfg.sweep == SweepVariable::none ? std::vector<double>{0.0} : cfg.sweep_values;

    SweepResult res;
    for (double v : values)
        for (std::size_t t = 0; t < cfg.trials; ++t) res.trials.push_back({v, t, std::nullopt, {}});

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t k = next++; k < res.trials.size(); k = next++) {
            SweepTrial& st = res.trials[k];
            try {
                const SimConfig s = sweep_config(cfg, st.value, st.trial);
                st.report = run_trial(cfg.domain, s, cfg.rho).report;
            } catch (const std::exception& e) {
                st.error = e.what();
            }
        }
    };
    const unsigned width = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(res.trials.size())));
    if (width == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < width; ++w) pool.emplace_back(worker);
    }

    for (double v : values) {
        SweepRow row;
        row.value = v;
        std::vector<double> gammas, maes;
        std::size_t ok = 0;
        for (const auto& st : res.trials) {
            if (st.value != v || !st.report) continue;
            gammas.push_back(st.report->gamma_est);
            maes.push_back(st.report->mae);
            ok += st.report->success ? 1 : 0;
        }
        row.completed = gammas.size();
        if (row.completed > 0) {
            for (double g : gammas) row.mean_gamma += g / static_cast<double>(row.completed);
            for (double m : maes) row.mean_mae += m / static_cast<double>(row.completed);
            row.success_rate = static_cast<double>(ok) / static_cast<double>(row.completed);
        }
        if (row.completed >= 2) {
            row.gamma = batch_stats(gammas);
            row.mae = batch_stats(maes);
        }
        res.rows.push_back(row);
    }
    return res;
}

inline void write_sweep(const std::filesystem::path& dir, const ExperimentConfig& cfg, const SweepResult& res) {
    std::filesystem::create_directories(dir);
    {
        auto out = detail::open_out(dir / "trials.csv");
        out << "value,trial,seed,gamma_est,delta_cls,mae,betti0,betti1,success,coverage,error\n";
        for (const auto& st : res.trials) {
            out << format_g9(st.value) << ',' << st.trial << ',';
            if (st.report) {
                const auto& r = *st.report;
                out << r.seed << ',' << format_g9(r.gamma_est) << ',' << format_g9(r.delta_cls) << ','
                    << format_g9(r.mae) << ',' << r.betti.b0 << ',' << r.betti.b1 << ',' << (r.success ? 1 : 0) << ','
                    << (r.covered ? 1 : 0) << ",\n";
            } else {
                std::string msg = st.error;
                for (char& ch : msg)
                    if (ch == ',' || ch == '\n') ch = ' ';
                out << ",,,,,,,," << msg << '\n';
            }
        }
    }
    auto out = detail::open_out(dir / "summary.csv");
    out << "variable,value,completed,mean_gamma,gamma_ci95,mean_mae,mae_ci95,success_rate\n";
    for (const auto& row : res.rows) {
        out << to_string(cfg.sweep) << ',' << format_g9(row.value) << ',' << row.completed << ','
            << format_g9(row.mean_gamma) << ',' << (row.gamma ? format_g9(row.gamma->half_width) : "nan") << ','
            << format_g9(row.mean_mae) << ',' << (row.mae ? format_g9(row.mae->half_width) : "nan") << ','
            << format_g9(row.success_rate) << '\n';
    }
}

}  // namespace swarmap
