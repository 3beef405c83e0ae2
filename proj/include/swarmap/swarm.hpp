#pragma once

// Correlated random walk of a robot swarm with reject-and-resample collision
// avoidance, noisy RSSI/odometry outputs, and per-robot EKF localization.

#include "swarmap/domain.hpp"
#include "swarmap/ekf.hpp"
#include "swarmap/signal.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace swarmap {

using Rng = std::mt19937_64;

struct RobotState {
    Vec2 X = Vec2::Zero();
    Vec2 V = Vec2::Zero();
    double theta = 0.0;
    std::size_t id = 0;
};

struct SimConfig {
    std::size_t robots = 50;        // N
    double duration = 300.0;        // T (s)
    double dt = 0.1;                // s
    double speed = 0.2;             // v (m/s)
    double p_turn = 0.2;            // p_th, heading resample probability per step
    double sensing_radius = 0.06;   // m
    std::optional<Mat4> process_noise_override;  // Q; default 0.1 * dt * I
    double rssi_std = 0.3;          // injected RSSI noise std, per transmitter
    double velocity_std = 0.05;     // injected odometry noise std, per axis (m/s)
    std::optional<double> filter_rssi_std;  // std the filter assumes; defaults to rssi_std
    double record_interval = 1.0;   // t_rec (s)
    std::uint64_t seed = 1;
    double start_strip = 0.1;       // depth of the deployment strip (m)
    std::optional<int> start_edge;  // 0 left, 1 bottom, 2 right, 3 top; default from seed
    int max_resamples = 100;
    double initial_variance = 1e-6;

    Mat4 process_noise() const { return process_noise_override.value_or(0.1 * dt * Mat4::Identity()); }

    double assumed_rssi_std() const { return filter_rssi_std.value_or(rssi_std); }

    std::size_t steps() const { return static_cast<std::size_t>(std::llround(duration / dt)); }

    std::size_t steps_per_record() const {
        return static_cast<std::size_t>(std::max<long long>(1, std::llround(record_interval / dt)));
    }

    // R = diag(R_S^2 ..., R_V^2, R_V^2) as assumed by the filter.
    Eigen::MatrixXd measurement_covariance(std::size_t transmitters) const {
        const auto l = static_cast<Eigen::Index>(transmitters);
        Eigen::MatrixXd R = Eigen::MatrixXd::Zero(l + 2, l + 2);
        const double s = assumed_rssi_std();
        for (Eigen::Index i = 0; i < l; ++i) R(i, i) = s * s;
        R(l, l) = velocity_std * velocity_std;
        R(l + 1, l + 1) = velocity_std * velocity_std;
        return R;
    }

    void validate() const {
        if (robots == 0) throw config_error("robot count must be positive");
        if (!(dt > 0.0)) throw config_error("time step must be positive");
        if (!(duration >= 0.0)) throw config_error("duration must be non-negative");
        if (!(p_turn >= 0.0 && p_turn <= 1.0)) throw config_error("p_th must lie in [0, 1]");
        if (!(speed >= 0.0)) throw config_error("speed must be non-negative");
        if (!(sensing_radius >= 0.0)) throw config_error("sensing radius must be non-negative");
        if (!(rssi_std >= 0.0) || !(velocity_std >= 0.0)) throw config_error("noise std must be non-negative");
        const double ratio = record_interval / dt;
        if (!(record_interval > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
            throw config_error("record interval must be a positive multiple of the time step");
        }
        const Mat4 Q = process_noise();
        if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw config_error("Q must be symmetric");
        Eigen::SelfAdjointEigenSolver<Mat4> es(Q, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-12) throw config_error("Q must be positive semidefinite");
    }
};

struct Measurement {
    Eigen::VectorXd z;  // [S_1 .. S_l, v_x, v_y]
    double t = 0.0;
};

// Square root factor L with L L^T = Q, for PSD (possibly singular) Q.
inline Mat4 noise_factor(const Mat4& Q) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(Q);
    const Vec4 root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal();
}

// Collision test against the other robots; `self` is excluded.
class ProximityIndex {
public:
    ProximityIndex(const Rect& bounds, double radius)
        : bounds_(bounds), radius_(radius), cell_(std::max(radius, 1e-9)) {
        nx_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(bounds.width() / cell_)));
        ny_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(bounds.height() / cell_)));
        buckets_.resize(nx_ * ny_);
    }

    void rebuild(std::span<const Vec2> positions) {
        for (auto& b : buckets_) b.clear();
        points_.assign(positions.begin(), positions.end());
        for (std::size_t i = 0; i < points_.size(); ++i) buckets_[bucket(points_[i])].push_back(i);
    }

    bool blocked(const Vec2& p, std::size_t self) const {
        if (radius_ <= 0.0 || points_.empty()) return false;
        const auto [bx, by] = coords(p);
        const std::size_t x0 = bx > 0 ? bx - 1 : 0, x1 = std::min(nx_ - 1, bx + 1);
        const std::size_t y0 = by > 0 ? by - 1 : 0, y1 = std::min(ny_ - 1, by + 1);
        for (std::size_t y = y0; y <= y1; ++y) {
            for (std::size_t x = x0; x <= x1; ++x) {
                for (std::size_t j : buckets_[y * nx_ + x]) {
                    if (j != self && (points_[j] - p).norm() < radius_) return true;
                }
            }
        }
        return false;
    }

private:
    std::pair<std::size_t, std::size_t> coords(const Vec2& p) const {
        const auto clampi = [](double v, std::size_t n) {
            if (!(v > 0.0)) return std::size_t{0};
            return std::min(n - 1, static_cast<std::size_t>(v));
        };
        return {clampi((p.x() - bounds_.xmin) / cell_, nx_), clampi((p.y() - bounds_.ymin) / cell_, ny_)};
    }
    std::size_t bucket(const Vec2& p) const {
        const auto [x, y] = coords(p);
        return y * nx_ + x;
    }

    Rect bounds_;
    double radius_;
    double cell_;
    std::size_t nx_ = 1, ny_ = 1;
    std::vector<Vec2> points_;
    std::vector<std::vector<std::size_t>> buckets_;
};

// Position a robot may occupy after moving from `from`: strictly inside the
// bounds, outside every obstacle, without crossing one on the way.
inline bool admissible_move(const DomainSpec& domain, const Vec2& from, const Vec2& to) {
    if (!domain.bounds.strictly_contains(to)) return false;
    for (const Polygon& obs : domain.obstacles) {
        if (segment_hits_polygon(obs, from, to)) return false;
    }
    return true;
}

inline void resample_heading(RobotState& s, double speed, Rng& rng) {
    std::uniform_real_distribution<double> heading(-std::numbers::pi, std::numbers::pi);
    s.theta = heading(rng);
    s.V = speed * Vec2(std::cos(s.theta), std::sin(s.theta));
}

namespace detail {

inline Vec4 draw_noise(const Mat4& factor, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec4 z;
    for (int i = 0; i < 4; ++i) z(i) = normal(rng);
    return factor * z;
}

inline RobotState step_with_factor(const RobotState& state, const SimConfig& cfg, const DomainSpec& domain, Rng& rng,
                                   const Mat4& factor, const ProximityIndex* neighbors) {
    RobotState next = state;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double u = uniform(rng);
    if (cfg.p_turn > 0.0 && u <= cfg.p_turn) resample_heading(next, cfg.speed, rng);

    for (int attempt = 0; attempt <= cfg.max_resamples; ++attempt) {
        if (attempt > 0) resample_heading(next, cfg.speed, rng);
        const Vec4 w = draw_noise(factor, rng);
        const Vec2 X = next.X + cfg.dt * next.V + w.head<2>();
        if (!admissible_move(domain, state.X, X)) continue;
        if (neighbors != nullptr && neighbors->blocked(X, state.id)) continue;
        next.X = X;
        next.V = next.V + w.tail<2>();
        return next;
    }
    next.X = state.X;
    return next;
}

}  // namespace detail

// One step of the motion model. Rejected moves force a heading resample and
// are retried up to cfg.max_resamples times; after that the robot holds.
inline RobotState step(const RobotState& state, const SimConfig& cfg, const DomainSpec& domain, Rng& rng,
                       const ProximityIndex* neighbors = nullptr) {
    return detail::step_with_factor(state, cfg, domain, rng, noise_factor(cfg.process_noise()), neighbors);
}

inline Measurement measure(const RobotState& state, const SimConfig& cfg, std::span<const Transmitter> txs,
                           Rng& rng, double t = 0.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto l = static_cast<Eigen::Index>(txs.size());
    Measurement m;
    m.t = t;
    m.z.resize(l + 2);
    for (Eigen::Index i = 0; i < l; ++i) {
        const double n = cfg.rssi_std > 0.0 ? cfg.rssi_std * normal(rng) : 0.0;
        m.z(i) = signal_strength(txs[static_cast<std::size_t>(i)], state.X) + n;
    }
    for (int k = 0; k < 2; ++k) {
        const double n = cfg.velocity_std > 0.0 ? cfg.velocity_std * normal(rng) : 0.0;
        m.z(l + k) = state.V(k) + n;
    }
    return m;
}

struct TrajectoryRow {
    double t = 0.0;
    std::size_t robot = 0;
    Vec2 truth = Vec2::Zero();
    Vec2 estimate = Vec2::Zero();
};

struct StreamSample {
    RobotState truth;
    Measurement measurement;
};

struct SwarmRun {
    std::vector<DataTuple> tuples;               // tick-major, robot order within a tick
    std::vector<TrajectoryRow> trajectory;       // one row per robot per record tick
    std::vector<std::vector<StreamSample>> streams;  // per robot, only when requested
    std::vector<Vec2> start_positions;
    std::size_t singular_updates = 0;
    std::size_t held_steps = 0;
};

struct RunOptions {
    bool keep_streams = false;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline Vec2 draw_start(const Rect& b, int edge, double depth, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double along = unit(rng);
    // keep off the boundary itself so the position is strictly inside
    const double into = std::max(1e-6, depth * unit(rng));
    switch (edge) {
        case 0: return {b.xmin + into, b.ymin + along * b.height()};
        case 1: return {b.xmin + along * b.width(), b.ymin + into};
        case 2: return {b.xmax - into, b.ymin + along * b.height()};
        default: return {b.xmin + along * b.width(), b.ymax - into};
    }
}

}  // namespace detail

inline int start_edge(const SimConfig& cfg) {
    if (cfg.start_edge) return *cfg.start_edge & 3;
    return static_cast<int>(detail::splitmix64(cfg.seed) & 3U);
}

// Deploys the swarm, runs every robot's walk and filter, and records one
// DataTuple per robot every record interval.
inline SwarmRun run_swarm(const SimConfig& cfg, const DomainSpec& domain, const RunOptions& opts = {}) {
    cfg.validate();
    const auto violations = validate_geometry(domain, 2.0 * cfg.sensing_radius);
    for (const auto& v : violations) {
        if (v.severity == Severity::error) throw config_error("invalid domain geometry: " + v.message);
    }

    const std::size_t n = cfg.robots;
    const std::span<const Transmitter> txs(domain.transmitters);
    const Mat4 A = motion_matrix(cfg.dt);
    const Mat4 Q = cfg.process_noise();
    const Mat4 factor = noise_factor(Q);
    const Eigen::MatrixXd R = cfg.measurement_covariance(txs.size());
    const RssiVelocityModel model{txs};
    const int edge = start_edge(cfg);

    std::vector<Rng> rngs;
    rngs.reserve(n);
    for (std::size_t j = 0; j < n; ++j) rngs.emplace_back(cfg.seed ^ static_cast<std::uint64_t>(j));

    SwarmRun run;
    std::vector<RobotState> robots(n);
    std::vector<EkfState> filters(n);
    for (std::size_t j = 0; j < n; ++j) {
        Vec2 p = Vec2::Zero();
        bool placed = false;
        for (int tries = 0; tries < 1000 && !placed; ++tries) {
            p = detail::draw_start(domain.bounds, edge, cfg.start_strip, rngs[j]);
            if (!is_free(domain, p)) continue;
            placed = true;
            for (std::size_t k = 0; k < j && placed; ++k) {
                if ((robots[k].X - p).norm() < cfg.sensing_radius) placed = false;
            }
        }
        if (!is_free(domain, p)) throw config_error("no free start position near the deployment edge");
        robots[j].X = p;
        robots[j].id = j;
        resample_heading(robots[j], cfg.speed, rngs[j]);
        filters[j].mean << robots[j].X, robots[j].V;
        filters[j].P = cfg.initial_variance * Mat4::Identity();
        run.start_positions.push_back(p);
    }
    if (opts.keep_streams) run.streams.resize(n);

    const std::size_t steps = cfg.steps();
    const std::size_t every = cfg.steps_per_record();
    ProximityIndex index(domain.bounds, cfg.sensing_radius);
    std::vector<Vec2> snapshot(n);
    run.tuples.reserve(n * (steps / every));
    run.trajectory.reserve(n * (steps / every));

    for (std::size_t k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        for (std::size_t j = 0; j < n; ++j) snapshot[j] = robots[j].X;
        index.rebuild(snapshot);
        for (std::size_t j = 0; j < n; ++j) {
            const RobotState moved = detail::step_with_factor(robots[j], cfg, domain, rngs[j], factor, &index);
            if (moved.X == robots[j].X) ++run.held_steps;
            robots[j] = moved;
            const Measurement m = measure(robots[j], cfg, txs, rngs[j], t);

            EkfState prior = predict(filters[j], A, Q, cfg.dt);
            UpdateResult res = update(prior, m.z, R, model);
            if (!res.ok()) ++run.singular_updates;
            filters[j] = res.state;
            filters[j].time = t;

            if (opts.keep_streams) run.streams[j].push_back({robots[j], m});
            if (k % every == 0) {
                const double t_rec = static_cast<double>(k / every) * cfg.record_interval;
                run.tuples.push_back(record(filters[j], j, t_rec));
                run.trajectory.push_back({t_rec, j, robots[j].X, filters[j].position()});
            }
        }
    }
    return run;
}

}  // namespace swarmap
