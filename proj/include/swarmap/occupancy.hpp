#pragma once

// Fusion of recorded position estimates into a per-cell free-space
// probability, with smoothing, coverage test and the analytic lower bound on
// the free probability of covered cells.

#include "swarmap/domain.hpp"
#include "swarmap/ekf.hpp"
#include "swarmap/gaussian_mass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <thread>
#include <vector>

namespace swarmap {

inline constexpr double kDefaultRho = 0.05;
inline constexpr double kBoxSigmas = 5.0;

struct DensityGrid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> p_free;          // p_i^f
    std::vector<std::size_t> count;      // |P_i|
    std::vector<double> sum_log;         // sum of log(1 / (1 - p_ijk)) over P_i
    std::size_t saturated = 0;           // terms clamped at log(1 / eps)

    std::size_t size() const { return rows * cols; }
};

// log(1 / (1 - p)) from the complement, clamped at log(1 / eps).
inline double log_odds_term(double complement, bool* saturated = nullptr) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (complement < eps) {
        if (saturated != nullptr) *saturated = true;
        return -std::log(eps);
    }
    return -std::log(complement);
}

// s_i: the mean of log(1 / (1 - p)) over P_i, zero for an empty set.
inline double score(std::span<const double> p_values) {
    if (p_values.empty()) return 0.0;
    double acc = 0.0;
    for (double p : p_values) acc += log_odds_term(1.0 - p);
    return acc / static_cast<double>(p_values.size());
}

inline double score(const DensityGrid& g, CellIndex i) {
    return g.count[i] == 0 ? 0.0 : g.sum_log[i] / static_cast<double>(g.count[i]);
}

inline double free_probability(double s) {
    if (!(s >= 0.0)) throw degenerate_input_error("score must be non-negative");
    return -std::expm1(-s);
}

namespace detail {

struct SparseCell {
    CellIndex cell;
    std::size_t count;
    double sum_log;
    std::size_t saturated;
};

// Contribution of one robot's tuples (already in time order).
inline std::vector<SparseCell> accumulate_robot(std::span<const DataTuple> tuples, const GridSpec& grid, double rho) {
    std::vector<std::size_t> cnt(grid.size(), 0);
    std::vector<double> sum(grid.size(), 0.0);
    std::vector<std::size_t> sat(grid.size(), 0);
    std::vector<CellIndex> touched;
    const double w = grid.cell_width();
    const Rect ext = grid.extent();

    const auto index_range = [&](double lo, double hi, double origin, std::size_t n) {
        const double a = std::floor((lo - origin) / w);
        const double b = std::floor((hi - origin) / w);
        const auto clampi = [n](double v) {
            if (v < 0.0) return std::size_t{0};
            return std::min(n - 1, static_cast<std::size_t>(v));
        };
        return std::pair{clampi(a), clampi(b)};
    };

    for (const DataTuple& d : tuples) {
        const double sx = std::sqrt(std::max(d.sigma(0, 0), 0.0));
        const double sy = std::sqrt(std::max(d.sigma(1, 1), 0.0));
        const double x0 = d.mu.x() - kBoxSigmas * sx, x1 = d.mu.x() + kBoxSigmas * sx;
        const double y0 = d.mu.y() - kBoxSigmas * sy, y1 = d.mu.y() + kBoxSigmas * sy;
        if (x1 < ext.xmin || x0 > ext.xmax || y1 < ext.ymin || y0 > ext.ymax) continue;
        const auto [c0, c1] = index_range(x0, x1, grid.origin.x(), grid.cols);
        const auto [r0, r1] = index_range(y0, y1, grid.origin.y(), grid.rows);
        for (std::size_t r = r0; r <= r1; ++r) {
            for (std::size_t c = c0; c <= c1; ++c) {
                const CellIndex i = grid.index(r, c);
                const Rect rect = cell_rect(grid, i);
                if (cell_mass_upper_bound(d.mu, d.sigma, rect) <= rho) continue;
                const CellMass m = cell_mass(d.mu, d.sigma, rect);
                if (!(m.mass > rho)) continue;
                bool saturated = false;
                const double term = log_odds_term(m.complement, &saturated);
                if (cnt[i] == 0) touched.push_back(i);
                ++cnt[i];
                sum[i] += term;
                sat[i] += saturated ? 1 : 0;
            }
        }
    }
    std::sort(touched.begin(), touched.end());
    std::vector<SparseCell> out;
    out.reserve(touched.size());
    for (CellIndex i : touched) out.push_back({i, cnt[i], sum[i], sat[i]});
    return out;
}

inline void finalize_probabilities(DensityGrid& g) {
    g.p_free.assign(g.size(), 0.0);
    for (CellIndex i = 0; i < g.size(); ++i) {
        if (g.count[i] > 0) g.p_free[i] = free_probability(score(g, i));
    }
}

}  // namespace detail

// Builds counts and log sums from every tuple whose cell mass exceeds rho,
// restricted to the cells inside each tuple's 5-sigma box. Tuples are grouped
// per robot (time-ordered) and per-robot partial sums are merged in robot-id
// order, so the result is bitwise independent of input order and `jobs`.
inline DensityGrid accumulate(std::span<const DataTuple> tuples, const GridSpec& grid, double rho = kDefaultRho,
                              unsigned jobs = 1) {
    if (!(rho > 0.0 && rho < 1.0)) throw config_error("rho must lie in (0, 1)");
    std::vector<DataTuple> sorted(tuples.begin(), tuples.end());
    std::sort(sorted.begin(), sorted.end(), [](const DataTuple& a, const DataTuple& b) {
        if (a.robot != b.robot) return a.robot < b.robot;
        if (a.t != b.t) return a.t < b.t;
        if (a.mu.x() != b.mu.x()) return a.mu.x() < b.mu.x();
        return a.mu.y() < b.mu.y();
    });

    std::vector<std::span<const DataTuple>> groups;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j].robot == sorted[i].robot) ++j;
        groups.emplace_back(sorted.data() + i, j - i);
        i = j;
    }

    std::vector<std::vector<detail::SparseCell>> partials(groups.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(groups.size())));
    if (workers <= 1) {
        for (std::size_t k = 0; k < groups.size(); ++k) partials[k] = detail::accumulate_robot(groups[k], grid, rho);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t k = w; k < groups.size(); k += workers) {
                    partials[k] = detail::accumulate_robot(groups[k], grid, rho);
                }
            });
        }
    }

    DensityGrid g;
    g.rows = grid.rows;
    g.cols = grid.cols;
    g.count.assign(grid.size(), 0);
    g.sum_log.assign(grid.size(), 0.0);
    for (const auto& part : partials) {
        for (const auto& cell : part) {
            g.count[cell.cell] += cell.count;
            g.sum_log[cell.cell] += cell.sum_log;
            g.saturated += cell.saturated;
        }
    }
    detail::finalize_probabilities(g);
    return g;
}

// 3x3 moving average of p_free; border cells average over the neighbours that
// exist. Counts and log sums are carried over unchanged.
inline DensityGrid smooth(const DensityGrid& g) {
    DensityGrid out = g;
    for (std::size_t r = 0; r < g.rows; ++r) {
        for (std::size_t c = 0; c < g.cols; ++c) {
            double acc = 0.0;
            int n = 0;
            for (std::size_t rr = (r > 0 ? r - 1 : 0); rr <= std::min(g.rows - 1, r + 1); ++rr) {
                for (std::size_t cc = (c > 0 ? c - 1 : 0); cc <= std::min(g.cols - 1, c + 1); ++cc) {
                    acc += g.p_free[rr * g.cols + cc];
                    ++n;
                }
            }
            out.p_free[r * g.cols + c] = acc / n;
        }
    }
    return out;
}

struct CoverageResult {
    bool covered = true;
    std::vector<CellIndex> missing;  // truth-free cells without any tuple mean
};

inline CoverageResult coverage_check(std::span<const DataTuple> tuples, const GridSpec& grid,
                                     const GroundTruthMap& truth) {
    if (truth.rows != grid.rows || truth.cols != grid.cols) throw dimension_error("truth map does not match grid");
    std::vector<bool> hit(grid.size(), false);
    const Rect ext = grid.extent();
    for (const DataTuple& d : tuples) {
        if (ext.contains(d.mu)) hit[cell_of(grid, d.mu)] = true;
    }
    CoverageResult res;
    for (CellIndex i = 0; i < grid.size(); ++i) {
        if (!truth.occupied[i] && !hit[i]) res.missing.push_back(i);
    }
    res.covered = res.missing.empty();
    return res;
}

// Largest principal standard deviation over all tuples (m).
inline double sigma_max(std::span<const DataTuple> tuples) {
    double worst = 0.0;
    for (const DataTuple& d : tuples) {
        Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (d.sigma + d.sigma.transpose()), Eigen::EigenvaluesOnly);
        worst = std::max(worst, es.eigenvalues().cwiseAbs().maxCoeff());
    }
    return std::sqrt(worst);
}

struct BoundParams {
    double sigma_max = 0.0;   // m
    double half_width = 0.0;  // s, m
};

namespace detail {

// log of 1 - (1 - exp(-s^2 / (2 sigma^2)))^2, evaluated without cancellation.
inline double log_bound_base(const BoundParams& bp) {
    if (!(bp.sigma_max > 0.0) || !(bp.half_width > 0.0)) {
        throw degenerate_input_error("bound needs sigma_max > 0 and s > 0");
    }
    const double t = bp.half_width * bp.half_width / (2.0 * bp.sigma_max * bp.sigma_max);
    return -t + std::log(2.0 - std::exp(-t));
}

}  // namespace detail

// gamma = 1 - (1 - (1 - exp(-s^2 / (2 sigma_max^2)))^2)^(1 / |P_i|).
inline double theorem1_bound(const BoundParams& bp, std::size_t count) {
    if (count == 0) throw degenerate_input_error("bound is undefined for a cell with no data");
    return -std::expm1(detail::log_bound_base(bp) / static_cast<double>(count));
}

// p_f > bound, compared in complement space: exp(-s_i) < base^(1/|P_i|),
// i.e. s_i > -log(base) / |P_i|. Stays meaningful when both sides round to 1.
inline bool exceeds_theorem1_bound(const DensityGrid& g, CellIndex i, const BoundParams& bp) {
    if (g.count[i] == 0) throw degenerate_input_error("bound is undefined for a cell with no data");
    return score(g, i) > -detail::log_bound_base(bp) / static_cast<double>(g.count[i]);
}

}  // namespace swarmap
