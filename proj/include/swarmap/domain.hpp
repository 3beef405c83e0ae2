#pragma once

// World geometry, grid discretization and ground-truth occupancy.

#include "swarmap/geometry.hpp"
#include "swarmap/types.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace swarmap {

struct Transmitter {
    Vec2 position = Vec2::Zero();
    double gain = 1.0;    // K_i
    double power = 1.0;   // Pow_i
    double alpha = 2.0;   // attenuation exponent, in [0.1, 2]
};

struct DomainSpec {
    Rect bounds;
    std::vector<Polygon> obstacles;
    std::vector<Transmitter> transmitters;
};

// Square cells of side 2 * half_width tiling [origin, origin + (cols, rows) * 2s].
struct GridSpec {
    std::size_t rows = 0;
    std::size_t cols = 0;
    double half_width = 0.0;
    Vec2 origin = Vec2::Zero();

    std::size_t size() const { return rows * cols; }
    double cell_width() const { return 2.0 * half_width; }
    CellIndex index(std::size_t row, std::size_t col) const { return row * cols + col; }
    std::size_t row_of(CellIndex i) const { return i / cols; }
    std::size_t col_of(CellIndex i) const { return i % cols; }

    // Coordinate of the k-th vertical / horizontal grid line.
    double x_edge(std::size_t k) const { return origin.x() + static_cast<double>(k) * cell_width(); }
    double y_edge(std::size_t k) const { return origin.y() + static_cast<double>(k) * cell_width(); }

    Rect extent() const { return {x_edge(0), y_edge(0), x_edge(cols), y_edge(rows)}; }
};

// Builds the rows x cols grid that tiles `bounds`. Cells must be square.
inline GridSpec make_grid(const Rect& bounds, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw config_error("grid must have at least one row and column");
    const double wx = bounds.width() / static_cast<double>(cols);
    const double wy = bounds.height() / static_cast<double>(rows);
    if (std::abs(wx - wy) > 1e-9 * std::max(wx, wy)) {
        throw config_error("grid cells are not square: " + std::to_string(wx) + " x " + std::to_string(wy));
    }
    return GridSpec{rows, cols, 0.5 * wx, Vec2(bounds.xmin, bounds.ymin)};
}

struct GroundTruthMap {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<bool> occupied;  // row-major

    std::size_t occupied_count() const {
        std::size_t n = 0;
        for (bool b : occupied) n += b ? 1 : 0;
        return n;
    }
};

inline bool is_free(const DomainSpec& domain, const Vec2& p) {
    if (!domain.bounds.contains(p)) throw out_of_domain_error("point outside domain bounds");
    for (const Polygon& obs : domain.obstacles) {
        if (point_in_polygon(obs, p)) return false;
    }
    return true;
}

namespace detail {

// floor((v - v0) / w) corrected so that it agrees with edge(k) = v0 + k * w;
// values on a shared grid line go to the larger index.
template <typename EdgeFn>
std::size_t locate(double v, double v0, double w, std::size_t n, EdgeFn edge) {
    double u = std::floor((v - v0) / w);
    std::size_t k = u <= 0.0 ? 0 : static_cast<std::size_t>(u);
    if (k >= n) k = n - 1;
    while (k + 1 < n && v >= edge(k + 1)) ++k;
    while (k > 0 && v < edge(k)) --k;
    return k;
}

}  // namespace detail

inline CellIndex cell_of(const GridSpec& grid, const Vec2& p) {
    if (!grid.extent().contains(p)) throw out_of_domain_error("point outside grid extent");
    const double w = grid.cell_width();
    const std::size_t col =
        detail::locate(p.x(), grid.origin.x(), w, grid.cols, [&](std::size_t k) { return grid.x_edge(k); });
    const std::size_t row =
        detail::locate(p.y(), grid.origin.y(), w, grid.rows, [&](std::size_t k) { return grid.y_edge(k); });
    return grid.index(row, col);
}

inline Vec2 cell_center(const GridSpec& grid, CellIndex i) {
    const double w = grid.cell_width();
    return {grid.origin.x() + (static_cast<double>(grid.col_of(i)) + 0.5) * w,
            grid.origin.y() + (static_cast<double>(grid.row_of(i)) + 0.5) * w};
}

inline Rect cell_rect(const GridSpec& grid, CellIndex i) {
    const std::size_t r = grid.row_of(i);
    const std::size_t c = grid.col_of(i);
    return {grid.x_edge(c), grid.y_edge(r), grid.x_edge(c + 1), grid.y_edge(r + 1)};
}

// Percentage of the bounds area covered by obstacles.
inline double pao(const DomainSpec& domain) {
    double covered = 0.0;
    for (const Polygon& obs : domain.obstacles) covered += area(obs);
    return 100.0 * covered / domain.bounds.area();
}

enum class GeometryRule {
    obstacle_outside_bounds,
    obstacle_overlap,
    obstacle_degenerate,
    transmitter_inside_bounds,
    transmitter_line_crosses_domain,
    transmitter_parameters,
    too_few_transmitters,
    narrow_gap,
};

enum class Severity { error, warning };

struct Violation {
    GeometryRule rule;
    Severity severity = Severity::error;
    std::string message;
};

inline const char* to_string(GeometryRule r) {
    switch (r) {
        case GeometryRule::obstacle_outside_bounds: return "obstacle_outside_bounds";
        case GeometryRule::obstacle_overlap: return "obstacle_overlap";
        case GeometryRule::obstacle_degenerate: return "obstacle_degenerate";
        case GeometryRule::transmitter_inside_bounds: return "transmitter_inside_bounds";
        case GeometryRule::transmitter_line_crosses_domain: return "transmitter_line_crosses_domain";
        case GeometryRule::transmitter_parameters: return "transmitter_parameters";
        case GeometryRule::too_few_transmitters: return "too_few_transmitters";
        case GeometryRule::narrow_gap: return "narrow_gap";
    }
    return "unknown";
}

inline bool has_errors(const std::vector<Violation>& violations) {
    for (const auto& v : violations) {
        if (v.severity == Severity::error) return true;
    }
    return false;
}

// Checks every DomainSpec invariant. Narrow obstacle gaps (below
// 2 * sensing_diameter) are reported with Severity::warning.
inline std::vector<Violation> validate_geometry(const DomainSpec& domain, double sensing_diameter = 0.12) {
    std::vector<Violation> out;
    const Rect& b = domain.bounds;
    if (!(b.width() > 0.0) || !(b.height() > 0.0)) {
        out.push_back({GeometryRule::obstacle_degenerate, Severity::error, "bounds have zero area"});
        return out;
    }

    for (std::size_t i = 0; i < domain.obstacles.size(); ++i) {
        const Polygon& obs = domain.obstacles[i];
        const std::string tag = "obstacle " + std::to_string(i);
        if (obs.size() < 3 || area(obs) <= 0.0) {
            out.push_back({GeometryRule::obstacle_degenerate, Severity::error, tag + " has no area"});
            continue;
        }
        for (const Vec2& v : obs) {
            if (!b.strictly_contains(v)) {
                out.push_back({GeometryRule::obstacle_outside_bounds, Severity::error,
                               tag + " has a vertex outside the bounds"});
                break;
            }
        }
        const double gap = boundary_gap(b, obs);
        if (gap < 2.0 * sensing_diameter) {
            out.push_back({GeometryRule::narrow_gap, Severity::warning,
                           tag + " is " + std::to_string(gap) + " m from the boundary"});
        }
        for (std::size_t j = i + 1; j < domain.obstacles.size(); ++j) {
            const Polygon& other = domain.obstacles[j];
            if (other.size() < 3) continue;
            if (polygons_overlap(obs, other)) {
                out.push_back({GeometryRule::obstacle_overlap, Severity::error,
                               tag + " overlaps obstacle " + std::to_string(j)});
            } else if (polygon_distance(obs, other) < 2.0 * sensing_diameter) {
                out.push_back({GeometryRule::narrow_gap, Severity::warning,
                               tag + " is close to obstacle " + std::to_string(j)});
            }
        }
    }

    if (domain.transmitters.size() < 2) {
        out.push_back({GeometryRule::too_few_transmitters, Severity::error,
                       "at least two transmitters are required for a 2-D domain"});
    }
    for (std::size_t i = 0; i < domain.transmitters.size(); ++i) {
        const Transmitter& tx = domain.transmitters[i];
        const std::string tag = "transmitter " + std::to_string(i);
        if (b.contains(tx.position)) {
            out.push_back({GeometryRule::transmitter_inside_bounds, Severity::error, tag + " is not outside the bounds"});
        }
        if (!(tx.gain > 0.0) || !(tx.power > 0.0) || !(tx.alpha >= 0.1 && tx.alpha <= 2.0)) {
            out.push_back({GeometryRule::transmitter_parameters, Severity::error,
                           tag + " needs gain > 0, power > 0, alpha in [0.1, 2]"});
        }
    }
    for (std::size_t i = 0; i < domain.transmitters.size(); ++i) {
        for (std::size_t j = i + 1; j < domain.transmitters.size(); ++j) {
            if (segment_intersects_rect(b, domain.transmitters[i].position, domain.transmitters[j].position)) {
                out.push_back({GeometryRule::transmitter_line_crosses_domain, Severity::error,
                               "segment between transmitters " + std::to_string(i) + " and " + std::to_string(j) +
                                   " crosses the domain"});
            }
        }
    }
    return out;
}

// Cell-center occupancy test.
inline GroundTruthMap ground_truth(const DomainSpec& domain, const GridSpec& grid) {
    GroundTruthMap truth{grid.rows, grid.cols, std::vector<bool>(grid.size(), false)};
    for (CellIndex i = 0; i < grid.size(); ++i) {
        const Vec2 c = cell_center(grid, i);
        for (const Polygon& obs : domain.obstacles) {
            if (point_in_polygon(obs, c)) {
                truth.occupied[i] = true;
                break;
            }
        }
    }
    return truth;
}

}  // namespace swarmap
