#pragma once

// Sublevel filtration of the flag complex of the 8-connected grid graph.
//
// Vertices are cell centres with value f = 1 - p_free. Every clique of the
// king's-move graph lies in a 2x2 block, so the simplices are: edges between
// cells at Chebyshev distance 1, four triangles per 2x2 block, and one
// tetrahedron per 2x2 block. A simplex takes the maximum of its vertex values.

#include "swarmap/occupancy.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

namespace swarmap {

struct FilteredComplex {
    struct Edge {
        std::uint32_t u, v;
        double value;
    };
    struct Triangle {
        std::array<std::uint32_t, 3> vertices;
        std::array<std::uint32_t, 3> edges;
        double value;
    };
    struct Tetrahedron {
        std::array<std::uint32_t, 4> vertices;
        double value;
    };

    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> vertex_values;  // row-major
    std::vector<Edge> edges;
    std::vector<Triangle> triangles;
    std::vector<Tetrahedron> tetrahedra;
};

// Neighbour directions with a larger row-major index: right, up-left, up, up-right.
inline constexpr std::array<std::array<int, 2>, 4> kForwardNeighbours{{{0, 1}, {1, -1}, {1, 0}, {1, 1}}};

inline FilteredComplex build_complex(std::size_t rows, std::size_t cols, std::span<const double> values) {
    if (rows == 0 || cols == 0) throw degenerate_input_error("complex needs a non-empty grid");
    if (values.size() != rows * cols) throw dimension_error("value count does not match grid size");

    FilteredComplex c;
    c.rows = rows;
    c.cols = cols;
    c.vertex_values.assign(values.begin(), values.end());

    constexpr std::uint32_t none = UINT32_MAX;
    std::vector<std::uint32_t> slot(4 * rows * cols, none);
    const auto vid = [cols](std::size_t r, std::size_t col) { return static_cast<std::uint32_t>(r * cols + col); };

    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t col = 0; col < cols; ++col) {
            const std::uint32_t u = vid(r, col);
            for (std::size_t d = 0; d < 4; ++d) {
                const long rr = static_cast<long>(r) + kForwardNeighbours[d][0];
                const long cc = static_cast<long>(col) + kForwardNeighbours[d][1];
                if (rr < 0 || cc < 0 || rr >= static_cast<long>(rows) || cc >= static_cast<long>(cols)) continue;
                const std::uint32_t v = vid(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
                slot[4 * u + d] = static_cast<std::uint32_t>(c.edges.size());
                c.edges.push_back({u, v, std::max(values[u], values[v])});
            }
        }
    }

    // Block corners: a=(r,c) b=(r,c+1) p=(r+1,c) q=(r+1,c+1).
    for (std::size_t r = 0; r + 1 < rows; ++r) {
        for (std::size_t col = 0; col + 1 < cols; ++col) {
            const std::uint32_t a = vid(r, col), b = vid(r, col + 1), p = vid(r + 1, col), q = vid(r + 1, col + 1);
            const std::uint32_t ab = slot[4 * a + 0], ap = slot[4 * a + 2], aq = slot[4 * a + 3];
            const std::uint32_t bp = slot[4 * b + 1], bq = slot[4 * b + 2], pq = slot[4 * p + 0];
            const auto val = [&](std::initializer_list<std::uint32_t> vs) {
                double m = -std::numeric_limits<double>::infinity();
                for (std::uint32_t v : vs) m = std::max(m, values[v]);
                return m;
            };
            c.triangles.push_back({{a, b, p}, {ab, ap, bp}, val({a, b, p})});
            c.triangles.push_back({{a, b, q}, {ab, aq, bq}, val({a, b, q})});
            c.triangles.push_back({{a, p, q}, {ap, aq, pq}, val({a, p, q})});
            c.triangles.push_back({{b, p, q}, {bp, bq, pq}, val({b, p, q})});
            c.tetrahedra.push_back({{a, b, p, q}, val({a, b, p, q})});
        }
    }
    return c;
}

// f = 1 - p_free per cell.
inline FilteredComplex build_complex(const DensityGrid& g) {
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = 1.0 - g.p_free[i];
    return build_complex(g.rows, g.cols, f);
}

}  // namespace swarmap
