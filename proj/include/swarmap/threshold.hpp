#pragma once

#include "swarmap/complex.hpp"
#include "swarmap/persistence.hpp"
#include "swarmap/union_find.hpp"

#include <algorithm>
#include <vector>

namespace swarmap {

// Largest filtration value: cells with p_free = 0.
inline constexpr double kTerminalValue = 1.0;

struct ThresholdChoice {
    double delta_cls = 0.0;
    double gamma_est = 1.0;
};

// delta_cls is the last value at which a transient feature dies. Intervals
// dying at the terminal value are closed only by p_free = 0 cells, which
// every obstacle contains, so they count as persistent here. Without any
// transient interval the largest birth is used.
inline ThresholdChoice select_threshold(const Barcode& b) {
    if (b.intervals.empty()) throw degenerate_input_error("cannot select a threshold from an empty barcode");
    bool any_transient = false;
    double last_death = 0.0;
    double last_birth = 0.0;
    for (const Interval& i : b.intervals) {
        last_birth = std::max(last_birth, i.birth);
        if (i.finite() && i.death < kTerminalValue) {
            last_death = any_transient ? std::max(last_death, i.death) : i.death;
            any_transient = true;
        }
    }
    ThresholdChoice t;
    t.delta_cls = any_transient ? last_death : last_birth;
    t.gamma_est = 1.0 - t.delta_cls;
    return t;
}

struct BinaryMap {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<bool> free;

    std::size_t size() const { return rows * cols; }
};

inline BinaryMap threshold_map(const DensityGrid& g, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw degenerate_input_error("gamma must lie in [0, 1]");
    BinaryMap m{g.rows, g.cols, std::vector<bool>(g.size())};
    for (std::size_t i = 0; i < g.size(); ++i) m.free[i] = g.p_free[i] > gamma;
    return m;
}

// Cells whose filtration value 1 - p_free is at most delta, i.e. exactly the
// vertices of the delta-sublevel complex.
inline BinaryMap sublevel_map(const DensityGrid& g, double delta) {
    BinaryMap m{g.rows, g.cols, std::vector<bool>(g.size())};
    for (std::size_t i = 0; i < g.size(); ++i) m.free[i] = 1.0 - g.p_free[i] <= delta;
    return m;
}

// The strict threshold that reproduces sublevel_map(g, delta): the largest
// p_free among cells left out, or 0 if every cell is in.
inline double effective_gamma(const DensityGrid& g, double delta) {
    double gamma = 0.0;
    for (double p : g.p_free) {
        if (1.0 - p > delta) gamma = std::max(gamma, p);
    }
    return gamma;
}

struct Betti {
    std::size_t b0 = 0;
    std::size_t b1 = 0;
    bool operator==(const Betti&) const = default;
};

// Union-find for b0, Euler characteristic for b1. With tetrahedra filled in,
// the sublevel complex has no homology above degree 1.
inline Betti betti_at(const FilteredComplex& c, double delta) {
    const std::size_t nv = c.vertex_values.size();
    DisjointSets ds(nv);
    long long v = 0, e = 0, f = 0, t = 0;
    std::size_t components = 0;
    for (double x : c.vertex_values) v += x <= delta ? 1 : 0;
    components = static_cast<std::size_t>(v);
    for (const auto& edge : c.edges) {
        if (edge.value > delta) continue;
        ++e;
        if (ds.unite(edge.u, edge.v)) --components;
    }
    for (const auto& tri : c.triangles) f += tri.value <= delta ? 1 : 0;
    for (const auto& tet : c.tetrahedra) t += tet.value <= delta ? 1 : 0;
    const long long b1 = static_cast<long long>(components) - v + e - f + t;
    return {components, static_cast<std::size_t>(b1)};
}

// Number of intervals of each dimension alive at delta: birth <= delta < death.
inline Betti betti_from_barcode(const Barcode& b, double delta) {
    Betti out;
    for (const Interval& i : b.intervals) {
        if (i.birth <= delta && delta < i.death) (i.dim == 0 ? out.b0 : out.b1) += 1;
    }
    return out;
}

// Betti numbers of the free cells under 8-connectivity.
inline Betti betti_of_map(const BinaryMap& m) {
    std::vector<double> f(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) f[i] = m.free[i] ? 0.0 : 1.0;
    return betti_at(build_complex(m.rows, m.cols, f), 0.5);
}

}  // namespace swarmap
