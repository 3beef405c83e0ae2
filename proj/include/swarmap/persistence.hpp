#pragma once

// Degree-0 and degree-1 persistent homology (Z/2) of a FilteredComplex.
//
// Simplices enter in (value, dimension, index) order. H0 uses union-find with
// the elder rule; H1 reduces triangle boundary columns over edges.

#include "swarmap/complex.hpp"
#include "swarmap/union_find.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace swarmap {

struct Interval {
    int dim = 0;
    double birth = 0.0;
    double death = std::numeric_limits<double>::infinity();

    bool finite() const { return death != std::numeric_limits<double>::infinity(); }
    bool operator==(const Interval&) const = default;
};

struct Barcode {
    std::vector<Interval> intervals;

    std::size_t count(int dim) const {
        return static_cast<std::size_t>(
            std::count_if(intervals.begin(), intervals.end(), [dim](const Interval& i) { return i.dim == dim; }));
    }
};

inline void sort_barcode(Barcode& b) {
    std::sort(b.intervals.begin(), b.intervals.end(), [](const Interval& x, const Interval& y) {
        if (x.dim != y.dim) return x.dim < y.dim;
        if (x.birth != y.birth) return x.birth < y.birth;
        return x.death < y.death;
    });
}

namespace detail {

template <class Values>
std::vector<std::uint32_t> filtration_order(std::size_t n, const Values& value) {
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double va = value(a), vb = value(b);
        return va != vb ? va < vb : a < b;
    });
    return order;
}

// Symmetric difference of two columns sorted in decreasing order.
inline void add_column(std::vector<std::uint32_t>& into, const std::vector<std::uint32_t>& other,
                       std::vector<std::uint32_t>& scratch) {
    scratch.clear();
    auto a = into.cbegin();
    auto b = other.cbegin();
    while (a != into.cend() && b != other.cend()) {
        if (*a > *b) scratch.push_back(*a++);
        else if (*b > *a) scratch.push_back(*b++);
        else { ++a; ++b; }
    }
    scratch.insert(scratch.end(), a, into.cend());
    scratch.insert(scratch.end(), b, other.cend());
    into.swap(scratch);
}

}  // namespace detail

// Intervals of zero length are dropped. The result is sorted by (dim, birth, death).
inline Barcode persistence(const FilteredComplex& c) {
    const std::size_t nv = c.vertex_values.size();
    const std::size_t ne = c.edges.size();
    const std::size_t nt = c.triangles.size();
    const auto& vval = c.vertex_values;

    const auto vorder = detail::filtration_order(nv, [&](std::uint32_t i) { return vval[i]; });
    std::vector<std::uint32_t> vrank(nv);
    for (std::uint32_t k = 0; k < nv; ++k) vrank[vorder[k]] = k;

    const auto eorder = detail::filtration_order(ne, [&](std::uint32_t i) { return c.edges[i].value; });
    std::vector<std::uint32_t> erank(ne);
    for (std::uint32_t k = 0; k < ne; ++k) erank[eorder[k]] = k;

    Barcode out;

    // H0. oldest[root] is the earliest-born vertex of the root's component.
    DisjointSets ds(nv);
    std::vector<std::uint32_t> oldest(nv);
    std::iota(oldest.begin(), oldest.end(), 0u);
    std::vector<bool> positive_edge(ne, false);
    for (std::uint32_t e : eorder) {
        const auto& edge = c.edges[e];
        const std::size_t ru = ds.find(edge.u), rv = ds.find(edge.v);
        if (ru == rv) {
            positive_edge[e] = true;
            continue;
        }
        const std::uint32_t ou = oldest[ru], ov = oldest[rv];
        const std::uint32_t elder = vrank[ou] < vrank[ov] ? ou : ov;
        const std::uint32_t younger = elder == ou ? ov : ou;
        if (edge.value > vval[younger]) out.intervals.push_back({0, vval[younger], edge.value});
        ds.unite(ru, rv);
        oldest[ds.find(ru)] = elder;
    }
    for (std::size_t v = 0; v < nv; ++v) {
        if (ds.find(v) == v) out.intervals.push_back({0, vval[oldest[v]], std::numeric_limits<double>::infinity()});
    }

    // H1. Columns hold edge ranks in decreasing order; the pivot is the front.
    const auto torder = detail::filtration_order(nt, [&](std::uint32_t i) { return c.triangles[i].value; });
    constexpr std::uint32_t none = UINT32_MAX;
    std::vector<std::uint32_t> owner(ne, none);  // edge rank -> reduced column slot
    std::vector<std::vector<std::uint32_t>> reduced;
    std::vector<std::uint32_t> col, scratch;
    std::vector<bool> paired(ne, false);
    for (std::uint32_t t : torder) {
        const auto& tri = c.triangles[t];
        col = {erank[tri.edges[0]], erank[tri.edges[1]], erank[tri.edges[2]]};
        std::sort(col.begin(), col.end(), std::greater<>());
        while (!col.empty() && owner[col.front()] != none) detail::add_column(col, reduced[owner[col.front()]], scratch);
        if (col.empty()) continue;
        const std::uint32_t low = col.front();
        owner[low] = static_cast<std::uint32_t>(reduced.size());
        reduced.push_back(col);
        const std::uint32_t e = eorder[low];
        paired[e] = true;
        if (tri.value > c.edges[e].value) out.intervals.push_back({1, c.edges[e].value, tri.value});
    }
    for (std::uint32_t e = 0; e < ne; ++e) {
        if (positive_edge[e] && !paired[e]) {
            out.intervals.push_back({1, c.edges[e].value, std::numeric_limits<double>::infinity()});
        }
    }

    sort_barcode(out);
    return out;
}

}  // namespace swarmap
