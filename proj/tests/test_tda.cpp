#include <catch_amalgamated.hpp>

#include "support/oracles.hpp"
#include "swarmap/threshold.hpp"

#include <random>

using namespace swarmap;
using Catch::Approx;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::vector<double> deltas() {
    std::vector<double> d;
    for (int k = 1; k <= 19; ++k) d.push_back(k * 0.05);
    return d;
}

DensityGrid density(std::size_t rows, std::size_t cols, std::vector<double> p) {
    DensityGrid g;
    g.rows = rows;
    g.cols = cols;
    g.p_free = std::move(p);
    g.count.assign(rows * cols, 1);
    g.sum_log.assign(rows * cols, 0.0);
    return g;
}

// Filtration values from a picture: '.' is free (0), '#' is occupied (1).
std::vector<double> picture(const std::vector<std::string>& rows) {
    std::vector<double> f;
    for (const auto& r : rows)
        for (char ch : r) f.push_back(ch == '#' ? 1.0 : 0.0);
    return f;
}

}  // namespace

TEST_CASE("complex counts") {
    const std::vector<double> zeros(4, 0.0);
    const FilteredComplex c = build_complex(2, 2, zeros);
    CHECK(c.vertex_values.size() == 4);
    CHECK(c.edges.size() == 6);
    CHECK(c.triangles.size() == 4);
    CHECK(c.tetrahedra.size() == 1);

    const std::vector<double> one{0.3};
    const FilteredComplex single = build_complex(1, 1, one);
    CHECK(single.vertex_values.size() == 1);
    CHECK(single.edges.empty());
    CHECK(single.triangles.empty());

    CHECK_THROWS_AS(build_complex(0, 3, std::span<const double>{}), degenerate_input_error);
    CHECK_THROWS_AS(build_complex(2, 2, one), dimension_error);
}

TEST_CASE("complex matches clique enumeration") {
    oracle::Rng rng(1);
    for (std::size_t rows = 1; rows <= 5; ++rows) {
        for (std::size_t cols = 1; cols <= 5; ++cols) {
            const auto cl = oracle::enumerate_cliques(rows, cols);
            const FilteredComplex c = build_complex(rows, cols, oracle::continuous_grid(rng, rows, cols));
            REQUIRE(c.edges.size() == cl.by_dim[1].size());
            REQUIRE(c.triangles.size() == cl.by_dim[2].size());
            REQUIRE(c.tetrahedra.size() == cl.by_dim[3].size());
        }
    }
}

TEST_CASE("faces never enter after their cofaces") {
    oracle::Rng rng(2);
    std::uniform_int_distribution<std::size_t> side(1, 12);
    for (int k = 0; k < 1000; ++k) {
        const std::size_t r = side(rng), cc = side(rng);
        const auto f = k % 2 ? oracle::lattice_grid(rng, r, cc) : oracle::continuous_grid(rng, r, cc);
        const FilteredComplex c = build_complex(r, cc, f);
        for (const auto& e : c.edges) {
            REQUIRE(oracle::adjacent(e.u, e.v, cc));
            REQUIRE(e.value == std::max(f[e.u], f[e.v]));
        }
        for (const auto& t : c.triangles) {
            for (auto ei : t.edges) REQUIRE(c.edges[ei].value <= t.value);
            REQUIRE(t.value == std::max({f[t.vertices[0]], f[t.vertices[1]], f[t.vertices[2]]}));
        }
        for (const auto& t : c.tetrahedra) {
            double m = 0.0;
            for (auto v : t.vertices) m = std::max(m, f[v]);
            REQUIRE(t.value == m);
        }
    }
}

TEST_CASE("persistence examples") {
    const std::vector<double> flat(9, 0.2);
    const Barcode a = persistence(build_complex(3, 3, flat));
    REQUIRE(a.intervals.size() == 1);
    CHECK(a.intervals[0].dim == 0);
    CHECK(a.intervals[0].birth == Approx(0.2));
    CHECK_FALSE(a.intervals[0].finite());

    std::vector<double> ring(9, 0.2);
    ring[4] = 1.0;
    const Barcode b = persistence(build_complex(3, 3, ring));
    REQUIRE(b.intervals.size() == 2);
    CHECK(b.intervals[0] == Interval{0, 0.2, kInf});
    CHECK(b.intervals[1].dim == 1);
    CHECK(b.intervals[1].birth == Approx(0.2));
    CHECK(b.intervals[1].death == 1.0);
}

TEST_CASE("barcode counts match Euler and rank oracles on random grids") {
    oracle::Rng rng(3);
    std::uniform_int_distribution<std::size_t> side(1, 8);
    std::size_t mismatches = 0;
    for (int k = 0; k < 200; ++k) {
        const std::size_t r = side(rng), cc = side(rng);
        const auto f = k % 2 ? oracle::lattice_grid(rng, r, cc) : oracle::continuous_grid(rng, r, cc);
        const auto cl = oracle::enumerate_cliques(r, cc);
        const FilteredComplex c = build_complex(r, cc, f);
        const Barcode bc = persistence(c);
        for (double d : deltas()) {
            const auto ref = oracle::euler_betti(cl, f, r, cc, d);
            const Betti fast = betti_at(c, d);
            const Betti from_bars = betti_from_barcode(bc, d);
            const bool ok = static_cast<long>(from_bars.b0) == ref.b0 && static_cast<long>(from_bars.b1) == ref.b1 &&
                            fast == from_bars && oracle::rank_b1(cl, f, d) == ref.b1;
            mismatches += ok ? 0 : 1;
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("barcode is sorted and free of zero-length intervals") {
    oracle::Rng rng(4);
    for (int k = 0; k < 100; ++k) {
        const auto f = oracle::lattice_grid(rng, 10, 10);
        const Barcode b = persistence(build_complex(10, 10, f));
        for (std::size_t i = 0; i < b.intervals.size(); ++i) {
            REQUIRE(b.intervals[i].birth < b.intervals[i].death);
            if (i > 0) {
                const auto& p = b.intervals[i - 1];
                const auto& q = b.intervals[i];
                REQUIRE(std::tie(p.dim, p.birth, p.death) <= std::tie(q.dim, q.birth, q.death));
            }
        }
        REQUIRE(b.count(0) >= 1);
        std::size_t infinite = 0;
        for (const auto& i : b.intervals) infinite += i.dim == 0 && !i.finite() ? 1 : 0;
        REQUIRE(infinite == 1);
    }
}

TEST_CASE("select threshold") {
    Barcode b;
    b.intervals = {{1, 0.2, kInf}, {1, 0.2, 0.6}};
    auto t = select_threshold(b);
    CHECK(t.delta_cls == Approx(0.6));
    CHECK(t.gamma_est == Approx(0.4));

    b.intervals = {{0, 0.1, kInf}, {1, 0.25, kInf}};
    CHECK(select_threshold(b).delta_cls == Approx(0.25));

    // Holes closed only by terminal cells are treated as persistent.
    b.intervals = {{0, 0.0, kInf}, {1, 0.1, 1.0}, {1, 0.2, 0.45}};
    CHECK(select_threshold(b).delta_cls == Approx(0.45));

    CHECK_THROWS_AS(select_threshold(Barcode{}), degenerate_input_error);
}

TEST_CASE("threshold map") {
    const DensityGrid g = density(2, 3, {0.0, 0.2, 0.5, 0.999, 0.5, 0.0});
    for (bool v : threshold_map(g, 1.0).free) CHECK_FALSE(v);
    const BinaryMap zero = threshold_map(g, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(zero.free[i] == (g.p_free[i] > 0.0));
    CHECK(threshold_map(g, 0.5).free == std::vector<bool>{false, false, false, true, false, false});
    CHECK_THROWS_AS(threshold_map(g, -0.1), degenerate_input_error);
    CHECK_THROWS_AS(threshold_map(g, 1.5), degenerate_input_error);
}

TEST_CASE("threshold maps are nested") {
    oracle::Rng rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const DensityGrid g = density(6, 7, k % 2 ? oracle::lattice_grid(rng, 6, 7) : oracle::continuous_grid(rng, 6, 7));
        double g1 = u(rng), g2 = u(rng);
        if (g1 > g2) std::swap(g1, g2);
        const BinaryMap lo = threshold_map(g, g1), hi = threshold_map(g, g2);
        for (std::size_t i = 0; i < g.size(); ++i) REQUIRE((!hi.free[i] || lo.free[i]));
    }
}

TEST_CASE("effective gamma reproduces the sublevel map") {
    oracle::Rng rng(6);
    for (int k = 0; k < 500; ++k) {
        const DensityGrid g = density(5, 5, k % 2 ? oracle::lattice_grid(rng, 5, 5) : oracle::continuous_grid(rng, 5, 5));
        for (double d : deltas()) {
            REQUIRE(threshold_map(g, effective_gamma(g, d)).free == sublevel_map(g, d).free);
        }
    }
}

TEST_CASE("betti examples") {
    const std::vector<double> zeros(16, 0.0);
    CHECK(betti_at(build_complex(4, 4, zeros), 0.0) == Betti{1, 0});

    const auto blobs = picture({
        "..##..",
        "..##..",
        "..##..",
    });
    CHECK(betti_at(build_complex(3, 6, blobs), 0.5) == Betti{2, 0});

    const auto annulus = picture({
        ".....",
        ".###.",
        ".###.",
        ".....",
    });
    CHECK(betti_at(build_complex(4, 5, annulus), 0.5) == Betti{1, 1});

    // Diagonal contact joins components under 8-connectivity.
    const auto diagonal = picture({
        ".#",
        "#.",
    });
    CHECK(betti_at(build_complex(2, 2, diagonal), 0.5) == Betti{1, 0});
}

TEST_CASE("betti of a binary map") {
    BinaryMap m{3, 3, std::vector<bool>(9, true)};
    m.free[4] = false;
    CHECK(betti_of_map(m) == Betti{1, 1});
    m.free.assign(9, false);
    CHECK(betti_of_map(m) == Betti{0, 0});
}

TEST_CASE("sublevel complexes are nested") {
    oracle::Rng rng(7);
    for (int k = 0; k < 100; ++k) {
        const auto f = oracle::continuous_grid(rng, 7, 7);
        const FilteredComplex c = build_complex(7, 7, f);
        const auto d = deltas();
        for (std::size_t i = 1; i < d.size(); ++i) {
            for (const auto& t : c.triangles) {
                if (t.value <= d[i - 1]) {
                    for (auto e : t.edges) REQUIRE(c.edges[e].value <= d[i]);
                }
            }
        }
    }
}
