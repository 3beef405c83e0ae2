#pragma once

// Test-side reference implementations, written without the library's helpers.

#include <Eigen/Dense>

#include <algorithm>
#include <bitset>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <queue>
#include <random>
#include <vector>

namespace oracle {

using Rng = std::mt19937_64;

// Grid of values on a coarse lattice {0, 0.1, ..., 1} so ties are common.
inline std::vector<double> lattice_grid(Rng& rng, std::size_t rows, std::size_t cols) {
    std::uniform_int_distribution<int> level(0, 10);
    std::vector<double> v(rows * cols);
    for (double& x : v) x = level(rng) / 10.0;
    return v;
}

inline std::vector<double> continuous_grid(Rng& rng, std::size_t rows, std::size_t cols) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(rows * cols);
    for (double& x : v) x = u(rng);
    return v;
}

inline bool adjacent(std::size_t a, std::size_t b, std::size_t cols) {
    const long ra = static_cast<long>(a / cols), ca = static_cast<long>(a % cols);
    const long rb = static_cast<long>(b / cols), cb = static_cast<long>(b % cols);
    return a != b && std::abs(ra - rb) <= 1 && std::abs(ca - cb) <= 1;
}

// Every clique of the king's-move graph, found by brute force over vertex
// subsets; each entry is (dimension, filtration value).
struct Cliques {
    std::vector<std::vector<std::size_t>> by_dim[4];
};

inline Cliques enumerate_cliques(std::size_t rows, std::size_t cols) {
    Cliques c;
    const std::size_t n = rows * cols;
    for (std::size_t a = 0; a < n; ++a) {
        c.by_dim[0].push_back({a});
        for (std::size_t b = a + 1; b < n; ++b) {
            if (!adjacent(a, b, cols)) continue;
            c.by_dim[1].push_back({a, b});
            for (std::size_t d = b + 1; d < n; ++d) {
                if (!adjacent(a, d, cols) || !adjacent(b, d, cols)) continue;
                c.by_dim[2].push_back({a, b, d});
                for (std::size_t e = d + 1; e < n; ++e) {
                    if (adjacent(a, e, cols) && adjacent(b, e, cols) && adjacent(d, e, cols)) {
                        c.by_dim[3].push_back({a, b, d, e});
                    }
                }
            }
        }
    }
    return c;
}

inline bool in_sublevel(const std::vector<std::size_t>& s, const std::vector<double>& f, double delta) {
    return std::all_of(s.begin(), s.end(), [&](std::size_t v) { return f[v] <= delta; });
}

// Components of the sublevel vertex set by breadth-first search.
inline std::size_t bfs_components(const std::vector<double>& f, std::size_t rows, std::size_t cols, double delta) {
    const std::size_t n = rows * cols;
    std::vector<bool> seen(n, false);
    std::size_t comps = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (seen[s] || f[s] > delta) continue;
        ++comps;
        std::queue<std::size_t> q;
        q.push(s);
        seen[s] = true;
        while (!q.empty()) {
            const std::size_t v = q.front();
            q.pop();
            for (std::size_t w = 0; w < n; ++w) {
                if (!seen[w] && f[w] <= delta && adjacent(v, w, cols)) {
                    seen[w] = true;
                    q.push(w);
                }
            }
        }
    }
    return comps;
}

struct Betti {
    long b0 = 0;
    long b1 = 0;
};

// b0 by BFS, b1 from V - E + F - T = b0 - b1 (no b2 once 4-cliques are filled).
inline Betti euler_betti(const Cliques& c, const std::vector<double>& f, std::size_t rows, std::size_t cols,
                         double delta) {
    long counts[4] = {0, 0, 0, 0};
    for (int d = 0; d < 4; ++d)
        for (const auto& s : c.by_dim[d]) counts[d] += in_sublevel(s, f, delta) ? 1 : 0;
    Betti b;
    b.b0 = static_cast<long>(bfs_components(f, rows, cols, delta));
    b.b1 = b.b0 - (counts[0] - counts[1] + counts[2] - counts[3]);
    return b;
}

// Rank over GF(2) of a matrix given as rows of up to 512 bits.
inline std::size_t gf2_rank(std::vector<std::bitset<512>> rows) {
    std::size_t rank = 0;
    for (std::size_t bit = 0; bit < 512 && rank < rows.size(); ++bit) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && !rows[pivot][bit]) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != rank && rows[r][bit]) rows[r] ^= rows[rank];
        ++rank;
    }
    return rank;
}

// b1 = dim ker d1 - rank d2 with explicit boundary matrices.
inline long rank_b1(const Cliques& c, const std::vector<double>& f, double delta) {
    std::vector<const std::vector<std::size_t>*> edges, tris;
    for (const auto& e : c.by_dim[1])
        if (in_sublevel(e, f, delta)) edges.push_back(&e);
    for (const auto& t : c.by_dim[2])
        if (in_sublevel(t, f, delta)) tris.push_back(&t);
    if (edges.size() > 512) throw std::runtime_error("grid too large for the rank oracle");

    std::vector<std::bitset<512>> d1;  // one row per edge, columns = vertices
    for (const auto* e : edges) {
        std::bitset<512> row;
        row.set((*e)[0]);
        row.set((*e)[1]);
        d1.push_back(row);
    }
    std::vector<std::bitset<512>> d2;  // one row per triangle, columns = edge positions
    for (const auto* t : tris) {
        std::bitset<512> row;
        const std::size_t a = (*t)[0], b = (*t)[1], d = (*t)[2];
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const auto& e = *edges[k];
            if ((e[0] == a && e[1] == b) || (e[0] == a && e[1] == d) || (e[0] == b && e[1] == d)) row.set(k);
        }
        d2.push_back(row);
    }
    const long kernel = static_cast<long>(edges.size()) - static_cast<long>(gf2_rank(d1));
    return kernel - static_cast<long>(gf2_rank(d2));
}

// P(|T| <= t) for Student t with integer dof, finite series (Abramowitz & Stegun 26.7.3-4).
inline double t_two_sided(double t, int nu) {
    const double theta = std::atan(t / std::sqrt(static_cast<double>(nu)));
    const double s = std::sin(theta), c = std::cos(theta);
    if (nu % 2 == 1) {
        double sum = 0.0;
        if (nu > 1) {
            double term = c;
            sum = term;
            for (int k = 3; k <= nu - 2; k += 2) {
                term *= c * c * (k - 1.0) / k;
                sum += term;
            }
        }
        return 2.0 / std::numbers::pi * (theta + s * sum);
    }
    double term = 1.0, sum = 1.0;
    for (int k = 2; k <= nu - 2; k += 2) {
        term *= c * c * (k - 1.0) / k;
        sum += term;
    }
    return s * sum;
}

inline double t_quantile_975(int nu) {
    double lo = 0.0, hi = 1000.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (t_two_sided(mid, nu) < 0.95 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Textbook linear Kalman filter in Joseph form with an explicit inverse.
struct LinearKf {
    Eigen::Vector4d x;
    Eigen::Matrix4d P;

    void predict(const Eigen::Matrix4d& A, const Eigen::Matrix4d& Q) {
        x = A * x;
        P = A * P * A.transpose() + Q;
    }

    void correct(const Eigen::VectorXd& z, const Eigen::MatrixXd& C, const Eigen::MatrixXd& R) {
        const Eigen::MatrixXd S = C * P * C.transpose() + R;
        const Eigen::MatrixXd K = P * C.transpose() * S.inverse();
        x = x + K * (z - C * x);
        const Eigen::Matrix4d IKC = Eigen::Matrix4d::Identity() - K * C;
        P = IKC * P * IKC.transpose() + K * R * K.transpose();
    }
};

// Bivariate normal rectangle probability by plain Monte Carlo.
inline double mc_rect_mass(const Eigen::Vector2d& mu, const Eigen::Matrix2d& sigma, double x0, double y0, double x1,
                           double y1, std::size_t samples, Rng& rng) {
    const Eigen::Matrix2d L = sigma.llt().matrixL();
    std::normal_distribution<double> n(0.0, 1.0);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < samples; ++k) {
        const Eigen::Vector2d p = mu + L * Eigen::Vector2d(n(rng), n(rng));
        hits += (p.x() >= x0 && p.x() < x1 && p.y() >= y0 && p.y() < y1) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace oracle
