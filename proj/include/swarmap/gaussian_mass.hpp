#pragma once

// Probability mass of a bivariate normal over an axis-aligned rectangle.
//
// The mass and its complement are both returned; the complement is computed
// without cancellation so that log(1 / (1 - p)) stays accurate when p is
// close to 1.

#include "swarmap/geometry.hpp"
#include "swarmap/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace swarmap {

struct CellMass {
    double mass = 0.0;        // P(X in rect)
    double complement = 1.0;  // P(X not in rect)
};

inline constexpr double kDiracEigenvalue = 1e-12;
inline constexpr double kMassFloor = 1e-300;

namespace detail {

// Phi(z) and 1 - Phi(z) through erfc, accurate in both tails.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

// P(a <= Z <= b) and P(Z outside [a, b]) for standard normal Z.
inline CellMass normal_interval(double a, double b) {
    if (!(b > a)) return {0.0, 1.0};
    CellMass m;
    if (a >= 0.0) {
        m.mass = normal_sf(a) - normal_sf(b);
    } else if (b <= 0.0) {
        m.mass = normal_cdf(b) - normal_cdf(a);
    } else {
        m.mass = 1.0 - normal_cdf(a) - normal_sf(b);
    }
    m.complement = normal_cdf(a) + normal_sf(b);
    return m;
}

template <int N>
struct GaussLegendre {
    std::array<double, N> nodes{};
    std::array<double, N> weights{};

    GaussLegendre() {
        // Newton iteration on P_N starting from the Chebyshev-like guess.
        for (int i = 0; i < (N + 1) / 2; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int k = 1; k <= N; ++k) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
                }
                dp = N * (x * p0 - p1) / (x * x - 1.0);
                const double dx = p0 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[i] = -x;
            nodes[N - 1 - i] = x;
            weights[i] = weights[N - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

inline const GaussLegendre<64>& gauss_legendre_64() {
    static const GaussLegendre<64> rule;
    return rule;
}

inline CellMass diagonal_mass(const Vec2& mu, double sx, double sy, const Rect& r) {
    const CellMass px = normal_interval((r.xmin - mu.x()) / sx, (r.xmax - mu.x()) / sx);
    const CellMass py = normal_interval((r.ymin - mu.y()) / sy, (r.ymax - mu.y()) / sy);
    CellMass m;
    m.mass = px.mass * py.mass;
    m.complement = px.complement + py.complement - px.complement * py.complement;
    return m;
}

// Conditions on x: X ~ N(mu_x, sxx), Y | x ~ N(mu_y + b (x - mu_x), c^2).
// The x-range is split where the conditional mean crosses the rectangle's
// y-edges, and each panel is integrated with 64-point Gauss-Legendre.
inline CellMass correlated_mass(const Vec2& mu, const Mat2& sigma, const Rect& r) {
    const double sxx = sigma(0, 0), syy = sigma(1, 1), sxy = sigma(0, 1);
    const double sx = std::sqrt(sxx);
    const double slope = sxy / sxx;
    const double c = std::sqrt(std::max(syy - sxy * slope, 0.0));

    const CellMass outer = normal_interval((r.xmin - mu.x()) / sx, (r.xmax - mu.x()) / sx);
    const double lo = std::max(r.xmin, mu.x() - 12.0 * sx);
    const double hi = std::min(r.xmax, mu.x() + 12.0 * sx);
    if (!(hi > lo)) return {0.0, 1.0};

    std::array<double, 6> cuts{lo, hi, lo, lo, lo, lo};
    std::size_t ncuts = 2;
    if (slope != 0.0) {
        const double width = 6.0 * c / std::abs(slope);
        for (double y_edge : {r.ymin, r.ymax}) {
            const double xc = mu.x() + (y_edge - mu.y()) / slope;
            for (double x : {xc - width, xc + width}) {
                if (x > lo && x < hi) cuts[ncuts++] = x;
            }
        }
    }
    std::sort(cuts.begin(), cuts.begin() + static_cast<std::ptrdiff_t>(ncuts));

    const auto& gl = gauss_legendre_64();
    const double norm = 1.0 / (sx * std::sqrt(2.0 * std::numbers::pi));
    double inside = 0.0;
    double outside_y = 0.0;
    for (std::size_t p = 0; p + 1 < ncuts; ++p) {
        const double a = cuts[p], b = cuts[p + 1];
        if (!(b > a)) continue;
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
            const double x = mid + half * gl.nodes[k];
            const double zx = (x - mu.x()) / sx;
            const double density = norm * std::exp(-0.5 * zx * zx);
            const double m_y = mu.y() + slope * (x - mu.x());
            CellMass cy;
            if (c > 0.0) {
                cy = normal_interval((r.ymin - m_y) / c, (r.ymax - m_y) / c);
            } else {
                const bool in = m_y >= r.ymin && m_y < r.ymax;
                cy = {in ? 1.0 : 0.0, in ? 0.0 : 1.0};
            }
            inside += gl.weights[k] * half * density * cy.mass;
            outside_y += gl.weights[k] * half * density * cy.complement;
        }
    }
    return {inside, outer.complement + outside_y};
}

}  // namespace detail

// Mass of N(mu, sigma) over the rectangle. Near-singular covariances
// (smallest eigenvalue below 1e-12) are treated as a point mass at mu.
inline CellMass cell_mass(const Vec2& mu, const Mat2& sigma_in, const Rect& r) {
    const Mat2 sigma = 0.5 * (sigma_in + sigma_in.transpose());
    Eigen::SelfAdjointEigenSolver<Mat2> es(sigma, Eigen::EigenvaluesOnly);
    CellMass m;
    if (es.eigenvalues().minCoeff() < kDiracEigenvalue) {
        const bool in = mu.x() >= r.xmin && mu.x() < r.xmax && mu.y() >= r.ymin && mu.y() < r.ymax;
        return {in ? 1.0 : 0.0, in ? 0.0 : 1.0};
    }
    if (sigma(0, 1) == 0.0) {
        m = detail::diagonal_mass(mu, std::sqrt(sigma(0, 0)), std::sqrt(sigma(1, 1)), r);
    } else {
        m = detail::correlated_mass(mu, sigma, r);
    }
    if (m.mass < kMassFloor) m.mass = 0.0;
    m.mass = std::clamp(m.mass, 0.0, 1.0);
    m.complement = std::clamp(m.complement, 0.0, 1.0);
    return m;
}

// Same integral forced through the quadrature path, for cross-checking the
// closed form.
inline CellMass cell_mass_quadrature(const Vec2& mu, const Mat2& sigma, const Rect& r) {
    return detail::correlated_mass(mu, 0.5 * (sigma + sigma.transpose()), r);
}

// Cheap upper bound: the mass is at most either marginal probability.
inline double cell_mass_upper_bound(const Vec2& mu, const Mat2& sigma, const Rect& r) {
    const double sx = std::sqrt(std::max(sigma(0, 0), 0.0));
    const double sy = std::sqrt(std::max(sigma(1, 1), 0.0));
    if (!(sx > 0.0) || !(sy > 0.0)) return 1.0;
    const double px = detail::normal_interval((r.xmin - mu.x()) / sx, (r.xmax - mu.x()) / sx).mass;
    const double py = detail::normal_interval((r.ymin - mu.y()) / sy, (r.ymax - mu.y()) / sy).mass;
    return std::min(px, py);
}

}  // namespace swarmap
