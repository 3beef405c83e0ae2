#pragma once

#include "swarmap/types.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <vector>

namespace swarmap {

struct Rect {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 0.0;
    double ymax = 0.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }

    bool contains(const Vec2& p) const {
        return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
    }
    bool strictly_contains(const Vec2& p) const {
        return p.x() > xmin && p.x() < xmax && p.y() > ymin && p.y() < ymax;
    }
};

// Simple polygon, vertices counterclockwise, closing edge implied.
using Polygon = std::vector<Vec2>;

inline double signed_area(const Polygon& poly) {
    double acc = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        acc += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * acc;
}

inline double area(const Polygon& poly) { return std::abs(signed_area(poly)); }

inline Vec2 centroid(const Polygon& poly) {
    const double a = signed_area(poly);
    double cx = 0.0, cy = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        const double cross = p.x() * q.y() - q.x() * p.y();
        cx += (p.x() + q.x()) * cross;
        cy += (p.y() + q.y()) * cross;
    }
    return {cx / (6.0 * a), cy / (6.0 * a)};
}

// Even-odd rule.
inline bool point_in_polygon(const Polygon& poly, const Vec2& p) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x_cross = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
            if (p.x() < x_cross) inside = !inside;
        }
    }
    return inside;
}

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Closed-segment intersection test, collinear overlaps included.
inline bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    const auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        const double v = cross2(b - a, c - a);
        return (v > 0.0) - (v < 0.0);
    };
    const auto on_segment = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        return std::min(a.x(), b.x()) <= c.x() && c.x() <= std::max(a.x(), b.x()) &&
               std::min(a.y(), b.y()) <= c.y() && c.y() <= std::max(a.y(), b.y());
    };
    const int o1 = orient(p1, p2, q1);
    const int o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1);
    const int o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

// True if the segment a-b touches the polygon (crosses an edge or lies inside).
inline bool segment_hits_polygon(const Polygon& poly, const Vec2& a, const Vec2& b) {
    if (point_in_polygon(poly, a) || point_in_polygon(poly, b)) return true;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (segments_intersect(a, b, poly[i], poly[(i + 1) % n])) return true;
    }
    return false;
}

// Liang-Barsky clipping of segment a-b against the closed rectangle.
inline bool segment_intersects_rect(const Rect& r, const Vec2& a, const Vec2& b) {
    double t0 = 0.0, t1 = 1.0;
    const Vec2 d = b - a;
    const double p[4] = {-d.x(), d.x(), -d.y(), d.y()};
    const double q[4] = {a.x() - r.xmin, r.xmax - a.x(), a.y() - r.ymin, r.ymax - a.y()};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
        } else {
            const double t = q[i] / p[i];
            if (p[i] < 0.0) {
                t0 = std::max(t0, t);
            } else {
                t1 = std::min(t1, t);
            }
            if (t0 > t1) return false;
        }
    }
    return true;
}

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

inline double polygon_distance(const Polygon& a, const Polygon& b) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Vec2& a0 = a[i];
        const Vec2& a1 = a[(i + 1) % a.size()];
        for (std::size_t j = 0; j < b.size(); ++j) {
            const Vec2& b0 = b[j];
            const Vec2& b1 = b[(j + 1) % b.size()];
            if (segments_intersect(a0, a1, b0, b1)) return 0.0;
            best = std::min({best, point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                             point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
        }
    }
    return best;
}

inline bool polygons_overlap(const Polygon& a, const Polygon& b) {
    if (polygon_distance(a, b) == 0.0) return true;
    return point_in_polygon(b, a.front()) || point_in_polygon(a, b.front());
}

// Distance from the polygon to the nearest side of the enclosing rectangle.
inline double boundary_gap(const Rect& r, const Polygon& poly) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& v : poly) {
        best = std::min({best, v.x() - r.xmin, r.xmax - v.x(), v.y() - r.ymin, r.ymax - v.y()});
    }
    return best;
}

// Regular n-gon inscribed in a circle, counterclockwise.
inline Polygon regular_polygon(const Vec2& center, double radius, int sides = 32) {
    Polygon poly;
    poly.reserve(static_cast<std::size_t>(sides));
    for (int k = 0; k < sides; ++k) {
        const double a = 2.0 * std::numbers::pi * k / sides;
        poly.emplace_back(center.x() + radius * std::cos(a), center.y() + radius * std::sin(a));
    }
    return poly;
}

inline Polygon rectangle_polygon(double x0, double y0, double x1, double y1) {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

}  // namespace swarmap
