#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace qcompose {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Point2&) const = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::sqrt(dot(a, a)); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }

struct Segment {
    Point2 a;
    Point2 b;
    bool operator==(const Segment&) const = default;
};

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    bool contains(Point2 p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }
    Point2 center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    bool operator==(const Rect&) const = default;
};

// Parameter t in [0,1] along p->q of the first crossing with s, if any.
// Touching an endpoint counts as a crossing; collinear overlap reports the
// nearest overlap start.
std::optional<double> segment_hit(Point2 p, Point2 q, const Segment& s);

// Earliest crossing along p->q over a set of segments.
std::optional<double> first_hit(Point2 p, Point2 q,
                                const std::vector<Segment>& segs);

double point_segment_distance(Point2 p, const Segment& s);

// Even-odd rule; points on the boundary are reported inside.
bool point_in_polygon(Point2 p, const std::vector<Point2>& poly);

double polygon_area(const std::vector<Point2>& poly);

} // namespace qcompose
