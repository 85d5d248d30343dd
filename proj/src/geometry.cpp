#include "qcompose/geometry.hpp"

#include <algorithm>

namespace qcompose {

std::optional<double> segment_hit(Point2 p, Point2 q, const Segment& s) {
    const Point2 r = q - p;
    const Point2 d = s.b - s.a;
    const double denom = cross(r, d);
    const Point2 ap = s.a - p;
    if (std::abs(denom) < 1e-15) {
        // parallel; collinear overlap check
        if (std::abs(cross(ap, r)) > 1e-15) return std::nullopt;
        const double rr = dot(r, r);
        if (rr < 1e-30) return std::nullopt;
        double t0 = dot(ap, r) / rr;
        double t1 = dot(s.b - p, r) / rr;
        if (t0 > t1) std::swap(t0, t1);
        if (t1 < 0.0 || t0 > 1.0) return std::nullopt;
        return std::max(0.0, t0);
    }
    const double t = cross(ap, d) / denom;
    const double u = cross(ap, r) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return t;
}

std::optional<double> first_hit(Point2 p, Point2 q,
                                const std::vector<Segment>& segs) {
    std::optional<double> best;
    for (const auto& s : segs) {
        if (auto t = segment_hit(p, q, s)) {
            if (!best || *t < *best) best = *t;
        }
    }
    return best;
}

double point_segment_distance(Point2 p, const Segment& s) {
    const Point2 d = s.b - s.a;
    const double dd = dot(d, d);
    if (dd < 1e-30) return dist(p, s.a);
    const double t = std::clamp(dot(p - s.a, d) / dd, 0.0, 1.0);
    return dist(p, s.a + d * t);
}

bool point_in_polygon(Point2 p, const std::vector<Point2>& poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    // boundary proximity counts as inside
    for (std::size_t i = 0; i < n; ++i) {
        if (point_segment_distance(p, {poly[i], poly[(i + 1) % n]}) < 1e-12)
            return true;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const bool straddles = (poly[i].y > p.y) != (poly[j].y > p.y);
        if (straddles) {
            const double xcross = poly[j].x + (poly[i].x - poly[j].x) *
                                                  (p.y - poly[j].y) /
                                                  (poly[i].y - poly[j].y);
            if (p.x < xcross) inside = !inside;
        }
    }
    return inside;
}

double polygon_area(const std::vector<Point2>& poly) {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * std::abs(a);
}

} // namespace qcompose
