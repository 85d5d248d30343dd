#pragma once

#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "qcompose/envsim.hpp"
#include "qcompose/grid.hpp"

namespace qcompose::fixtures {

// Shortest-path distance (in action-step units of 0.25) from every cell
// center to the goal, moving between 8-neighbor cell centers and never
// crossing a wall. Unreachable cells get the largest finite distance seen.
inline ScalarField distance_field(const NavSpec& spec, GridSpec grid) {
    const int res = grid.resolution;
    const double w = grid.cell_width();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<std::size_t>(res) * res, inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (int cy = 0; cy < res; ++cy) {
        for (int cx = 0; cx < res; ++cx) {
            if (spec.goal.contains(grid.cell_center(cx, cy))) {
                dist[static_cast<std::size_t>(cy) * res + cx] = 0.0;
                pq.push({0.0, cy * res + cx});
            }
        }
    }
    const int dx8[8] = {1, 1, 0, -1, -1, -1, 0, 1};
    const int dy8[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    while (!pq.empty()) {
        const auto [d, id] = pq.top();
        pq.pop();
        if (d > dist[static_cast<std::size_t>(id)]) continue;
        const int cx = id % res, cy = id / res;
        const Point2 a = grid.cell_center(cx, cy);
        for (int k = 0; k < 8; ++k) {
            const int nx = cx + dx8[k], ny = cy + dy8[k];
            if (nx < 0 || ny < 0 || nx >= res || ny >= res) continue;
            const Point2 b = grid.cell_center(nx, ny);
            if (first_hit(a, b, spec.walls)) continue;
            const double step =
                std::hypot(double(nx - cx), double(ny - cy)) * w / 0.25;
            const int nid = ny * res + nx;
            if (d + step < dist[static_cast<std::size_t>(nid)]) {
                dist[static_cast<std::size_t>(nid)] = d + step;
                pq.push({d + step, nid});
            }
        }
    }
    double dmax = 0.0;
    for (double d : dist)
        if (std::isfinite(d)) dmax = std::max(dmax, d);
    ScalarField f(grid);
    for (std::size_t i = 0; i < dist.size(); ++i)
        f.values[i] = std::isfinite(dist[i]) ? dist[i] : dmax;
    return f;
}

// Idealized converged value function: gamma^distance.
inline ScalarField synthetic_value(const NavSpec& spec, GridSpec grid,
                                   double gamma = 0.8) {
    ScalarField d = distance_field(spec, grid);
    ScalarField v(grid);
    for (std::size_t i = 0; i < d.values.size(); ++i)
        v.values[i] = std::pow(gamma, d.values[i]);
    return v;
}

// Rectangle room walls with one doorway gap centered on the given side
// (0 = east, 1 = north, 2 = west, 3 = south).
inline std::vector<Segment> room_walls(Rect r, int door_side,
                                       double door_width) {
    std::vector<Segment> walls;
    auto side = [&](Point2 a, Point2 b, bool has_door) {
        if (!has_door) {
            walls.push_back({a, b});
            return;
        }
        const Point2 mid = (a + b) * 0.5;
        const Point2 dir = (b - a) * (1.0 / dist(a, b));
        walls.push_back({a, mid - dir * (door_width / 2.0)});
        walls.push_back({mid + dir * (door_width / 2.0), b});
    };
    side({r.x1, r.y0}, {r.x1, r.y1}, door_side == 0);
    side({r.x0, r.y1}, {r.x1, r.y1}, door_side == 1);
    side({r.x0, r.y0}, {r.x0, r.y1}, door_side == 2);
    side({r.x0, r.y0}, {r.x1, r.y0}, door_side == 3);
    return walls;
}

} // namespace qcompose::fixtures
