#pragma once

#include <algorithm>
#include <cassert>
#include <vector>

#include "qcompose/geometry.hpp"

namespace qcompose {

inline constexpr int kNumActions = 8;

// Uniform discretization of the state square [-1,1] x [-1,1].
struct GridSpec {
    int resolution = 40;

    double cell_width() const { return 2.0 / resolution; }
    int clamp_index(int i) const { return std::clamp(i, 0, resolution - 1); }

    int x_index(double x) const {
        return clamp_index(static_cast<int>((x + 1.0) / cell_width()));
    }
    int y_index(double y) const {
        return clamp_index(static_cast<int>((y + 1.0) / cell_width()));
    }
    int cell_of(Point2 p) const {
        return y_index(p.y) * resolution + x_index(p.x);
    }
    Point2 cell_center(int cx, int cy) const {
        const double w = cell_width();
        return {-1.0 + (cx + 0.5) * w, -1.0 + (cy + 0.5) * w};
    }
    int num_cells() const { return resolution * resolution; }

    bool operator==(const GridSpec&) const = default;
};

// Cell-resolved scalar function over the state square.
struct ScalarField {
    GridSpec grid;
    std::vector<double> values; // row-major, index = cy*res + cx

    ScalarField() = default;
    explicit ScalarField(GridSpec g, double fill = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.num_cells()), fill) {}

    double& at(int cx, int cy) {
        return values[static_cast<std::size_t>(cy) * grid.resolution + cx];
    }
    double at(int cx, int cy) const {
        return values[static_cast<std::size_t>(cy) * grid.resolution + cx];
    }
    double at(Point2 p) const { return values[grid.cell_of(p)]; }

    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

// Discretized action-value function: per-cell array of action values.
struct ActionValueTable {
    GridSpec grid;
    int num_actions = kNumActions;
    std::vector<double> values; // index = (cy*res + cx)*num_actions + a

    ActionValueTable() = default;
    explicit ActionValueTable(GridSpec g, double init = 0.0,
                              int n_actions = kNumActions)
        : grid(g),
          num_actions(n_actions),
          values(static_cast<std::size_t>(g.num_cells()) * n_actions, init) {}

    double& q(int cell, int a) {
        return values[static_cast<std::size_t>(cell) * num_actions + a];
    }
    double q(int cell, int a) const {
        return values[static_cast<std::size_t>(cell) * num_actions + a];
    }

    double max_q(int cell) const {
        const double* v = &values[static_cast<std::size_t>(cell) * num_actions];
        return *std::max_element(v, v + num_actions);
    }

    bool operator==(const ActionValueTable&) const = default;
};

} // namespace qcompose
