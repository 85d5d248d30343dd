#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qcompose/spline.hpp"

namespace qcompose {

enum class DoorDir { In, Out };

struct Doorway {
    Point2 pos;
    DoorDir dir = DoorDir::In;
    int edge = -1; // polygon edge the doorway lies on
};

struct RoomPolygon {
    std::vector<Point2> vertices; // corner knots; empty in non-polygonal mode
    std::vector<Point2> curve;    // final snake knots
    std::vector<Doorway> doorways;
    int region_id = -1;
    bool polygonal = true;

    const std::vector<Point2>& boundary() const {
        return polygonal && vertices.size() >= 3 ? vertices : curve;
    }
    bool contains(Point2 p) const { return point_in_polygon(p, boundary()); }
};

struct SnakeParams {
    int knot_count = 32;
    double curvature_memory = 512.0; // omega_c
    double initial_stiffness = 8.0;  // omega_s, reduced with length
    double mass = 96.0;              // mu
    double drag = 96.0;              // gamma
    double polygon_stiffness = 15.0; // omega_2 between corners, 0 at corners
    double mercury_pressure = 1.0;
    double mercury_gain = 4.0;
    double edge_gain = 6.0;   // peak edge force after field normalization
    double edge_scale = 1.0;  // 0.75 in car-on-hill mode
    int max_iterations = 2000;
    int polygon_steps = 25;
    double polygon_damping_growth = 1.15;
    int equilibrium_window = 20;
    double equilibrium_tol_cells = 0.1; // mean displacement per step
    bool polygonal = true;
    bool mercury_off_at_rest = false; // car-on-hill mode
};

// The external force context the snake grows in: mercury heights come from
// the bowl field, the edge attraction from the differential of the edge
// energy (peak-normalized by diff_peak).
struct SnakeContext {
    const ScalarField* bowl = nullptr;
    const EdgeEnergy* edge = nullptr;
    double diff_peak = 1.0;
};

struct SnakeCurve {
    std::vector<Point2> pos;
    std::vector<Point2> vel;
    std::vector<Point2> prev_second_diff;
    double initial_length = 0.0;
    double prev_length = 0.0;
    double current_mass = 0.0;
    double current_drag = 0.0;
    std::vector<double> knot_stiffness; // per-knot omega_2
    std::vector<int> corners;           // set by polygonize
    bool mercury_on = true;
    bool reached_equilibrium = false;
    int iterations = 0;

    double length() const;
};

// Circle of radius two cell widths at the deepest unclaimed bowl minimum;
// empty when every minimum is claimed (partition finished).
std::optional<SnakeCurve> init_snake(const ScalarField& bowl,
                                     const std::vector<std::uint8_t>& claimed,
                                     const SnakeParams& params);

// One semi-implicit time step. External forces act along the local outward
// normal only (the tangential component is removed).
void step_snake(SnakeCurve& curve, const SnakeContext& ctx,
                const SnakeParams& params);

// Steps until the windowed mean knot displacement falls below tolerance or
// the iteration cap; returns false on cap without equilibrium.
bool grow_to_equilibrium(SnakeCurve& curve, const SnakeContext& ctx,
                         const SnakeParams& params);

// Corner detection at diagonal normal angles, then 25 damped refinement
// steps with the polygonal stiffness profile. Falls back to the raw closed
// curve when fewer than 3 corners emerge (car-on-hill mode).
RoomPolygon polygonize(SnakeCurve& curve, const SnakeContext& ctx,
                       const SnakeParams& params);

// Samples the normalized gradient magnitude along the boundary, fits the
// periodic 1-D spline, and turns descent minima at or below 0.5 into
// doorways labeled by the direction of the value gradient.
void find_doorways(RoomPolygon& room, const SplineModel2D& model,
                   const DerivativeField& norm);

struct PartitionResult {
    std::vector<RoomPolygon> rooms;
    bool ok = false;
    std::string reason; // "features not ready" etc. when !ok
};

struct PartitionParams {
    SnakeParams snake;
    double binarize_frac = 0.3;     // threshold = frac * max |differential|
    double snr_min = 6.0;           // ridge height over noise floor
    double boundary_magnitude = 1.0;
    double door_align_cells = 3.0;  // doorway pairing tolerance
    double min_coverage = 0.95;
    int max_rooms = 12;
};

PartitionResult partition(const ScalarField& value_field,
                          const PartitionParams& params = {});

std::string partition_to_text(const PartitionResult& result);

} // namespace qcompose
