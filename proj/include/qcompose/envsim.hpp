#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qcompose/geometry.hpp"
#include "qcompose/grid.hpp"
#include "qcompose/rng.hpp"

namespace qcompose {

// Nominal step is +/-0.25 per dimension; uniform noise of +/-0.125 is added
// to each dimension of the action.
inline constexpr double kActionStep = 0.25;
inline constexpr double kActionNoise = 0.125;
// Collision places the agent this far back from the wall along the reversed
// motion direction (half of the default cell width).
inline constexpr double kWallOffset = 0.02;

// Index 0 = +x, then counterclockwise through the 8 compass directions.
const std::array<Point2, kNumActions>& action_directions();

struct StepOutcome {
    Point2 next;
    double reward = 0.0;
    bool at_goal = false;
};

struct NavSpec {
    std::vector<Segment> walls; // doorways are gaps between segments
    Rect goal;
    Rect bounds{-1.0, -1.0, 1.0, 1.0};

    bool operator==(const NavSpec&) const = default;
};

struct ArmObstacle {
    Point2 center; // work-space coordinates
    double radius = 0.0;
    bool operator==(const ArmObstacle&) const = default;
};

// Two-joint arm. Shoulder angle in [-pi, pi] maps to x in [-1, 1], elbow
// angle in [-pi/2, pi/2] maps to y. Obstacles live in the work space; the
// goal is a rectangle in configuration space.
struct ArmSpec {
    std::vector<ArmObstacle> obstacles;
    Rect goal;
    double upper_len = 0.5; // shoulder to elbow
    double fore_len = 0.5;  // elbow to hand

    bool operator==(const ArmSpec&) const = default;
};

struct CarSpec {
    double accel = 0.0015;     // throttle acceleration
    double gravity = 0.0025;   // scales -cos(3p) hill term
    double vel_scale = 0.07;   // physical velocity at |u| = 1
    Rect goal{0.5, -0.3, 1.0, 0.3}; // (position, scaled velocity) box

    bool operator==(const CarSpec&) const = default;
};

StepOutcome step_nav(const NavSpec& spec, Point2 s, int action, Rng& rng,
                     double noise_half_width = kActionNoise);

// Precomputed configuration-space occupancy for fast stepping.
struct ArmOccupancy {
    GridSpec grid;
    std::vector<std::uint8_t> blocked;

    bool at(Point2 p) const {
        return blocked[static_cast<std::size_t>(grid.cell_of(p))] != 0;
    }
};

// Cell occupied iff any sampled joint pair inside the cell collides per
// forward kinematics (2x2 supersampling).
ArmOccupancy arm_to_config(const ArmSpec& spec, int resolution);

bool arm_collides(const ArmSpec& spec, Point2 config);

StepOutcome step_arm(const ArmSpec& spec, const ArmOccupancy& occ, Point2 s,
                     int action, Rng& rng,
                     double noise_half_width = kActionNoise);

// Car actions: 0 = forward, 1 = backward.
inline constexpr int kCarNumActions = 2;
StepOutcome step_car(const CarSpec& spec, Point2 s, int action);

// Random interconnected-room layouts under the generation constraints:
// axis-aligned walls, room width >= 0.4, doorway width in [0.1, 0.3].
NavSpec generate_rooms(std::uint64_t seed, int n_rooms);

bool nav_inside_wall(const NavSpec& spec, Point2 p);

// Uniform random point in free space (outside walls / occupancy).
Point2 random_free_point_nav(const NavSpec& spec, Rng& rng);
Point2 random_free_point_arm(const ArmOccupancy& occ, Rng& rng);

// --- Task specification files ("TASKSPEC v1") ---

struct TaskSpec {
    std::string domain; // "nav", "arm", or "car"
    NavSpec nav;
    ArmSpec arm;
    CarSpec car;

    bool operator==(const TaskSpec&) const = default;
};

std::string store_task(const TaskSpec& t);
TaskSpec load_task(const std::string& text);
void save_task_file(const TaskSpec& t, const std::string& path);
TaskSpec load_task_file(const std::string& path);

} // namespace qcompose
