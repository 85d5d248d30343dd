#include "qcompose/envsim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qcompose {

const std::array<Point2, kNumActions>& action_directions() {
    static const std::array<Point2, kNumActions> dirs = {{
        {kActionStep, 0.0},
        {kActionStep, kActionStep},
        {0.0, kActionStep},
        {-kActionStep, kActionStep},
        {-kActionStep, 0.0},
        {-kActionStep, -kActionStep},
        {0.0, -kActionStep},
        {kActionStep, -kActionStep},
    }};
    return dirs;
}

namespace {

Point2 clamp_to_bounds(Point2 p, const Rect& b) {
    return {std::clamp(p.x, b.x0, b.x1), std::clamp(p.y, b.y0, b.y1)};
}

std::vector<Segment> boundary_segments(const Rect& b) {
    return {{{b.x0, b.y0}, {b.x1, b.y0}},
            {{b.x1, b.y0}, {b.x1, b.y1}},
            {{b.x1, b.y1}, {b.x0, b.y1}},
            {{b.x0, b.y1}, {b.x0, b.y0}}};
}

Point2 noisy_displacement(int action, Rng& rng, double noise) {
    if (action < 0 || action >= kNumActions)
        throw std::invalid_argument("invalid action index");
    Point2 d = action_directions()[static_cast<std::size_t>(action)];
    d.x += rng.uniform(-noise, noise);
    d.y += rng.uniform(-noise, noise);
    return d;
}

} // namespace

bool nav_inside_wall(const NavSpec& spec, Point2 p) {
    for (const auto& w : spec.walls)
        if (point_segment_distance(p, w) < 1e-9) return true;
    return false;
}

StepOutcome step_nav(const NavSpec& spec, Point2 s, int action, Rng& rng,
                     double noise_half_width) {
    if (nav_inside_wall(spec, s))
        throw std::invalid_argument("start state inside a wall");
    const Point2 d = noisy_displacement(action, rng, noise_half_width);
    Point2 target = s + d;

    // walls plus the state-space boundary are both collision surfaces
    std::optional<double> hit = first_hit(s, target, spec.walls);
    for (const auto& bs : boundary_segments(spec.bounds)) {
        // ignore starts that already sit on the boundary line
        if (point_segment_distance(s, bs) < 1e-12) continue;
        if (auto t = segment_hit(s, target, bs)) {
            if (!hit || *t < *hit) hit = *t;
        }
    }

    Point2 next;
    if (hit) {
        const double len = norm(d);
        const double back = std::max(0.0, *hit * len - kWallOffset);
        next = s + d * (len > 0.0 ? back / len : 0.0);
    } else {
        next = target;
    }
    next = clamp_to_bounds(next, spec.bounds);

    StepOutcome out;
    out.next = next;
    out.at_goal = spec.goal.contains(next);
    out.reward = out.at_goal ? 1.0 : 0.0;
    return out;
}

namespace {

bool segment_hits_circle(Point2 a, Point2 b, Point2 c, double r) {
    return point_segment_distance(c, {a, b}) <= r;
}

} // namespace

bool arm_collides(const ArmSpec& spec, Point2 config) {
    const double shoulder = config.x * M_PI;
    const double elbow = config.y * (M_PI / 2.0);
    const Point2 origin{0.0, 0.0};
    const Point2 elbow_pt{spec.upper_len * std::cos(shoulder),
                          spec.upper_len * std::sin(shoulder)};
    const double fore_angle = shoulder + elbow;
    const Point2 hand_pt{elbow_pt.x + spec.fore_len * std::cos(fore_angle),
                         elbow_pt.y + spec.fore_len * std::sin(fore_angle)};
    for (const auto& ob : spec.obstacles) {
        if (segment_hits_circle(origin, elbow_pt, ob.center, ob.radius) ||
            segment_hits_circle(elbow_pt, hand_pt, ob.center, ob.radius))
            return true;
    }
    return false;
}

ArmOccupancy arm_to_config(const ArmSpec& spec, int resolution) {
    ArmOccupancy occ;
    occ.grid.resolution = resolution;
    occ.blocked.assign(static_cast<std::size_t>(resolution) * resolution, 0);
    // sample the fine lattice of a dense collision map (>= 400 per axis)
    // so the occupancy equals that map downsampled by any-hit
    const int k = std::max(2, (400 + resolution - 1) / resolution);
    const double fine_w = 2.0 / (resolution * k);
    for (int cy = 0; cy < resolution; ++cy) {
        for (int cx = 0; cx < resolution; ++cx) {
            bool hit = false;
            for (int sy = 0; sy < k && !hit; ++sy) {
                for (int sx = 0; sx < k && !hit; ++sx) {
                    const Point2 p{-1.0 + (cx * k + sx + 0.5) * fine_w,
                                   -1.0 + (cy * k + sy + 0.5) * fine_w};
                    hit = arm_collides(spec, p);
                }
            }
            if (hit)
                occ.blocked[static_cast<std::size_t>(cy) * resolution + cx] = 1;
        }
    }
    return occ;
}

StepOutcome step_arm(const ArmSpec& spec, const ArmOccupancy& occ, Point2 s,
                     int action, Rng& rng, double noise_half_width) {
    if (occ.at(s)) throw std::invalid_argument("start state inside occupancy");
    const Point2 d = noisy_displacement(action, rng, noise_half_width);
    const Point2 target = s + d;

    bool blocked = false;
    if (target.x < -1.0 || target.x > 1.0 || target.y < -1.0 ||
        target.y > 1.0) {
        blocked = true; // joint limits behave like occupancy
    } else {
        const int n_samples = 32;
        for (int i = 1; i <= n_samples && !blocked; ++i) {
            const double t = static_cast<double>(i) / n_samples;
            blocked = occ.at(s + d * t);
        }
    }

    StepOutcome out;
    out.next = blocked ? s : target; // restore on collision
    out.at_goal = spec.goal.contains(out.next);
    out.reward = out.at_goal ? 1.0 : 0.0;
    return out;
}

StepOutcome step_car(const CarSpec& spec, Point2 s, int action) {
    if (action < 0 || action >= kCarNumActions)
        throw std::invalid_argument("invalid car action");
    const double throttle = (action == 0) ? spec.accel : -spec.accel;
    const double v = s.y * spec.vel_scale;
    // semi-implicit step keeps the throttle-free dynamics energy-stable
    double v_next = v + throttle - spec.gravity * std::cos(3.0 * s.x);
    v_next = std::clamp(v_next, -spec.vel_scale, spec.vel_scale);
    double p_next = s.x + v_next;
    if (p_next < -1.0) {
        p_next = -1.0;
        v_next = 0.0;
    } else if (p_next > 1.0) {
        p_next = 1.0;
        v_next = 0.0;
    }
    double u_next = std::clamp(v_next / spec.vel_scale, -1.0, 1.0);

    StepOutcome out;
    out.next = {p_next, u_next};
    out.at_goal = spec.goal.contains(out.next);
    out.reward = out.at_goal ? 1.0 : 0.0;
    return out;
}

namespace {

struct RoomBox {
    Rect r;
};

// Split one room with an axis-aligned wall containing a doorway gap.
// Returns false when the room cannot be split under the width constraints.
bool split_room(std::vector<RoomBox>& rooms, std::size_t idx,
                std::vector<Segment>& walls, Rng& rng) {
    constexpr double kMinRoom = 0.4;
    const Rect r = rooms[idx].r;
    const bool can_v = r.width() >= 2.0 * kMinRoom;
    const bool can_h = r.height() >= 2.0 * kMinRoom;
    if (!can_v && !can_h) return false;
    bool vertical;
    if (can_v && can_h)
        vertical = rng.uniform() < 0.5;
    else
        vertical = can_v;

    const double door_w = rng.uniform(0.1, 0.3);
    if (vertical) {
        const double x = rng.uniform(r.x0 + kMinRoom, r.x1 - kMinRoom);
        const double dy0 =
            rng.uniform(r.y0, r.y1 - door_w); // doorway along the wall
        walls.push_back({{x, r.y0}, {x, dy0}});
        walls.push_back({{x, dy0 + door_w}, {x, r.y1}});
        rooms[idx].r = {r.x0, r.y0, x, r.y1};
        rooms.push_back({{x, r.y0, r.x1, r.y1}});
    } else {
        const double y = rng.uniform(r.y0 + kMinRoom, r.y1 - kMinRoom);
        const double dx0 = rng.uniform(r.x0, r.x1 - door_w);
        walls.push_back({{r.x0, y}, {dx0, y}});
        walls.push_back({{dx0 + door_w, y}, {r.x1, y}});
        rooms[idx].r = {r.x0, r.y0, r.x1, y};
        rooms.push_back({{r.x0, y, r.x1, r.y1}});
    }
    return true;
}

} // namespace

NavSpec generate_rooms(std::uint64_t seed, int n_rooms) {
    if (n_rooms < 1) throw std::invalid_argument("n_rooms must be positive");
    constexpr int kMaxAttempts = 64;
    Rng rng(seed);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::vector<RoomBox> rooms{{Rect{-1.0, -1.0, 1.0, 1.0}}};
        std::vector<Segment> walls;
        bool ok = true;
        while (static_cast<int>(rooms.size()) < n_rooms && ok) {
            // split the largest splittable room
            std::size_t best = rooms.size();
            double best_area = 0.0;
            for (std::size_t i = 0; i < rooms.size(); ++i) {
                const Rect& r = rooms[i].r;
                if (std::max(r.width(), r.height()) < 0.8) continue;
                const double a = r.width() * r.height();
                if (a > best_area) {
                    best_area = a;
                    best = i;
                }
            }
            if (best == rooms.size() || !split_room(rooms, best, walls, rng))
                ok = false;
        }
        if (!ok) continue;

        NavSpec spec;
        spec.walls = std::move(walls);
        // goal in a random room corner, inset by the goal size
        const Rect& gr = rooms[static_cast<std::size_t>(
                                   rng.uniform_int(static_cast<int>(rooms.size())))]
                             .r;
        const bool left = rng.uniform() < 0.5;
        const bool bottom = rng.uniform() < 0.5;
        const double margin = 0.05;
        const double gx0 = left ? gr.x0 + margin : gr.x1 - margin - 0.2;
        const double gy0 = bottom ? gr.y0 + margin : gr.y1 - margin - 0.2;
        spec.goal = {gx0, gy0, gx0 + 0.2, gy0 + 0.2};
        bool goal_clear = true;
        for (const auto& w : spec.walls) {
            const Rect& g = spec.goal;
            if (segment_hit({g.x0, g.y0}, {g.x1, g.y0}, w) ||
                segment_hit({g.x1, g.y0}, {g.x1, g.y1}, w) ||
                segment_hit({g.x1, g.y1}, {g.x0, g.y1}, w) ||
                segment_hit({g.x0, g.y1}, {g.x0, g.y0}, w)) {
                goal_clear = false;
                break;
            }
        }
        if (goal_clear) return spec;
    }
    throw std::runtime_error("generate_rooms: constraints unsatisfiable");
}

Point2 random_free_point_nav(const NavSpec& spec, Rng& rng) {
    for (int i = 0; i < 10000; ++i) {
        Point2 p{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        if (!nav_inside_wall(spec, p)) return p;
    }
    throw std::runtime_error("no free point found");
}

Point2 random_free_point_arm(const ArmOccupancy& occ, Rng& rng) {
    for (int i = 0; i < 10000; ++i) {
        Point2 p{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        if (!occ.at(p)) return p;
    }
    throw std::runtime_error("no free point found");
}

// --- task spec files ---

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string store_task(const TaskSpec& t) {
    std::ostringstream os;
    os << "TASKSPEC v1\n";
    os << "domain " << t.domain << "\n";
    if (t.domain == "nav") {
        const auto& b = t.nav.bounds;
        os << "bounds " << fmt_double(b.x0) << " " << fmt_double(b.y0) << " "
           << fmt_double(b.x1) << " " << fmt_double(b.y1) << "\n";
        os << "goal " << fmt_double(t.nav.goal.x0) << " "
           << fmt_double(t.nav.goal.y0) << " " << fmt_double(t.nav.goal.x1)
           << " " << fmt_double(t.nav.goal.y1) << "\n";
        for (const auto& w : t.nav.walls)
            os << "wall " << fmt_double(w.a.x) << " " << fmt_double(w.a.y)
               << " " << fmt_double(w.b.x) << " " << fmt_double(w.b.y) << "\n";
    } else if (t.domain == "arm") {
        os << "links " << fmt_double(t.arm.upper_len) << " "
           << fmt_double(t.arm.fore_len) << "\n";
        os << "goal " << fmt_double(t.arm.goal.x0) << " "
           << fmt_double(t.arm.goal.y0) << " " << fmt_double(t.arm.goal.x1)
           << " " << fmt_double(t.arm.goal.y1) << "\n";
        for (const auto& ob : t.arm.obstacles)
            os << "obstacle " << fmt_double(ob.center.x) << " "
               << fmt_double(ob.center.y) << " " << fmt_double(ob.radius)
               << "\n";
    } else if (t.domain == "car") {
        os << "car " << fmt_double(t.car.accel) << " "
           << fmt_double(t.car.gravity) << " " << fmt_double(t.car.vel_scale)
           << "\n";
        os << "goal " << fmt_double(t.car.goal.x0) << " "
           << fmt_double(t.car.goal.y0) << " " << fmt_double(t.car.goal.x1)
           << " " << fmt_double(t.car.goal.y1) << "\n";
    } else {
        throw std::invalid_argument("unknown domain: " + t.domain);
    }
    return os.str();
}

TaskSpec load_task(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "TASKSPEC v1")
        throw std::runtime_error("bad task header");
    TaskSpec t;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "domain") {
            ls >> t.domain;
        } else if (key == "bounds") {
            ls >> t.nav.bounds.x0 >> t.nav.bounds.y0 >> t.nav.bounds.x1 >>
                t.nav.bounds.y1;
        } else if (key == "goal") {
            Rect g;
            ls >> g.x0 >> g.y0 >> g.x1 >> g.y1;
            if (t.domain == "nav")
                t.nav.goal = g;
            else if (t.domain == "arm")
                t.arm.goal = g;
            else
                t.car.goal = g;
        } else if (key == "wall") {
            Segment s;
            ls >> s.a.x >> s.a.y >> s.b.x >> s.b.y;
            t.nav.walls.push_back(s);
        } else if (key == "links") {
            ls >> t.arm.upper_len >> t.arm.fore_len;
        } else if (key == "obstacle") {
            ArmObstacle ob;
            ls >> ob.center.x >> ob.center.y >> ob.radius;
            t.arm.obstacles.push_back(ob);
        } else if (key == "car") {
            ls >> t.car.accel >> t.car.gravity >> t.car.vel_scale;
        } else {
            throw std::runtime_error("unknown task key: " + key);
        }
        if (ls.fail()) throw std::runtime_error("bad task line: " + line);
    }
    return t;
}

void save_task_file(const TaskSpec& t, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << store_task(t);
}

TaskSpec load_task_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return load_task(os.str());
}

} // namespace qcompose
