#include "doctest.h"

#include <queue>
#include <set>

#include "qcompose/envsim.hpp"

using namespace qcompose;

namespace {

// zero-noise helper: step with the noise half-width forced to 0
StepOutcome nav_step0(const NavSpec& spec, Point2 s, int a) {
    Rng rng(1);
    return step_nav(spec, s, a, rng, 0.0);
}

// BFS between cell centers; a move is legal when its segment crosses no
// wall. Returns the component size when every off-wall cell is reachable
// from the first one, otherwise the negated count.
int reachable_cells(const NavSpec& spec, int res) {
    GridSpec g{res};
    std::vector<int> state(static_cast<std::size_t>(res) * res, 0);
    auto on_wall = [&](int cx, int cy) {
        const Point2 c = g.cell_center(cx, cy);
        for (const auto& seg : spec.walls)
            if (point_segment_distance(c, seg) < 1e-9) return true;
        return false;
    };
    int start = -1;
    for (int cy = 0; cy < res && start < 0; ++cy)
        for (int cx = 0; cx < res && start < 0; ++cx)
            if (!on_wall(cx, cy)) start = cy * res + cx;
    REQUIRE(start >= 0);
    std::queue<int> q;
    q.push(start);
    state[static_cast<std::size_t>(start)] = 1;
    int count = 0;
    while (!q.empty()) {
        const int cur = q.front();
        q.pop();
        ++count;
        const int cx = cur % res, cy = cur / res;
        const int dx[4] = {1, -1, 0, 0};
        const int dy[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const int nx = cx + dx[k], ny = cy + dy[k];
            if (nx < 0 || ny < 0 || nx >= res || ny >= res) continue;
            const int id = ny * res + nx;
            if (state[static_cast<std::size_t>(id)] || on_wall(nx, ny))
                continue;
            if (first_hit(g.cell_center(cx, cy), g.cell_center(nx, ny),
                          spec.walls))
                continue;
            state[static_cast<std::size_t>(id)] = 1;
            q.push(id);
        }
    }
    int total_free = 0;
    for (int cy = 0; cy < res; ++cy)
        for (int cx = 0; cx < res; ++cx)
            if (!on_wall(cx, cy)) ++total_free;
    return count == total_free ? count : -count;
}

} // namespace

TEST_CASE("nav nominal step east") {
    NavSpec spec;
    spec.goal = {0.8, 0.8, 1.0, 1.0};
    const auto out = nav_step0(spec, {0.0, 0.0}, 0);
    CHECK(out.next.x == doctest::Approx(0.25));
    CHECK(out.next.y == doctest::Approx(0.0));
    CHECK(!out.at_goal);
    CHECK(out.reward == 0.0);
}

TEST_CASE("nav reaching the goal yields reward 1") {
    NavSpec spec;
    spec.goal = {0.0, -0.1, 0.2, 0.1};
    const auto out = nav_step0(spec, {-0.2, 0.0}, 0);
    CHECK(out.at_goal);
    CHECK(out.reward == 1.0);
}

TEST_CASE("nav boundary collision backs off by the wall offset") {
    NavSpec spec;
    spec.goal = {-1.0, -1.0, -0.8, -0.8};
    const auto out = nav_step0(spec, {0.95, 0.0}, 0);
    CHECK(out.next.x == doctest::Approx(0.98));
    CHECK(out.next.y == doctest::Approx(0.0));
}

TEST_CASE("nav wall collision stops short of the wall") {
    NavSpec spec;
    spec.walls.push_back({{0.1, -0.5}, {0.1, 0.5}});
    spec.goal = {-1.0, -1.0, -0.8, -0.8};
    const auto out = nav_step0(spec, {0.0, 0.0}, 0);
    CHECK(out.next.x == doctest::Approx(0.08));
    // the path shortened by the offset does not cross the wall
    CHECK(out.next.x < 0.1);
}

TEST_CASE("nav diagonal corner clipping counts as a collision") {
    NavSpec spec;
    spec.walls.push_back({{0.0, 0.0}, {0.0, 1.0}});
    spec.goal = {-1.0, -1.0, -0.9, -0.9};
    // NE step whose segment crosses the wall tip region
    const auto out = nav_step0(spec, {-0.1, 0.1}, 1);
    CHECK(out.next.x <= 0.0);
}

TEST_CASE("nav invalid action throws") {
    NavSpec spec;
    Rng rng(0);
    CHECK_THROWS(step_nav(spec, {0, 0}, 8, rng));
    CHECK_THROWS(step_nav(spec, {0, 0}, -1, rng));
}

TEST_CASE("nav outcomes stay inside the closed square") {
    NavSpec spec = generate_rooms(7, 4);
    Rng rng(123);
    Point2 s = random_free_point_nav(spec, rng);
    for (int i = 0; i < 5000; ++i) {
        const auto out = step_nav(spec, s, rng.uniform_int(8), rng);
        CHECK(out.next.x >= -1.0);
        CHECK(out.next.x <= 1.0);
        CHECK(out.next.y >= -1.0);
        CHECK(out.next.y <= 1.0);
        s = out.at_goal ? random_free_point_nav(spec, rng) : out.next;
    }
}

TEST_CASE("nav determinism for identical rng state") {
    NavSpec spec = generate_rooms(3, 5);
    Rng a(42), b(42);
    Point2 s{0.1, -0.3};
    for (int i = 0; i < 100; ++i) {
        const auto oa = step_nav(spec, s, i % 8, a);
        const auto ob = step_nav(spec, s, i % 8, b);
        CHECK(oa.next.x == ob.next.x);
        CHECK(oa.next.y == ob.next.y);
        s = oa.next;
    }
}

TEST_CASE("generate_rooms determinism and constraints") {
    const NavSpec a = generate_rooms(1, 5);
    const NavSpec b = generate_rooms(1, 5);
    CHECK(a == b);
    // doorway gaps between paired collinear segments respect the width cap
    // (segments are emitted in pairs per split)
    for (std::size_t i = 0; i + 1 < a.walls.size(); i += 2) {
        const auto& s0 = a.walls[i];
        const auto& s1 = a.walls[i + 1];
        const double gap = dist(s0.b, s1.a);
        CHECK(gap >= 0.1 - 1e-12);
        CHECK(gap <= 0.3 + 1e-12);
    }
}

TEST_CASE("generate_rooms connectivity for many seeds") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const int n = 3 + static_cast<int>(seed % 3);
        const NavSpec spec = generate_rooms(seed, n);
        CHECK(reachable_cells(spec, 40) > 0);
    }
}

TEST_CASE("arm config space: no obstacles means empty occupancy") {
    ArmSpec spec;
    const auto occ = arm_to_config(spec, 40);
    int total = 0;
    for (auto b : occ.blocked) total += b;
    CHECK(total == 0);
}

TEST_CASE("arm config space: small obstacle yields negative-slope band") {
    ArmSpec spec;
    // obstacle at mid-reach on the +x axis, small radius
    spec.obstacles.push_back({{0.75, 0.0}, 0.08});
    const auto occ = arm_to_config(spec, 80);
    // principal axis slope of occupied cells via covariance
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int m = 0;
    for (int cy = 0; cy < 80; ++cy) {
        for (int cx = 0; cx < 80; ++cx) {
            if (!occ.blocked[static_cast<std::size_t>(cy) * 80 + cx]) continue;
            const Point2 p = occ.grid.cell_center(cx, cy);
            sx += p.x;
            sy += p.y;
            ++m;
        }
    }
    REQUIRE(m > 10);
    sx /= m;
    sy /= m;
    for (int cy = 0; cy < 80; ++cy) {
        for (int cx = 0; cx < 80; ++cx) {
            if (!occ.blocked[static_cast<std::size_t>(cy) * 80 + cx]) continue;
            const Point2 p = occ.grid.cell_center(cx, cy);
            sxx += (p.x - sx) * (p.x - sx);
            sxy += (p.x - sx) * (p.y - sy);
            syy += (p.y - sy) * (p.y - sy);
        }
    }
    CHECK(sxy < 0.0); // elbow rotates opposite to the shoulder
    CHECK(sxx + syy > 0.01); // elongated, not a blob
}

TEST_CASE("arm occupancy agrees with brute-force FK oracle") {
    ArmSpec spec;
    spec.obstacles.push_back({{0.6, 0.4}, 0.1});
    const auto occ = arm_to_config(spec, 40);
    // dense 400x400 oracle downsampled 10x: occupied iff any fine sample hits
    GridSpec fg{400};
    int mismatches = 0;
    for (int cy = 0; cy < 40; ++cy) {
        for (int cx = 0; cx < 40; ++cx) {
            bool oracle = false;
            for (int fy = cy * 10; fy < (cy + 1) * 10 && !oracle; ++fy)
                for (int fx = cx * 10; fx < (cx + 1) * 10 && !oracle; ++fx)
                    oracle = arm_collides(spec, fg.cell_center(fx, fy));
            const bool got =
                occ.blocked[static_cast<std::size_t>(cy) * 40 + cx] != 0;
            if (oracle != got) ++mismatches;
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("arm step restores position on collision") {
    ArmSpec spec;
    spec.obstacles.push_back({{0.75, 0.0}, 0.1});
    spec.goal = {-0.9, -0.9, -0.7, -0.7};
    const auto occ = arm_to_config(spec, 200);
    // find a free state adjacent to the band, then push east into it
    Rng rng(5);
    int restored = 0, moved = 0;
    for (int i = 0; i < 2000; ++i) {
        Point2 s = random_free_point_arm(occ, rng);
        const auto out = step_arm(spec, occ, s, rng.uniform_int(8), rng);
        CHECK(!occ.at(out.next));
        if (out.next.x == s.x && out.next.y == s.y)
            ++restored;
        else
            ++moved;
    }
    CHECK(restored > 0);
    CHECK(moved > 0);
}

TEST_CASE("arm free displacement matches nav kinematics") {
    ArmSpec spec;
    spec.goal = {0.8, 0.8, 1.0, 1.0};
    const auto occ = arm_to_config(spec, 40);
    Rng rng(1);
    const auto out = step_arm(spec, occ, {0.0, 0.0}, 2, rng, 0.0);
    CHECK(out.next.x == doctest::Approx(0.0));
    CHECK(out.next.y == doctest::Approx(0.25));
}

TEST_CASE("car forward from flat region gains velocity") {
    CarSpec spec;
    // at 3p = -pi/2 the hill term vanishes
    const double p_flat = -M_PI / 6.0;
    const auto out = step_car(spec, {p_flat, 0.0}, 0);
    CHECK(out.next.y == doctest::Approx(spec.accel / spec.vel_scale));
}

TEST_CASE("car cannot crest from rest inside the weak region") {
    CarSpec spec;
    Point2 s{0.1, 0.0};
    bool crested = false;
    for (int i = 0; i < 2000; ++i) {
        const auto out = step_car(spec, s, 0);
        s = out.next;
        if (s.x >= spec.goal.x0) crested = true;
    }
    CHECK(!crested);
}

TEST_CASE("car crests with the reverse-first strategy") {
    CarSpec spec;
    Point2 s{-0.2, 0.0};
    // back up toward the far wall, then full forward
    for (int i = 0; i < 120; ++i) s = step_car(spec, s, 1).next;
    bool crested = false;
    for (int i = 0; i < 600 && !crested; ++i) {
        const auto out = step_car(spec, s, 0);
        s = out.next;
        crested = out.at_goal;
    }
    CHECK(crested);
}

TEST_CASE("task spec files round-trip exactly") {
    TaskSpec t;
    t.domain = "nav";
    t.nav = generate_rooms(11, 4);
    const std::string text = store_task(t);
    CHECK(load_task(text) == t);
    CHECK(store_task(load_task(text)) == text);

    TaskSpec ta;
    ta.domain = "arm";
    ta.arm.obstacles.push_back({{0.7321, -0.125}, 0.0625});
    ta.arm.goal = {0.1, 0.2, 0.3, 0.4};
    CHECK(load_task(store_task(ta)) == ta);

    TaskSpec tc;
    tc.domain = "car";
    CHECK(load_task(store_task(tc)) == tc);
}
