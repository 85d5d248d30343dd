#include "qcompose/qlearn.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace qcompose {

void q_update(ActionValueTable& table, int cell, int action, double reward,
              int next_cell, bool terminal, const LearnerConfig& cfg) {
    const double gamma = cfg.undiscounted ? 1.0 : cfg.gamma;
    const double next_max = terminal ? 0.0 : table.max_q(next_cell);
    double& q = table.q(cell, action);
    q = (1.0 - cfg.alpha) * q + cfg.alpha * (reward + gamma * next_max);
}

int select_action(const ActionValueTable& table, int cell, double epsilon,
                  Rng& rng) {
    const int na = table.num_actions;
    if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.uniform_int(na);
    // strict random tie-breaking among the argmax set
    double best = table.q(cell, 0);
    int count = 1;
    int chosen = 0;
    for (int a = 1; a < na; ++a) {
        const double v = table.q(cell, a);
        if (v > best) {
            best = v;
            count = 1;
            chosen = a;
        } else if (v == best) {
            ++count;
            if (rng.uniform_int(count) == 0) chosen = a;
        }
    }
    return chosen;
}

namespace {

double step_reward(const EnvStep& s, const LearnerConfig& cfg) {
    if (cfg.undiscounted) return s.at_goal ? 0.0 : -1.0;
    return s.reward * cfg.goal_reward;
}

} // namespace

EpisodeLog run_learning(const Env& env, ActionValueTable& table,
                        const LearnerConfig& cfg, long n_steps, Rng& rng) {
    EpisodeLog log;
    long remaining = n_steps;
    while (remaining > 0) {
        Point2 s = env.random_start(rng);
        int ep_len = 0;
        while (remaining > 0) {
            const int cell = env.grid.cell_of(s);
            const int a = select_action(table, cell, cfg.epsilon, rng);
            const EnvStep out = env.step(s, a);
            const int next_cell = env.grid.cell_of(out.next);
            q_update(table, cell, a, step_reward(out, cfg), next_cell,
                     out.at_goal, cfg);
            s = out.next;
            --remaining;
            ++ep_len;
            ++log.total_steps;
            if (out.at_goal) break;
        }
        log.episode_lengths.push_back(ep_len);
    }
    return log;
}

double evaluate(const Env& env, ActionValueTable& table,
                const std::vector<Point2>& starts, int cap,
                const LearnerConfig& cfg, Rng& rng) {
    const ActionValueTable snapshot = table;
    double total = 0.0;
    for (const Point2 start : starts) {
        Point2 s = start;
        int steps = 0;
        while (steps < cap && !(env.at_goal && env.at_goal(s))) {
            const int cell = env.grid.cell_of(s);
            const int a = select_action(table, cell, cfg.epsilon, rng);
            const EnvStep out = env.step(s, a);
            const int next_cell = env.grid.cell_of(out.next);
            q_update(table, cell, a, step_reward(out, cfg), next_cell,
                     out.at_goal, cfg);
            s = out.next;
            ++steps;
            if (out.at_goal) break;
        }
        total += steps;
        table = snapshot;
    }
    return total / static_cast<double>(starts.size());
}

std::vector<Point2> evaluation_starts(const Env& env) {
    std::vector<Point2> starts;
    starts.reserve(64);
    const int res = env.grid.resolution;
    for (int j = 0; j < 8; ++j) {
        for (int i = 0; i < 8; ++i) {
            Point2 p{-1.0 + (i + 0.5) * 0.25, -1.0 + (j + 0.5) * 0.25};
            if (env.is_free && !env.is_free(p)) {
                // project to the nearest free cell center
                const int cx0 = env.grid.x_index(p.x);
                const int cy0 = env.grid.y_index(p.y);
                double best = 1e30;
                Point2 best_p = p;
                for (int cy = 0; cy < res; ++cy) {
                    for (int cx = 0; cx < res; ++cx) {
                        const Point2 c = env.grid.cell_center(cx, cy);
                        if (!env.is_free(c)) continue;
                        const double d = std::hypot(double(cx - cx0),
                                                    double(cy - cy0));
                        if (d < best) {
                            best = d;
                            best_p = c;
                        }
                    }
                }
                p = best_p;
            }
            starts.push_back(p);
        }
    }
    return starts;
}

ScalarField value_function(const ActionValueTable& table) {
    ScalarField f(table.grid);
    for (int c = 0; c < table.grid.num_cells(); ++c)
        f.values[static_cast<std::size_t>(c)] = table.max_q(c);
    return f;
}

std::string curve_to_text(const LearningCurve& c) {
    std::ostringstream os;
    os << "step,mean_distance\n";
    char buf[64];
    for (std::size_t i = 0; i < c.steps.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%ld,%.6f\n", c.steps[i],
                      c.mean_distance[i]);
        os << buf;
    }
    return os.str();
}

} // namespace qcompose
