#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qcompose/grid.hpp"
#include "qcompose/rng.hpp"

namespace qcompose {

struct LearnerConfig {
    double alpha = 0.1;
    double gamma = 0.8;
    double epsilon = 0.1;
    double goal_reward = 1.0;
    double init_value = 0.0; // 0.75 for the optimistic variant
    bool undiscounted = false; // gamma = 1, per-step cost, goal value 0
};

// One environment interaction: given a state and action index, produce the
// next state, the discounted-mode reward, and the goal flag. Environments
// bind their specs into this signature.
struct EnvStep {
    Point2 next;
    double reward = 0.0;
    bool at_goal = false;
};
using StepFn = std::function<EnvStep(Point2, int)>;
using StartFn = std::function<Point2(Rng&)>;

// A simulation session: the environment behind the learner.
struct Env {
    GridSpec grid;
    int num_actions = kNumActions;
    StepFn step;
    StartFn random_start;
    std::function<bool(Point2)> is_free;
    std::function<bool(Point2)> at_goal;
};

// Q(s,a) <- (1-alpha) Q(s,a) + alpha (r + gamma max_a' Q(s2,a'));
// terminal transitions use 0 for the next-state maximum.
void q_update(ActionValueTable& table, int cell, int action, double reward,
              int next_cell, bool terminal, const LearnerConfig& cfg);

// Epsilon-greedy with strict random tie-breaking among the argmax set.
int select_action(const ActionValueTable& table, int cell, double epsilon,
                  Rng& rng);

struct EpisodeLog {
    std::vector<int> episode_lengths;
    long total_steps = 0;
};

// Episodic learning: random free start, act/update until the goal, repeat
// until the total action count reaches n_steps.
EpisodeLog run_learning(const Env& env, ActionValueTable& table,
                        const LearnerConfig& cfg, long n_steps, Rng& rng);

// The paper's probe protocol: for each start, roll out from a snapshot of
// the table (updates happen during the probe), record steps to goal capped
// at `cap`, then restore the table. Returns the mean over starts.
double evaluate(const Env& env, ActionValueTable& table,
                const std::vector<Point2>& starts, int cap,
                const LearnerConfig& cfg, Rng& rng);

// 64 probe starts on an 8x8 lattice at cell centers; starts that land in
// walls are projected to the nearest free cell center.
std::vector<Point2> evaluation_starts(const Env& env);

ScalarField value_function(const ActionValueTable& table);

struct LearningCurve {
    std::vector<long> steps;
    std::vector<double> mean_distance;
};

std::string curve_to_text(const LearningCurve& c);

} // namespace qcompose
