#pragma once

// Environment and demonstration generators.

#include <functional>
#include <optional>
#include <vector>

#include "cocorl/cmdp.hpp"

namespace cocorl {

struct GridworldSpec {
    int N = 3;
    double slip_p = 0.0;
    int n_goal = 2;
    int n_limited = 3;
    int n_constraints = 2;
    double gamma = 0.9;
    double reward_std = 0.1;
    double threshold_max = 1.0;  // thresholds ~ U[0, threshold_max]
    int max_rejections = 1000;
};

struct Gridworld {
    GridworldSpec spec;
    TabularCMDP cmdp;
    std::vector<LinearObjective> constraints;
    std::vector<int> goal_cells;
    std::vector<int> limited_cells;
};

enum GridAction { Left = 0, Right = 1, Up = 2, Down = 3, Stay = 4 };

// Transition matrix of an N x N grid with slip probability p.
Mat gridworld_transitions(int N, double slip_p);

// Throws GenerationFailure if no feasible thresholds are found.
Gridworld gen_gridworld(const GridworldSpec& spec, Rng& rng);

// Same layout, costs and thresholds under different slip probability.
Gridworld with_slip(const Gridworld& g, double slip_p);

// Per-state Gaussian reward (mean 1 on goal cells, 0 elsewhere), replicated
// across actions. `goals` overrides the gridworld's goal set.
LinearObjective sample_reward(const Gridworld& g, Rng& rng, const std::optional<std::vector<int>>& goals = {});

// A goal set of the same size drawn from non-limited cells, different from
// the current one whenever such a set exists.
std::vector<int> sample_new_goals(const Gridworld& g, Rng& rng);

// Single-state problem: action a in R^d, features = a, gamma = 0.
struct SingleStateProblem {
    int d = 0;
    std::vector<LinearObjective> constraints;  // phi_j on the unit sphere, xi_j = 1

    Mat phi() const;
    Vec xi() const;
};

Vec sample_unit_sphere(int d, Rng& rng);

// Rejection-samples constraint sets until the feasible region is bounded
// (when require_bounded is set).
SingleStateProblem gen_single_state(int d, int n, Rng& rng, bool require_bounded = true);

struct SingleStateSolution {
    Vec action;
    double value = 0.0;
};
SingleStateSolution solve_single_state(const SingleStateProblem& p, const Vec& theta);

bool is_bounded(const Mat& A, const Vec& b);

// One state, two actions, indicator features, c1 = (1,0), c2 = (0,1),
// xi = 1/2, gamma = 0. Only the uniform policy is feasible.
struct CounterexampleCMDP {
    TabularCMDP cmdp;
    std::vector<LinearObjective> constraints;
    // Reward pair used against known-reward IRL: r1 = (1, 1), r2 = (0, 1).
    std::vector<LinearObjective> known_rewards;
};
CounterexampleCMDP prop1_cmdp(bool with_known_rewards = false);

enum class DemoMode { ExactOptimal, Boltzmann };

struct DemoSpec {
    DemoMode mode = DemoMode::ExactOptimal;
    int k = 1;
    double beta = 1.0;
    int burn_in = 1000;
    int thinning = 10;
};

struct Demo {
    FeatureExpectations features;
    LinearObjective reward;  // hidden reward, kept for known-reward baselines
    Policy policy;
};

using RewardSampler = std::function<LinearObjective(Rng&)>;

// Throws GenerationFailure if sampling breaks down or a demo violates a
// true constraint.
std::vector<Demo> gen_demos(const TabularCMDP& m, const std::vector<LinearObjective>& constraints,
                            const DemoSpec& spec, const RewardSampler& reward_sampler, Rng& rng);

// Hit-and-run sampler for the density exp(beta * G_r(mu)) over the feasible
// occupancy polytope. Each line is sampled exactly from the truncated
// exponential, so no accept/reject step is needed.
class BoltzmannOccupancySampler {
public:
    BoltzmannOccupancySampler(const TabularCMDP& m, const std::vector<LinearObjective>& constraints);

    // Runs a fresh chain from the interior point and returns `count`
    // occupancy samples, `thinning` steps apart after `burn_in` steps.
    std::vector<Vec> sample(const Vec& pair_reward, double beta, int count, int burn_in, int thinning, Rng& rng) const;

    const Vec& interior() const { return center_; }
    bool degenerate() const { return degenerate_; }

private:
    Vec center_;
    Mat null_basis_;  // SA x r, orthonormal
    Mat ineq_;        // rows: -I (nonnegativity) and constraint costs
    Vec ineq_rhs_;
    bool degenerate_ = false;
};

}  // namespace cocorl
