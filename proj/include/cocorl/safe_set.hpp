#pragma once

// Safe-set construction from demonstration feature expectations, the CMDP
// it induces, and the cone of provably unsafe points.

#include <cstddef>
#include <vector>

#include "cocorl/cmdp.hpp"
#include "cocorl/geometry.hpp"

namespace cocorl {

struct SafeSet {
    Polytope polytope;
    std::vector<FeatureExpectations> selected;
    std::vector<std::size_t> selected_indices;  // positions in the input list
    std::size_t pool_remaining = 0;
    double stop_distance_used = 0.0;
};

struct InferredConstraints {
    std::vector<LinearObjective> constraints;  // weights = A row, threshold = b entry
};

// Greedy hull growth: start from a uniformly chosen demo, then repeatedly add
// the remaining demo furthest from the current hull. The loop runs while
// i <= n_points, the pool is non-empty and the last distance exceeds d_stop,
// so at most n_points + 1 demos are selected. n_points < 0 means min(k, 50).
SafeSet build_safe_set(const std::vector<FeatureExpectations>& demos, int n_points, double d_stop, Rng& rng,
                       const HullOptions& hull = {});
SafeSet build_safe_set(const std::vector<FeatureExpectations>& demos, Rng& rng);

InferredConstraints inferred_cmdp(const SafeSet& safe_set);

// Best policy whose feature expectations lie in the safe set. Throws
// Infeasible if the set contains no achievable feature vector.
CmdpSolution solve_for_reward(const TabularCMDP& m, const SafeSet& safe_set, const LinearObjective& r_eval);

// Single-state problems: features are the action itself, so optimizing over
// the safe set is an LP directly over the polytope.
struct PointSolution {
    Vec point;
    double value = 0.0;
};
PointSolution solve_for_reward(const Polytope& safe_polytope, const Vec& theta);

// x lies in the cone f_i + cone{f_i - f_j : j != i} with every alpha_j >= alpha_min,
// for some demo i. alpha_min sits above the LP feasibility tolerance (1e-8).
bool unsafe_set_membership(const std::vector<FeatureExpectations>& demos, const Vec& x, double alpha_min = 1e-6);

// max over the true feasible set minus max over the safe set, both for r_eval.
double regret(const TabularCMDP& m, const std::vector<LinearObjective>& true_constraints, const SafeSet& safe_set,
              const LinearObjective& r_eval);

}  // namespace cocorl
