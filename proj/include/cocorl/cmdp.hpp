#pragma once

// Tabular constrained MDPs with linear rewards and costs over a feature map.
//
// State-action pairs are flattened as index s * n_actions + a throughout:
// transitions are stored as an (S*A) x S matrix and features as (S*A) x d.

#include <iosfwd>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cocorl/geometry.hpp"
#include "cocorl/solvers/lp.hpp"

namespace cocorl {

using Rng = std::mt19937_64;

struct TabularCMDP {
    int n_states = 0;
    int n_actions = 0;
    Mat transitions;  // (S*A) x S, row s*A+a is P(. | s, a)
    Vec initial_dist;
    double discount = 0.9;
    Mat features;  // (S*A) x d, entries in [0, 1]

    int n_pairs() const { return n_states * n_actions; }
    int dim() const { return static_cast<int>(features.cols()); }
    int pair(int s, int a) const { return s * n_actions + a; }

    // Throws InvalidArgument if any invariant is broken.
    void validate() const;
};

struct LinearObjective {
    Vec weights;
    std::optional<double> threshold;

    LinearObjective() = default;
    explicit LinearObjective(Vec w, std::optional<double> xi = std::nullopt)
        : weights(std::move(w)), threshold(xi) {}
};

struct Policy {
    Mat probs;  // S x A

    static Policy uniform(int n_states, int n_actions);
    static Policy deterministic(const std::vector<int>& actions, int n_actions);
    bool is_deterministic(double tol = 1e-12) const;
};

enum class Provenance { Exact, Estimated };

struct FeatureExpectations {
    Vec values;
    Provenance provenance = Provenance::Exact;
    int n_traj = 0;
    std::optional<Box> confidence_box;

    FeatureExpectations() = default;
    explicit FeatureExpectations(Vec v) : values(std::move(v)) {}
};

struct Trajectory {
    std::vector<std::pair<int, int>> steps;
    int horizon() const { return static_cast<int>(steps.size()); }
};

// Discounted state-action occupancy, length S*A, total mass 1/(1-gamma).
Vec occupancy_measure(const TabularCMDP& m, const Policy& pi);

FeatureExpectations feature_expectations(const TabularCMDP& m, const Policy& pi);

double evaluate(const TabularCMDP& m, const Policy& pi, const LinearObjective& obj);

// Per-pair values F * w.
Vec pair_values(const TabularCMDP& m, const Vec& weights);

struct CmdpSolution {
    Policy policy;
    LpSolution<double> lp;
    Vec occupancy;
    double value = 0.0;
};

// Occupancy-measure LP. Throws Infeasible if the constraints admit no policy.
CmdpSolution solve_cmdp(const TabularCMDP& m, const LinearObjective& reward,
                        const std::vector<LinearObjective>& constraints);

// Policy from an occupancy vector; zero-mass states act uniformly.
Policy policy_from_occupancy(const TabularCMDP& m, const Vec& mu);

struct ValueIterationResult {
    Vec V;       // S
    Mat Q;       // S x A
    Policy greedy;  // deterministic, ties to the lowest action
};

// Unconstrained optimum for a per-pair reward vector (length S*A).
ValueIterationResult value_iteration(const TabularCMDP& m, const Vec& pair_reward, double tol = 1e-12,
                                     int max_iter = 100000);

// Smallest H with gamma^H <= 1e-6 * (1 - gamma); 1 when gamma == 0.
int default_horizon(double gamma);

Trajectory rollout(const TabularCMDP& m, const Policy& pi, int horizon, Rng& rng);

FeatureExpectations estimate_feature_expectations(const std::vector<Trajectory>& trajectories,
                                                  const TabularCMDP& m, double gamma);

// Half-width sqrt(d log(2d/delta) / (2 n (1-gamma))), clipped to the
// feasible coordinate range [0, 1/(1-gamma)].
double confidence_half_width(int d, int n_traj, double delta, double gamma);
Box confidence_boxes(const FeatureExpectations& estimate, double delta, double gamma);

// Text serialization with %.17g numbers; load(save(m)) reproduces m exactly.
void save_cmdp(std::ostream& os, const TabularCMDP& m);
TabularCMDP load_cmdp(std::istream& is);

}  // namespace cocorl
