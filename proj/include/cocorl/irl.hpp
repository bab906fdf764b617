#pragma once

// IRL baselines that learn a reward plus (optionally) a shared penalty from
// demonstrations and then act by solving an unconstrained MDP.

#include <vector>

#include "cocorl/cmdp.hpp"

namespace cocorl {

enum class IrlVariant { Average, SharedReward, KnownReward };
enum class IrlEngine { MaxMargin, MaxEntropy };

struct IrlResult {
    std::vector<Vec> per_demo_rewards;  // theta_i, length d
    Vec shared_penalty;                 // phi / c, length d; empty for Average
    IrlVariant variant = IrlVariant::Average;
    IrlEngine engine = IrlEngine::MaxMargin;
    std::vector<double> margins;  // max-margin only: optimal sum of zeta per expert
    bool rationalizable = true;   // false when the hard-margin LP was infeasible
};

// Parameter space of max-margin rewards. NextState: a state reward r (length
// S) received on arrival, i.e. pair reward P r. Features: pair reward F w.
enum class RewardBasis { NextState, Features };

struct MaxMarginOptions {
    RewardBasis basis = RewardBasis::NextState;
    double support_tol = 1e-9;  // actions with pi(a|s) above this are in the support
};

// Pair reward (length S*A) expressed in feature weights (length d). Exact when
// the pair reward lies in the column space of the features, least squares
// otherwise.
Vec pair_reward_to_weights(const TabularCMDP& m, const Vec& pair_reward);

// Maximizes sum_s zeta_s subject to 0 <= zeta_s <= V(s) - Q(s,a) for actions
// outside the expert's support, V(s) - Q(s,a) >= 0 on the support, and
// |w|_inf <= 1. Returns feature weights.
Vec max_margin_irl(const TabularCMDP& m, const Policy& expert, const MaxMarginOptions& opt = {});

// One reward per expert (Average variant): independent LPs.
IrlResult max_margin_average(const TabularCMDP& m, const std::vector<Policy>& experts,
                             const MaxMarginOptions& opt = {});

// Joint LP over per-expert rewards r_i and a shared penalty c, expert i acting
// on r_i + c.
IrlResult max_margin_shared(const TabularCMDP& m, const std::vector<Policy>& experts,
                            const MaxMarginOptions& opt = {});

// LP over a shared penalty c only, expert i acting on known_i + c. If no c
// keeps every expert optimal, the support constraints are softened into
// margins (rationalizable = false).
IrlResult max_margin_known(const TabularCMDP& m, const std::vector<Policy>& experts,
                           const std::vector<LinearObjective>& known_rewards, const MaxMarginOptions& opt = {});

struct SoftPolicy {
    Policy policy;
    Vec V;  // S
};

// Soft (log-sum-exp) value iteration at temperature 1.
SoftPolicy soft_value_iteration(const TabularCMDP& m, const Vec& pair_reward, double tol = 1e-8,
                                int max_iter = 100000, const Vec* warm_start = nullptr);

struct MaxEntConfig {
    double alpha_theta = 0.05;
    double alpha_phi = 0.05;
    int sweeps = 500;      // round-robin passes over the demos
    double tol = 1e-6;     // stop when a full sweep moves no parameter by more
};

// Round-robin gradient steps theta_i += a_theta g, phi += a_phi g with
// g = f_i - f(pi_hat), pi_hat the soft-optimal policy for theta_i + phi.
// alpha_phi == 0 is Average, alpha_theta == 0 is KnownReward (theta0 holds
// the known rewards), both positive is SharedReward.
IrlResult max_entropy_irl(const TabularCMDP& m, const std::vector<FeatureExpectations>& demos,
                          const MaxEntConfig& cfg, const std::vector<Vec>& theta0, const Vec& phi0);

// Reward the IRL agent optimizes for r_eval: r_eval + phi for SharedReward and
// KnownReward, r_eval + mean(theta_i) for Average.
LinearObjective apply_irl_constraints(const IrlResult& result, const LinearObjective& r_eval);

}  // namespace cocorl
