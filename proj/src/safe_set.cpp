#include "cocorl/safe_set.hpp"

#include <algorithm>
#include <limits>

#include "cocorl/errors.hpp"
#include "cocorl/solvers/lp.hpp"

namespace cocorl {

SafeSet build_safe_set(const std::vector<FeatureExpectations>& demos, int n_points, double d_stop, Rng& rng,
                       const HullOptions& hull) {
    if (demos.empty()) throw InvalidArgument("build_safe_set: no demonstrations");
    if (!(d_stop >= 0.0)) throw InvalidArgument("build_safe_set: d_stop must be non-negative");
    const auto k = static_cast<int>(demos.size());
    if (n_points < 0) n_points = std::min(k, 50);

    std::vector<std::size_t> pool(demos.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::size_t next_pos = pick(rng);

    SafeSet out;
    out.stop_distance_used = d_stop;
    std::vector<Vec> chosen;
    double d_next = std::numeric_limits<double>::infinity();
    int i = 0;
    // The seed is always taken, so d_stop = inf still yields one point.
    bool seed = true;
    while (seed || (i <= n_points && !pool.empty() && d_next > d_stop)) {
        seed = false;
        const std::size_t idx = pool[next_pos];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(next_pos));
        out.selected.push_back(demos[idx]);
        out.selected_indices.push_back(idx);
        chosen.push_back(demos[idx].values);
        ++i;
        if (pool.empty()) break;
        std::vector<Vec> candidates;
        candidates.reserve(pool.size());
        for (std::size_t p : pool) candidates.push_back(demos[p].values);
        const auto fp = furthest_point(candidates, chosen);
        next_pos = fp.index;
        d_next = fp.distance;
    }
    out.pool_remaining = pool.size();
    // The hull of the selected points is only needed once: every distance
    // query above runs against the vertex list directly.
    out.polytope = convex_hull(chosen, hull);
    return out;
}

SafeSet build_safe_set(const std::vector<FeatureExpectations>& demos, Rng& rng) {
    return build_safe_set(demos, -1, 1e-6, rng);
}

InferredConstraints inferred_cmdp(const SafeSet& safe_set) {
    InferredConstraints out;
    const Polytope& p = safe_set.polytope;
    out.constraints.reserve(static_cast<std::size_t>(p.A.rows()));
    for (Eigen::Index j = 0; j < p.A.rows(); ++j) out.constraints.emplace_back(p.A.row(j).transpose(), p.b(j));
    return out;
}

CmdpSolution solve_for_reward(const TabularCMDP& m, const SafeSet& safe_set, const LinearObjective& r_eval) {
    if (safe_set.polytope.dim() != m.dim()) throw InvalidArgument("solve_for_reward: feature dimension mismatch");
    return solve_cmdp(m, r_eval, inferred_cmdp(safe_set).constraints);
}

PointSolution solve_for_reward(const Polytope& safe_polytope, const Vec& theta) {
    if (safe_polytope.dim() != theta.size()) throw InvalidArgument("solve_for_reward: dimension mismatch");
    if (safe_polytope.empty) throw Infeasible("solve_for_reward: empty safe set");
    LinearProgram<double> lp(theta.size());
    for (Eigen::Index j = 0; j < theta.size(); ++j) lp.set_free(j);
    lp.objective = theta;
    lp.ineq_lhs = safe_polytope.A;
    lp.ineq_rhs = safe_polytope.b;
    const auto sol = solve_lp(lp);
    if (sol.status == LpStatus::Infeasible) throw Infeasible("solve_for_reward: empty safe set");
    if (sol.status == LpStatus::Unbounded) throw NumericalFailure("solve_for_reward: safe set is unbounded");
    return {sol.point, sol.objective_value};
}

bool unsafe_set_membership(const std::vector<FeatureExpectations>& demos, const Vec& x, double alpha_min) {
    if (demos.size() < 2) throw InvalidArgument("unsafe_set_membership: need at least two demonstrations");
    const auto k = static_cast<Eigen::Index>(demos.size());
    const Eigen::Index d = x.size();
    for (Eigen::Index i = 0; i < k; ++i) {
        const Vec& fi = demos[static_cast<std::size_t>(i)].values;
        if (fi.size() != d) throw InvalidArgument("unsafe_set_membership: dimension mismatch");
        // max t  s.t.  sum_{j != i} alpha_j (f_i - f_j) = x - f_i,  alpha_j >= t,  t <= 1.
        // Comparing t* against alpha_min keeps the decision away from the
        // LP's own feasibility tolerance.
        LinearProgram<double> lp(k);
        lp.set_free(k - 1);
        lp.upper(k - 1) = 1.0;
        lp.objective = Vec::Unit(k, k - 1);
        Mat eq = Mat::Zero(d, k);
        for (Eigen::Index j = 0, c = 0; j < k; ++j) {
            if (j == i) continue;
            eq.col(c) = fi - demos[static_cast<std::size_t>(j)].values;
            Vec row = Vec::Zero(k);
            row(c) = -1.0;
            row(k - 1) = 1.0;
            lp.add_inequality(row, 0.0);
            ++c;
        }
        lp.eq_lhs = eq;
        lp.eq_rhs = x - fi;
        const auto sol = solve_lp(lp);
        if (sol.optimal() && sol.objective_value >= alpha_min) return true;
    }
    return false;
}

double regret(const TabularCMDP& m, const std::vector<LinearObjective>& true_constraints, const SafeSet& safe_set,
              const LinearObjective& r_eval) {
    const double best = solve_cmdp(m, r_eval, true_constraints).value;
    const double ours = solve_for_reward(m, safe_set, r_eval).value;
    return best - ours;
}

}  // namespace cocorl
