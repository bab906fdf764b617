#include "cocorl/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cocorl/errors.hpp"
#include "cocorl/solvers/lp.hpp"
#include "cocorl/solvers/svd.hpp"

namespace cocorl {

namespace {

constexpr int kGridActions = 5;

int move(int N, int cell, int action) {
    int r = cell / N, c = cell % N;
    switch (action) {
        case Left: c = std::max(0, c - 1); break;
        case Right: c = std::min(N - 1, c + 1); break;
        case Up: r = std::max(0, r - 1); break;
        case Down: r = std::min(N - 1, r + 1); break;
        default: break;
    }
    return r * N + c;
}

std::vector<int> sample_cells(int n_cells, int count, const std::vector<int>& exclude, Rng& rng) {
    std::vector<int> pool;
    for (int c = 0; c < n_cells; ++c)
        if (std::find(exclude.begin(), exclude.end(), c) == exclude.end()) pool.push_back(c);
    if (static_cast<int>(pool.size()) < count) throw InvalidArgument("gridworld: not enough free cells");
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(static_cast<std::size_t>(count));
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace

Mat gridworld_transitions(int N, double slip_p) {
    const int S = N * N;
    Mat p = Mat::Zero(S * kGridActions, S);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < kGridActions; ++a) {
            const int row = s * kGridActions + a;
            p(row, move(N, s, a)) += 1.0 - slip_p;
            for (int b = 0; b < kGridActions; ++b) p(row, move(N, s, b)) += slip_p / kGridActions;
        }
    return p;
}

Gridworld gen_gridworld(const GridworldSpec& spec, Rng& rng) {
    const int S = spec.N * spec.N;
    if (spec.N < 1 || spec.n_goal < 0 || spec.n_limited < 0 || spec.n_goal + spec.n_limited > S)
        throw InvalidArgument("gen_gridworld: invalid layout");
    if (!(spec.slip_p >= 0.0 && spec.slip_p <= 1.0)) throw InvalidArgument("gen_gridworld: slip_p outside [0, 1]");
    if (spec.n_constraints < 0) throw InvalidArgument("gen_gridworld: negative constraint count");

    Gridworld g;
    g.spec = spec;
    g.cmdp.n_states = S;
    g.cmdp.n_actions = kGridActions;
    g.cmdp.discount = spec.gamma;
    g.cmdp.transitions = gridworld_transitions(spec.N, spec.slip_p);
    g.cmdp.initial_dist = Vec::Constant(S, 1.0 / S);
    g.cmdp.features = Mat::Identity(S * kGridActions, S * kGridActions);
    g.cmdp.validate();

    g.goal_cells = sample_cells(S, spec.n_goal, {}, rng);
    g.limited_cells = sample_cells(S, spec.n_limited, g.goal_cells, rng);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec> costs;
    for (int j = 0; j < spec.n_constraints; ++j) {
        Vec w = Vec::Zero(S * kGridActions);
        for (int cell : g.limited_cells) w.segment(cell * kGridActions, kGridActions).setConstant(unit(rng));
        costs.push_back(w);
    }

    const LinearObjective zero(Vec::Zero(S * kGridActions));
    for (int attempt = 0; attempt < spec.max_rejections; ++attempt) {
        g.constraints.clear();
        for (const auto& w : costs) g.constraints.emplace_back(w, spec.threshold_max * unit(rng));
        try {
            solve_cmdp(g.cmdp, zero, g.constraints);
            return g;
        } catch (const Infeasible&) {
        }
    }
    throw GenerationFailure("gen_gridworld: no feasible thresholds after rejection sampling");
}

Gridworld with_slip(const Gridworld& g, double slip_p) {
    Gridworld out = g;
    out.spec.slip_p = slip_p;
    out.cmdp.transitions = gridworld_transitions(g.spec.N, slip_p);
    return out;
}

LinearObjective sample_reward(const Gridworld& g, Rng& rng, const std::optional<std::vector<int>>& goals) {
    const std::vector<int>& goal_set = goals ? *goals : g.goal_cells;
    const int S = g.cmdp.n_states;
    std::normal_distribution<double> noise(0.0, g.spec.reward_std);
    Vec w(S * kGridActions);
    for (int s = 0; s < S; ++s) {
        const bool goal = std::find(goal_set.begin(), goal_set.end(), s) != goal_set.end();
        const double r = (goal ? 1.0 : 0.0) + (g.spec.reward_std > 0.0 ? noise(rng) : 0.0);
        w.segment(s * kGridActions, kGridActions).setConstant(r);
    }
    return LinearObjective(w);
}

std::vector<int> sample_new_goals(const Gridworld& g, Rng& rng) {
    const int S = g.cmdp.n_states;
    const int free_cells = S - static_cast<int>(g.limited_cells.size());
    // A different set exists unless every free cell is already a goal.
    const bool can_differ = free_cells > static_cast<int>(g.goal_cells.size());
    for (int attempt = 0; attempt < 1000; ++attempt) {
        auto goals = sample_cells(S, static_cast<int>(g.goal_cells.size()), g.limited_cells, rng);
        if (!can_differ || goals != g.goal_cells) return goals;
    }
    throw GenerationFailure("sample_new_goals: could not draw a different goal set");
}

Mat SingleStateProblem::phi() const {
    Mat p(static_cast<Eigen::Index>(constraints.size()), d);
    for (std::size_t j = 0; j < constraints.size(); ++j) p.row(static_cast<Eigen::Index>(j)) = constraints[j].weights.transpose();
    return p;
}

Vec SingleStateProblem::xi() const {
    Vec x(static_cast<Eigen::Index>(constraints.size()));
    for (std::size_t j = 0; j < constraints.size(); ++j) x(static_cast<Eigen::Index>(j)) = *constraints[j].threshold;
    return x;
}

Vec sample_unit_sphere(int d, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(d);
    do {
        for (int i = 0; i < d; ++i) v(i) = g(rng);
    } while (v.norm() < 1e-12);
    return v.normalized();
}

bool is_bounded(const Mat& A, const Vec& b) {
    // Bounded iff max and min of every coordinate are finite.
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        for (double sign : {1.0, -1.0}) {
            LinearProgram<double> lp(A.cols());
            for (Eigen::Index i = 0; i < A.cols(); ++i) lp.set_free(i);
            lp.ineq_lhs = A;
            lp.ineq_rhs = b;
            lp.objective = sign * Vec::Unit(A.cols(), j);
            if (solve_lp(lp).status != LpStatus::Optimal) return false;
        }
    return true;
}

SingleStateProblem gen_single_state(int d, int n, Rng& rng, bool require_bounded) {
    if (d < 1 || n < 1) throw InvalidArgument("gen_single_state: d and n must be positive");
    for (int attempt = 0; attempt < 10000; ++attempt) {
        SingleStateProblem p;
        p.d = d;
        for (int j = 0; j < n; ++j) p.constraints.emplace_back(sample_unit_sphere(d, rng), 1.0);
        if (!require_bounded || is_bounded(p.phi(), p.xi())) return p;
    }
    throw GenerationFailure("gen_single_state: no bounded constraint set found");
}

SingleStateSolution solve_single_state(const SingleStateProblem& p, const Vec& theta) {
    if (theta.size() != p.d) throw InvalidArgument("solve_single_state: dimension mismatch");
    LinearProgram<double> lp(p.d);
    for (int i = 0; i < p.d; ++i) lp.set_free(i);
    lp.ineq_lhs = p.phi();
    lp.ineq_rhs = p.xi();
    lp.objective = theta;
    const auto sol = solve_lp(lp);
    if (sol.status == LpStatus::Unbounded) throw NumericalFailure("solve_single_state: unbounded problem");
    if (sol.status != LpStatus::Optimal) throw Infeasible("solve_single_state: infeasible");
    return {sol.point, sol.objective_value};
}

CounterexampleCMDP prop1_cmdp(bool with_known_rewards) {
    CounterexampleCMDP c;
    c.cmdp.n_states = 1;
    c.cmdp.n_actions = 2;
    c.cmdp.discount = 0.0;
    c.cmdp.transitions = Mat::Ones(2, 1);
    c.cmdp.initial_dist = Vec::Ones(1);
    c.cmdp.features = Mat::Identity(2, 2);
    c.constraints = {LinearObjective(Vec::Unit(2, 0), 0.5), LinearObjective(Vec::Unit(2, 1), 0.5)};
    if (with_known_rewards) {
        Vec r1(2), r2(2);
        r1 << 1.0, 1.0;
        r2 << 0.0, 1.0;
        c.known_rewards = {LinearObjective(r1), LinearObjective(r2)};
    }
    return c;
}

BoltzmannOccupancySampler::BoltzmannOccupancySampler(const TabularCMDP& m,
                                                     const std::vector<LinearObjective>& constraints) {
    const int sa = m.n_pairs();
    if (sa > 20) throw InvalidArgument("BoltzmannOccupancySampler: limited to at most 20 state-action pairs");
    Mat flow = -m.discount * m.transitions.transpose();
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a) flow(s, m.pair(s, a)) += 1.0;

    const auto n_con = static_cast<Eigen::Index>(constraints.size());
    ineq_.resize(sa + n_con, sa);
    ineq_rhs_.resize(sa + n_con);
    ineq_.topRows(sa) = -Mat::Identity(sa, sa);
    ineq_rhs_.head(sa).setZero();
    for (Eigen::Index j = 0; j < n_con; ++j) {
        ineq_.row(sa + j) = pair_values(m, constraints[static_cast<std::size_t>(j)].weights).transpose();
        ineq_rhs_(sa + j) = *constraints[static_cast<std::size_t>(j)].threshold;
    }

    // Interior point: maximize the smallest slack t (capped at 1).
    LinearProgram<double> lp(sa + 1);
    lp.set_free(sa);
    lp.upper(sa) = 1.0;
    lp.objective = Vec::Unit(sa + 1, sa);
    lp.eq_lhs = Mat::Zero(m.n_states, sa + 1);
    lp.eq_lhs.leftCols(sa) = flow;
    lp.eq_rhs = m.initial_dist;
    lp.ineq_lhs.resize(ineq_.rows(), sa + 1);
    lp.ineq_lhs.leftCols(sa) = ineq_;
    lp.ineq_lhs.col(sa).setOnes();
    lp.ineq_rhs = ineq_rhs_;
    const auto sol = solve_lp(lp);
    if (!sol.optimal()) throw Infeasible("BoltzmannOccupancySampler: constraints admit no policy");
    center_ = sol.point.head(sa);
    degenerate_ = sol.point(sa) <= 1e-9;

    const auto s = svd<double>(flow);
    const Eigen::Index rank = s.rank();
    null_basis_ = s.V.rightCols(sa - rank);
}

std::vector<Vec> BoltzmannOccupancySampler::sample(const Vec& pair_reward, double beta, int count, int burn_in,
                                                   int thinning, Rng& rng) const {
    if (count < 1 || burn_in < 0 || thinning < 1) throw InvalidArgument("BoltzmannOccupancySampler: bad schedule");
    std::vector<Vec> out;
    if (degenerate_ || null_basis_.cols() == 0) {
        out.assign(static_cast<std::size_t>(count), center_);
        return out;
    }
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec mu = center_;
    const int total = burn_in + (count - 1) * thinning + 1;
    int collapsed = 0;
    for (int step = 1; step <= total; ++step) {
        Vec z(null_basis_.cols());
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = g(rng);
        const Vec dir = null_basis_ * z.normalized();
        const Vec slack = ineq_rhs_ - ineq_ * mu;
        const Vec rate = ineq_ * dir;
        double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < rate.size(); ++i) {
            const double sl = std::max(0.0, slack(i));
            if (rate(i) > 1e-14) hi = std::min(hi, sl / rate(i));
            else if (rate(i) < -1e-14) lo = std::max(lo, sl / rate(i));
        }
        if (!std::isfinite(lo) || !std::isfinite(hi)) throw GenerationFailure("Boltzmann sampler: unbounded chord");
        const double len = hi - lo;
        if (len <= 1e-14) {
            if (++collapsed > total / 2) throw GenerationFailure("Boltzmann sampler: chords collapsed");
        } else {
            const double lambda = beta * pair_reward.dot(dir);
            const double x = u(rng);
            double t;
            if (std::abs(lambda * len) < 1e-12) {
                t = lo + x * len;
            } else {
                // Exponential density truncated to the chord, sampled from the
                // end where it is largest.
                const double a = std::abs(lambda);
                const double s = -std::log1p(-x * (-std::expm1(-a * len))) / a;
                t = lambda > 0 ? hi - s : lo + s;
            }
            mu += t * dir;
        }
        if (step > burn_in && (step - burn_in - 1) % thinning == 0) out.push_back(mu.cwiseMax(0.0));
    }
    return out;
}

std::vector<Demo> gen_demos(const TabularCMDP& m, const std::vector<LinearObjective>& constraints,
                            const DemoSpec& spec, const RewardSampler& reward_sampler, Rng& rng) {
    if (spec.k < 1) throw InvalidArgument("gen_demos: k must be at least 1");
    if (spec.mode == DemoMode::Boltzmann && !(spec.beta > 0.0))
        throw InvalidArgument("gen_demos: beta must be positive");
    std::optional<BoltzmannOccupancySampler> sampler;
    if (spec.mode == DemoMode::Boltzmann) sampler.emplace(m, constraints);

    std::vector<Demo> demos;
    for (int i = 0; i < spec.k; ++i) {
        Demo demo;
        demo.reward = reward_sampler(rng);
        if (spec.mode == DemoMode::ExactOptimal) {
            demo.policy = solve_cmdp(m, demo.reward, constraints).policy;
        } else {
            const Vec mu = sampler->sample(pair_values(m, demo.reward.weights), spec.beta, 1, spec.burn_in,
                                           spec.thinning, rng)
                               .front();
            demo.policy = policy_from_occupancy(m, mu);
        }
        demo.features = feature_expectations(m, demo.policy);
        for (const auto& c : constraints)
            if (c.weights.dot(demo.features.values) > *c.threshold + 1e-9)
                throw GenerationFailure("gen_demos: demonstration violates a true constraint");
        demos.push_back(std::move(demo));
    }
    return demos;
}

}  // namespace cocorl
