#include <doctest.h>

#include <cmath>

#include "cocorl/envs.hpp"
#include "cocorl/errors.hpp"
#include "cocorl/irl.hpp"

using namespace cocorl;

namespace {

// Iterative policy evaluation, independent of the LU-based evaluators.
Vec policy_values(const TabularCMDP& m, const Policy& pi, const Vec& g) {
    Vec v = Vec::Zero(m.n_states);
    for (int it = 0; it < 5000; ++it) {
        const Vec q = g + m.discount * m.transitions * v;
        Vec next(m.n_states);
        for (int s = 0; s < m.n_states; ++s) next(s) = pi.probs.row(s).dot(q.segment(s * m.n_actions, m.n_actions));
        const double delta = (next - v).cwiseAbs().maxCoeff();
        v = next;
        if (delta < 1e-15) break;
    }
    return v;
}

// Smallest V(s) - Q(s,a) over all pairs, expert acting on pair reward g.
double min_advantage(const TabularCMDP& m, const Policy& pi, const Vec& g) {
    const Vec v = policy_values(m, pi, g);
    const Vec q = g + m.discount * m.transitions * v;
    double lo = 1e300;
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a) lo = std::min(lo, v(s) - q(m.pair(s, a)));
    return lo;
}

// Occupancy by summing discounted state distributions.
Vec occupancy_by_series(const TabularCMDP& m, const Policy& pi) {
    Vec d = m.initial_dist;
    Vec mu = Vec::Zero(m.n_pairs());
    double scale = 1.0;
    for (int t = 0; t < 3000 && scale > 1e-17; ++t) {
        Vec next = Vec::Zero(m.n_states);
        for (int s = 0; s < m.n_states; ++s)
            for (int a = 0; a < m.n_actions; ++a) {
                const double w = d(s) * pi.probs(s, a);
                mu(m.pair(s, a)) += scale * w;
                next += w * m.transitions.row(m.pair(s, a)).transpose();
            }
        d = next;
        scale *= m.discount;
    }
    return mu;
}

TabularCMDP random_mdp(int S, int A, int d, double gamma, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TabularCMDP m;
    m.n_states = S;
    m.n_actions = A;
    m.discount = gamma;
    m.transitions.resize(S * A, S);
    for (int r = 0; r < S * A; ++r) {
        for (int s = 0; s < S; ++s) m.transitions(r, s) = u(rng);
        m.transitions.row(r) /= m.transitions.row(r).sum();
    }
    m.initial_dist = Vec::Constant(S, 1.0 / S);
    m.features.resize(S * A, d);
    for (int r = 0; r < S * A; ++r)
        for (int j = 0; j < d; ++j) m.features(r, j) = u(rng);
    return m;
}

}  // namespace

TEST_CASE("max-margin: expert of a known reward stays optimal") {
    Rng rng(1);
    for (int t = 0; t < 5; ++t) {
        const auto g = gen_gridworld(GridworldSpec{}, rng);
        const auto r = sample_reward(g, rng);
        const auto expert = value_iteration(g.cmdp, pair_values(g.cmdp, r.weights)).greedy;
        for (auto basis : {RewardBasis::NextState, RewardBasis::Features}) {
            MaxMarginOptions opt;
            opt.basis = basis;
            const Vec w = max_margin_irl(g.cmdp, expert, opt);
            CHECK(w.cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
            const Vec gr = pair_values(g.cmdp, w);
            CHECK(min_advantage(g.cmdp, expert, gr) >= -1e-6);
            // Re-solve: the optimum under the learned reward is worth no more
            // than the expert.
            const auto vi = value_iteration(g.cmdp, gr);
            CHECK(g.cmdp.initial_dist.dot(vi.V) <=
                  g.cmdp.initial_dist.dot(policy_values(g.cmdp, expert, gr)) + 1e-6);
        }
    }
}

TEST_CASE("max-margin: uniform expert gets equal action values") {
    const auto c = prop1_cmdp();
    MaxMarginOptions opt;
    opt.basis = RewardBasis::Features;
    const Vec w = max_margin_irl(c.cmdp, Policy::uniform(1, 2), opt);
    CHECK(std::abs(w(0) - w(1)) < 1e-9);
}

TEST_CASE("max-margin average: margins are nonnegative and rewards boxed") {
    Rng rng(2);
    const auto g = gen_gridworld(GridworldSpec{}, rng);
    std::vector<Policy> experts;
    for (int i = 0; i < 3; ++i) experts.push_back(solve_cmdp(g.cmdp, sample_reward(g, rng), g.constraints).policy);
    const auto res = max_margin_average(g.cmdp, experts);
    CHECK(res.variant == IrlVariant::Average);
    CHECK(res.per_demo_rewards.size() == 3);
    CHECK(res.shared_penalty.size() == 0);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(res.margins[i] >= -1e-9);
        CHECK(res.per_demo_rewards[i].cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
        CHECK(min_advantage(g.cmdp, experts[i], pair_values(g.cmdp, res.per_demo_rewards[i])) >= -1e-6);
    }
}

TEST_CASE("max-margin shared: each expert optimal for r_i + c") {
    Rng rng(3);
    const auto g = gen_gridworld(GridworldSpec{}, rng);
    std::vector<Policy> experts;
    for (int i = 0; i < 2; ++i) experts.push_back(solve_cmdp(g.cmdp, sample_reward(g, rng), g.constraints).policy);
    const auto res = max_margin_shared(g.cmdp, experts);
    CHECK(res.variant == IrlVariant::SharedReward);
    REQUIRE(res.shared_penalty.size() == 45);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(res.margins[i] >= -1e-9);
        const Vec gr = pair_values(g.cmdp, res.per_demo_rewards[i] + res.shared_penalty);
        CHECK(min_advantage(g.cmdp, experts[i], gr) >= -1e-6);
    }
    // k = 1 reduces to the single-expert problem.
    const auto one = max_margin_shared(g.cmdp, {experts[0]});
    const Vec single = max_margin_irl(g.cmdp, experts[0]);
    const auto solo = max_margin_average(g.cmdp, {experts[0]});
    CHECK(one.margins[0] >= solo.margins[0] - 1e-7);
    CHECK(min_advantage(g.cmdp, experts[0], pair_values(g.cmdp, one.per_demo_rewards[0] + one.shared_penalty)) >= -1e-6);
    CHECK(min_advantage(g.cmdp, experts[0], pair_values(g.cmdp, single)) >= -1e-6);
}

TEST_CASE("counterexample: shared and known-reward max-margin") {
    const auto c = prop1_cmdp(true);
    const auto uniform = Policy::uniform(1, 2);
    const std::vector<Policy> experts = {uniform, uniform};
    for (auto basis : {RewardBasis::NextState, RewardBasis::Features}) {
        MaxMarginOptions opt;
        opt.basis = basis;
        const auto sr = max_margin_shared(c.cmdp, experts, opt);
        CHECK_FALSE((sr.margins[0] > 1e-9 && sr.margins[1] > 1e-9));

        const auto kr = max_margin_known(c.cmdp, experts, c.known_rewards, opt);
        CHECK_FALSE(kr.rationalizable);
        CHECK(kr.margins[0] + kr.margins[1] == doctest::Approx(-0.5).epsilon(1e-9));

        // Downstream: an unconstrained optimum is deterministic and unsafe by 1/2.
        for (const auto& r : c.known_rewards) {
            const auto composite = apply_irl_constraints(kr, r);
            const auto pi = value_iteration(c.cmdp, pair_values(c.cmdp, composite.weights)).greedy;
            CHECK(pi.is_deterministic());
            double excess = 0.0;
            for (const auto& con : c.constraints) excess = std::max(excess, evaluate(c.cmdp, pi, con) - *con.threshold);
            CHECK(std::abs(excess - 0.5) <= 1e-9);
        }
    }
}

TEST_CASE("max-margin known: unconstrained-optimal experts admit c = 0") {
    Rng rng(4);
    const auto g = gen_gridworld(GridworldSpec{}, rng);
    std::vector<Policy> experts;
    std::vector<LinearObjective> known;
    for (int i = 0; i < 3; ++i) {
        known.push_back(sample_reward(g, rng));
        experts.push_back(value_iteration(g.cmdp, pair_values(g.cmdp, known.back().weights)).greedy);
    }
    const auto res = max_margin_known(g.cmdp, experts, known);
    CHECK(res.rationalizable);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(res.margins[i] >= -1e-9);
        const Vec gr = pair_values(g.cmdp, known[i].weights + res.shared_penalty);
        CHECK(min_advantage(g.cmdp, experts[i], gr) >= -1e-6);
    }
}

TEST_CASE("max-margin known: LP optimum matches a grid search over c") {
    Rng rng(5);
    int compared = 0;
    for (int t = 0; t < 4; ++t) {
        const auto m = random_mdp(2, 2, 2, 0.5, rng);
        std::vector<LinearObjective> known;
        std::vector<Policy> experts;
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        Vec c_true(2);
        c_true << 0.5 * u(rng), 0.5 * u(rng);
        for (int i = 0; i < 2; ++i) {
            Vec w(2);
            w << u(rng), u(rng);
            known.emplace_back(w);
            experts.push_back(value_iteration(m, m.features * (w + c_true)).greedy);
        }
        MaxMarginOptions opt;
        opt.basis = RewardBasis::Features;
        const auto res = max_margin_known(m, experts, known, opt);
        if (!res.rationalizable) continue;
        const double lp_value = res.margins[0] + res.margins[1];

        // Objective on a grid: infeasible if a support action has negative
        // advantage, else the sum over states of the smallest off-support
        // advantage.
        double best = -1e300;
        const int n = 200;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                Vec c(2);
                c << -1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n;
                double total = 0.0;
                bool ok = true;
                for (std::size_t e = 0; e < 2 && ok; ++e) {
                    const Vec gr = m.features * (known[e].weights + c);
                    const Vec v = policy_values(m, experts[e], gr);
                    const Vec q = gr + m.discount * m.transitions * v;
                    for (int s = 0; s < 2; ++s) {
                        double zeta = 1e300;
                        for (int a = 0; a < 2; ++a) {
                            const double adv = v(s) - q(m.pair(s, a));
                            ok = ok && adv >= -1e-12;
                            if (experts[e].probs(s, a) == 0) zeta = std::min(zeta, adv);
                        }
                        if (zeta < 1e300) total += zeta;
                    }
                }
                if (ok) best = std::max(best, total);
            }
        if (best == -1e300) continue;
        ++compared;
        CHECK(lp_value >= best - 1e-9);
        CHECK(lp_value - best <= 0.1);
    }
    CHECK(compared > 0);
}

TEST_CASE("max-margin: argument checks") {
    const auto c = prop1_cmdp(true);
    CHECK_THROWS_AS(max_margin_average(c.cmdp, {}), InvalidArgument);
    CHECK_THROWS_AS(max_margin_known(c.cmdp, {Policy::uniform(1, 2)}, {}), InvalidArgument);
    CHECK_THROWS_AS(max_margin_irl(c.cmdp, Policy::uniform(2, 2)), InvalidArgument);
}

TEST_CASE("soft value iteration satisfies the soft Bellman equation") {
    Rng rng(6);
    const auto m = random_mdp(4, 3, 2, 0.8, rng);
    Vec g(12);
    for (int i = 0; i < 12; ++i) g(i) = std::sin(i);
    const auto sp = soft_value_iteration(m, g);
    const Vec q = g + m.discount * m.transitions * sp.V;
    for (int s = 0; s < 4; ++s) {
        double z = 0.0;
        for (int a = 0; a < 3; ++a) z += std::exp(q(s * 3 + a));
        CHECK(sp.V(s) == doctest::Approx(std::log(z)).epsilon(1e-7));
        for (int a = 0; a < 3; ++a) CHECK(sp.policy.probs(s, a) == doctest::Approx(std::exp(q(s * 3 + a)) / z));
    }
}

TEST_CASE("max-entropy: fixed point and zero learning rates") {
    Rng rng(7);
    const auto g = gen_gridworld(GridworldSpec{}, rng);
    const Vec theta0 = sample_reward(g, rng).weights;
    const Vec phi0 = Vec::Zero(45);
    const auto sp = soft_value_iteration(g.cmdp, pair_values(g.cmdp, theta0), 1e-12);
    std::vector<FeatureExpectations> demos = {feature_expectations(g.cmdp, sp.policy)};
    MaxEntConfig cfg;
    cfg.sweeps = 3;
    const auto fixed = max_entropy_irl(g.cmdp, demos, cfg, {theta0}, phi0);
    CHECK((fixed.per_demo_rewards[0] - theta0).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(fixed.shared_penalty.cwiseAbs().maxCoeff() < 1e-6);

    cfg.alpha_theta = 0.0;
    cfg.alpha_phi = 0.0;
    const auto frozen = max_entropy_irl(g.cmdp, {feature_expectations(g.cmdp, Policy::uniform(9, 5))}, cfg,
                                        {theta0}, phi0);
    CHECK(frozen.per_demo_rewards[0] == theta0);
}

TEST_CASE("max-entropy: gradient matches independently computed occupancies") {
    Rng rng(8);
    const auto m = random_mdp(3, 2, 6, 0.7, rng);
    const Vec theta0 = Vec::Constant(6, 0.1);
    FeatureExpectations demo(m.features.transpose() * occupancy_by_series(m, Policy::deterministic({0, 1, 0}, 2)));
    MaxEntConfig cfg;
    cfg.alpha_theta = 1.0;
    cfg.alpha_phi = 0.0;
    cfg.sweeps = 1;
    const auto res = max_entropy_irl(m, {demo}, cfg, {theta0}, Vec::Zero(6));
    const auto sp = soft_value_iteration(m, m.features * theta0);
    const Vec expected = theta0 + demo.values - m.features.transpose() * occupancy_by_series(m, sp.policy);
    CHECK((res.per_demo_rewards[0] - expected).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(res.variant == IrlVariant::Average);
}

TEST_CASE("max-entropy: variants follow the learning rates") {
    Rng rng(9);
    const auto m = random_mdp(3, 2, 6, 0.7, rng);
    std::vector<FeatureExpectations> demos = {feature_expectations(m, Policy::deterministic({0, 1, 0}, 2)),
                                              feature_expectations(m, Policy::deterministic({1, 1, 0}, 2))};
    std::vector<Vec> theta0(2, Vec::Zero(6));
    MaxEntConfig cfg;
    cfg.sweeps = 5;
    CHECK(max_entropy_irl(m, demos, cfg, theta0, Vec::Zero(6)).variant == IrlVariant::SharedReward);
    cfg.alpha_theta = 0.0;
    const auto known = max_entropy_irl(m, demos, cfg, theta0, Vec::Zero(6));
    CHECK(known.variant == IrlVariant::KnownReward);
    CHECK(known.per_demo_rewards[1] == theta0[1]);
    CHECK(known.shared_penalty.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("max-entropy: feature matching on a gridworld") {
    Rng rng(10);
    const auto g = gen_gridworld(GridworldSpec{}, rng);
    const auto expert = solve_cmdp(g.cmdp, sample_reward(g, rng), g.constraints).policy;
    const auto demo = feature_expectations(g.cmdp, expert);
    MaxEntConfig cfg;
    cfg.alpha_phi = 0.0;
    cfg.alpha_theta = 0.5;
    cfg.sweeps = 300;
    const Vec zero = Vec::Zero(45);
    const double before = (feature_expectations(g.cmdp, soft_value_iteration(g.cmdp, zero).policy).values -
                           demo.values).norm();
    const auto res = max_entropy_irl(g.cmdp, {demo}, cfg, {zero}, zero);
    const auto sp = soft_value_iteration(g.cmdp, pair_values(g.cmdp, res.per_demo_rewards[0]));
    const double after = (feature_expectations(g.cmdp, sp.policy).values - demo.values).norm();
    CHECK(after < before);
    CHECK(after < 0.05 * 45 / (1 - 0.9));
}

TEST_CASE("apply_irl_constraints") {
    IrlResult shared;
    shared.variant = IrlVariant::SharedReward;
    shared.shared_penalty = Vec::Zero(3);
    const LinearObjective r(Vec::LinSpaced(3, 0.0, 1.0));
    CHECK(apply_irl_constraints(shared, r).weights == r.weights);

    IrlResult avg;
    avg.variant = IrlVariant::Average;
    const Vec theta = Vec::Constant(3, 0.25);
    avg.per_demo_rewards = {theta, theta, theta};
    CHECK((apply_irl_constraints(avg, r).weights - (r.weights + theta)).cwiseAbs().maxCoeff() < 1e-15);

    shared.shared_penalty = Vec::Zero(2);
    CHECK_THROWS_AS(apply_irl_constraints(shared, r), InvalidArgument);
}
