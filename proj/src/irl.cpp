#include "cocorl/irl.hpp"

#include <cmath>

#include "cocorl/errors.hpp"
#include "cocorl/solvers/lp.hpp"

namespace cocorl {

namespace {

// R_pi: S x SA, row s holds pi(.|s) on the pairs of s.
Mat policy_matrix(const TabularCMDP& m, const Policy& pi) {
    Mat r = Mat::Zero(m.n_states, m.n_pairs());
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a) r(s, m.pair(s, a)) = pi.probs(s, a);
    return r;
}

// Advantage operator: for a pair reward g, (M g)(s,a) = V(s) - Q(s,a) under
// the expert's policy, with V = (I - gamma P_pi)^{-1} R_pi g and
// Q = g + gamma P V.
Mat advantage_operator(const TabularCMDP& m, const Policy& pi) {
    const Mat rp = policy_matrix(m, pi);
    const Mat p_pi = rp * m.transitions;
    const Mat v_op = (Mat::Identity(m.n_states, m.n_states) - m.discount * p_pi).partialPivLu().solve(rp);
    Mat e = Mat::Zero(m.n_pairs(), m.n_states);
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a) e(m.pair(s, a), s) = 1.0;
    return (e - m.discount * m.transitions) * v_op - Mat::Identity(m.n_pairs(), m.n_pairs());
}

Mat basis_matrix(const TabularCMDP& m, RewardBasis basis) {
    return basis == RewardBasis::NextState ? m.transitions : m.features;
}

void check_experts(const TabularCMDP& m, const std::vector<Policy>& experts) {
    if (experts.empty()) throw InvalidArgument("max-margin IRL: no experts");
    for (const auto& pi : experts)
        if (pi.probs.rows() != m.n_states || pi.probs.cols() != m.n_actions)
            throw InvalidArgument("max-margin IRL: policy shape mismatch");
}

// One expert's rows in a joint LP. `blocks` lists (first variable, basis) for
// every reward parameter block the expert acts on; `known` is a fixed pair
// reward (possibly zero). Adds zeta variables as needed starting at
// `next_zeta`, recording them in `zetas`.
struct ExpertRows {
    const Mat* adv;
    std::vector<std::pair<Eigen::Index, const Mat*>> blocks;
    Vec known;
};

struct MarginLp {
    LinearProgram<double> lp;
    std::vector<std::vector<Eigen::Index>> zetas;  // per expert
};

MarginLp build_margin_lp(const TabularCMDP& m, const std::vector<ExpertRows>& experts,
                         const std::vector<Policy>& policies, Eigen::Index n_params, bool soft, double support_tol) {
    // Count zeta variables first: one per (expert, state) with a margin row.
    std::vector<std::vector<bool>> needs(experts.size(), std::vector<bool>(static_cast<std::size_t>(m.n_states)));
    Eigen::Index n_zeta = 0;
    for (std::size_t i = 0; i < experts.size(); ++i)
        for (int s = 0; s < m.n_states; ++s) {
            bool any = soft;
            for (int a = 0; a < m.n_actions && !any; ++a) any = policies[i].probs(s, a) <= support_tol;
            needs[i][static_cast<std::size_t>(s)] = any;
            n_zeta += any;
        }

    MarginLp out{LinearProgram<double>(n_params + n_zeta), {}};
    auto& lp = out.lp;
    lp.lower.head(n_params).setConstant(-1.0);
    lp.upper.head(n_params).setConstant(1.0);
    // Hard mode keeps zeta >= 0, so every action is weakly worse than the
    // expert's; soft mode lets margins go negative.
    if (soft)
        for (Eigen::Index j = n_params; j < n_params + n_zeta; ++j) lp.set_free(j);

    const Eigen::Index n = n_params + n_zeta;
    Eigen::Index next_zeta = n_params;
    std::size_t total_rows = experts.size() * static_cast<std::size_t>(m.n_pairs());
    lp.ineq_lhs = Mat::Zero(static_cast<Eigen::Index>(total_rows), n);
    lp.ineq_rhs = Vec::Zero(static_cast<Eigen::Index>(total_rows));
    Eigen::Index row = 0;
    for (std::size_t i = 0; i < experts.size(); ++i) {
        const Mat& adv = *experts[i].adv;
        const Vec adv_known = adv * experts[i].known;
        std::vector<Mat> adv_blocks;
        for (const auto& blk : experts[i].blocks) adv_blocks.push_back(adv * *blk.second);
        std::vector<Eigen::Index> z(static_cast<std::size_t>(m.n_states), -1);
        for (int s = 0; s < m.n_states; ++s)
            if (needs[i][static_cast<std::size_t>(s)]) {
                z[static_cast<std::size_t>(s)] = next_zeta++;
                lp.objective(z[static_cast<std::size_t>(s)]) = 1.0;
            }
        for (int s = 0; s < m.n_states; ++s)
            for (int a = 0; a < m.n_actions; ++a) {
                const int p = m.pair(s, a);
                // -adv(p) <= 0 on the support, zeta_s - adv(p) <= 0 otherwise.
                for (std::size_t b = 0; b < adv_blocks.size(); ++b) {
                    const auto& blk = experts[i].blocks[b];
                    lp.ineq_lhs.row(row).segment(blk.first, blk.second->cols()) -= adv_blocks[b].row(p);
                }
                lp.ineq_rhs(row) = adv_known(p);
                const bool support = policies[i].probs(s, a) > support_tol;
                if (soft || !support) lp.ineq_lhs(row, z[static_cast<std::size_t>(s)]) = 1.0;
                ++row;
            }
        out.zetas.push_back(z);
    }
    return out;
}

std::vector<double> expert_margins(const MarginLp& lp, const Vec& x) {
    std::vector<double> out;
    for (const auto& z : lp.zetas) {
        double sum = 0.0;
        for (Eigen::Index j : z)
            if (j >= 0) sum += x(j);
        out.push_back(sum);
    }
    return out;
}

Vec lift(const TabularCMDP& m, RewardBasis basis, const Vec& w) {
    if (basis == RewardBasis::Features) return w;
    return pair_reward_to_weights(m, m.transitions * w);
}

Vec solve_margin_lp(const MarginLp& lp) {
    const auto sol = solve_lp(lp.lp);
    if (sol.status == LpStatus::Unbounded) throw NumericalFailure("max-margin IRL: unbounded LP");
    if (sol.status != LpStatus::Optimal) throw Infeasible("max-margin IRL: infeasible LP");
    return sol.point;
}

}  // namespace

Vec pair_reward_to_weights(const TabularCMDP& m, const Vec& pair_reward) {
    if (pair_reward.size() != m.n_pairs()) throw InvalidArgument("pair_reward_to_weights: length mismatch");
    if (m.features.rows() == m.features.cols() && m.features.isIdentity(0.0)) return pair_reward;
    return m.features.completeOrthogonalDecomposition().solve(pair_reward);
}

Vec max_margin_irl(const TabularCMDP& m, const Policy& expert, const MaxMarginOptions& opt) {
    check_experts(m, {expert});
    const Mat adv = advantage_operator(m, expert);
    const Mat b = basis_matrix(m, opt.basis);
    const ExpertRows rows{&adv, {{0, &b}}, Vec::Zero(m.n_pairs())};
    const auto lp = build_margin_lp(m, {rows}, {expert}, b.cols(), false, opt.support_tol);
    const Vec x = solve_margin_lp(lp);
    return lift(m, opt.basis, x.head(b.cols()));
}

IrlResult max_margin_average(const TabularCMDP& m, const std::vector<Policy>& experts, const MaxMarginOptions& opt) {
    check_experts(m, experts);
    IrlResult out;
    out.variant = IrlVariant::Average;
    out.engine = IrlEngine::MaxMargin;
    const Mat b = basis_matrix(m, opt.basis);
    for (const auto& pi : experts) {
        const Mat adv = advantage_operator(m, pi);
        const ExpertRows rows{&adv, {{0, &b}}, Vec::Zero(m.n_pairs())};
        const auto lp = build_margin_lp(m, {rows}, {pi}, b.cols(), false, opt.support_tol);
        const Vec x = solve_margin_lp(lp);
        out.per_demo_rewards.push_back(lift(m, opt.basis, x.head(b.cols())));
        out.margins.push_back(expert_margins(lp, x).front());
    }
    return out;
}

IrlResult max_margin_shared(const TabularCMDP& m, const std::vector<Policy>& experts, const MaxMarginOptions& opt) {
    check_experts(m, experts);
    const Mat b = basis_matrix(m, opt.basis);
    const Eigen::Index p = b.cols();
    const auto k = static_cast<Eigen::Index>(experts.size());
    // Layout: r_1 .. r_k, then c.
    std::vector<Mat> advs;
    for (const auto& pi : experts) advs.push_back(advantage_operator(m, pi));
    std::vector<ExpertRows> rows;
    for (Eigen::Index i = 0; i < k; ++i)
        rows.push_back({&advs[static_cast<std::size_t>(i)], {{i * p, &b}, {k * p, &b}}, Vec::Zero(m.n_pairs())});
    const auto lp = build_margin_lp(m, rows, experts, (k + 1) * p, false, opt.support_tol);
    const Vec x = solve_margin_lp(lp);

    IrlResult out;
    out.variant = IrlVariant::SharedReward;
    out.engine = IrlEngine::MaxMargin;
    for (Eigen::Index i = 0; i < k; ++i) out.per_demo_rewards.push_back(lift(m, opt.basis, x.segment(i * p, p)));
    out.shared_penalty = lift(m, opt.basis, x.segment(k * p, p));
    out.margins = expert_margins(lp, x);
    return out;
}

IrlResult max_margin_known(const TabularCMDP& m, const std::vector<Policy>& experts,
                           const std::vector<LinearObjective>& known_rewards, const MaxMarginOptions& opt) {
    check_experts(m, experts);
    if (known_rewards.size() != experts.size())
        throw InvalidArgument("max_margin_known: one known reward per expert required");
    const Mat b = basis_matrix(m, opt.basis);
    std::vector<Mat> advs;
    for (const auto& pi : experts) advs.push_back(advantage_operator(m, pi));
    std::vector<ExpertRows> rows;
    for (std::size_t i = 0; i < experts.size(); ++i)
        rows.push_back({&advs[i], {{0, &b}}, pair_values(m, known_rewards[i].weights)});

    IrlResult out;
    out.variant = IrlVariant::KnownReward;
    out.engine = IrlEngine::MaxMargin;
    auto lp = build_margin_lp(m, rows, experts, b.cols(), false, opt.support_tol);
    auto sol = solve_lp(lp.lp);
    if (sol.status == LpStatus::Infeasible) {
        out.rationalizable = false;
        lp = build_margin_lp(m, rows, experts, b.cols(), true, opt.support_tol);
        sol = solve_lp(lp.lp);
    }
    if (!sol.optimal()) throw NumericalFailure("max_margin_known: LP did not reach an optimum");
    for (const auto& r : known_rewards) out.per_demo_rewards.push_back(r.weights);
    out.shared_penalty = lift(m, opt.basis, sol.point.head(b.cols()));
    out.margins = expert_margins(lp, sol.point);
    return out;
}

SoftPolicy soft_value_iteration(const TabularCMDP& m, const Vec& pair_reward, double tol, int max_iter,
                                const Vec* warm_start) {
    if (pair_reward.size() != m.n_pairs()) throw InvalidArgument("soft_value_iteration: reward length mismatch");
    const int S = m.n_states, A = m.n_actions;
    Vec v = warm_start ? *warm_start : Vec::Zero(S);
    Vec q(m.n_pairs());
    for (int it = 0; it < max_iter; ++it) {
        q = pair_reward + m.discount * m.transitions * v;
        Vec next(S);
        for (int s = 0; s < S; ++s) {
            const auto qs = q.segment(s * A, A);
            const double mx = qs.maxCoeff();
            next(s) = mx + std::log((qs.array() - mx).exp().sum());
        }
        if (!next.allFinite()) throw NumericalFailure("soft_value_iteration: diverged");
        const double delta = (next - v).cwiseAbs().maxCoeff();
        v = next;
        if (delta < tol) break;
    }
    q = pair_reward + m.discount * m.transitions * v;
    SoftPolicy out;
    out.V = v;
    out.policy.probs.resize(S, A);
    for (int s = 0; s < S; ++s) {
        const auto qs = q.segment(s * A, A);
        const Eigen::ArrayXd w = (qs.array() - qs.maxCoeff()).exp();
        out.policy.probs.row(s) = (w / w.sum()).transpose();
    }
    return out;
}

IrlResult max_entropy_irl(const TabularCMDP& m, const std::vector<FeatureExpectations>& demos,
                          const MaxEntConfig& cfg, const std::vector<Vec>& theta0, const Vec& phi0) {
    if (demos.empty()) throw InvalidArgument("max_entropy_irl: no demonstrations");
    if (cfg.sweeps < 1) throw InvalidArgument("max_entropy_irl: sweeps must be at least 1");
    if (theta0.size() != demos.size()) throw InvalidArgument("max_entropy_irl: one theta0 per demo required");
    if (phi0.size() != m.dim()) throw InvalidArgument("max_entropy_irl: phi0 dimension mismatch");

    IrlResult out;
    out.engine = IrlEngine::MaxEntropy;
    if (cfg.alpha_phi == 0.0) out.variant = IrlVariant::Average;
    else if (cfg.alpha_theta == 0.0) out.variant = IrlVariant::KnownReward;
    else out.variant = IrlVariant::SharedReward;

    std::vector<Vec> theta = theta0;
    Vec phi = phi0;
    std::vector<Vec> warm(demos.size(), Vec::Zero(m.n_states));
    for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
        double moved = 0.0;
        for (std::size_t i = 0; i < demos.size(); ++i) {
            const auto soft = soft_value_iteration(m, pair_values(m, theta[i] + phi), 1e-8, 100000, &warm[i]);
            warm[i] = soft.V;
            const Vec grad = demos[i].values - feature_expectations(m, soft.policy).values;
            theta[i] += cfg.alpha_theta * grad;
            phi += cfg.alpha_phi * grad;
            moved = std::max(moved, std::max(cfg.alpha_theta, cfg.alpha_phi) * grad.cwiseAbs().maxCoeff());
        }
        if (moved < cfg.tol) break;
    }
    out.per_demo_rewards = theta;
    if (out.variant != IrlVariant::Average) out.shared_penalty = phi;
    return out;
}

LinearObjective apply_irl_constraints(const IrlResult& result, const LinearObjective& r_eval) {
    Vec w = r_eval.weights;
    if (result.variant == IrlVariant::Average) {
        if (result.per_demo_rewards.empty()) return LinearObjective(w);
        Vec mean = Vec::Zero(w.size());
        for (const auto& t : result.per_demo_rewards) mean += t;
        w += mean / static_cast<double>(result.per_demo_rewards.size());
    } else {
        if (result.shared_penalty.size() != w.size())
            throw InvalidArgument("apply_irl_constraints: penalty dimension mismatch");
        w += result.shared_penalty;
    }
    return LinearObjective(w);
}

}  // namespace cocorl
