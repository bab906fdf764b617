#include "cocorl/cmdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "cocorl/errors.hpp"

namespace cocorl {

void TabularCMDP::validate() const {
    if (n_states <= 0 || n_actions <= 0) throw InvalidArgument("cmdp: empty state or action space");
    const int sa = n_pairs();
    if (transitions.rows() != sa || transitions.cols() != n_states)
        throw InvalidArgument("cmdp: transitions must be (S*A) x S");
    if (initial_dist.size() != n_states) throw InvalidArgument("cmdp: initial distribution length");
    if (features.rows() != sa) throw InvalidArgument("cmdp: features must have S*A rows");
    if (!(discount >= 0.0 && discount < 1.0)) throw InvalidArgument("cmdp: discount must lie in [0, 1)");
    if (!transitions.allFinite() || !features.allFinite() || !initial_dist.allFinite())
        throw InvalidArgument("cmdp: non-finite entry");
    if (transitions.minCoeff() < 0.0 || transitions.maxCoeff() > 1.0)
        throw InvalidArgument("cmdp: transition probability outside [0, 1]");
    for (int i = 0; i < sa; ++i)
        if (std::abs(transitions.row(i).sum() - 1.0) > 1e-12)
            throw InvalidArgument("cmdp: transition row " + std::to_string(i) + " does not sum to 1");
    if (initial_dist.minCoeff() < 0.0 || std::abs(initial_dist.sum() - 1.0) > 1e-12)
        throw InvalidArgument("cmdp: initial distribution is not a distribution");
    if (features.size() > 0 && (features.minCoeff() < 0.0 || features.maxCoeff() > 1.0))
        throw InvalidArgument("cmdp: feature entries must lie in [0, 1]");
}

Policy Policy::uniform(int n_states, int n_actions) {
    return Policy{Mat::Constant(n_states, n_actions, 1.0 / n_actions)};
}

Policy Policy::deterministic(const std::vector<int>& actions, int n_actions) {
    Policy p{Mat::Zero(static_cast<Eigen::Index>(actions.size()), n_actions)};
    for (std::size_t s = 0; s < actions.size(); ++s) p.probs(static_cast<Eigen::Index>(s), actions[s]) = 1.0;
    return p;
}

bool Policy::is_deterministic(double tol) const {
    for (Eigen::Index s = 0; s < probs.rows(); ++s)
        if (probs.row(s).maxCoeff() < 1.0 - tol) return false;
    return true;
}

namespace {

void check_policy(const TabularCMDP& m, const Policy& pi) {
    if (pi.probs.rows() != m.n_states || pi.probs.cols() != m.n_actions)
        throw InvalidArgument("policy shape does not match the CMDP");
    for (int s = 0; s < m.n_states; ++s)
        if (std::abs(pi.probs.row(s).sum() - 1.0) > 1e-9 || pi.probs.row(s).minCoeff() < 0.0)
            throw InvalidArgument("policy row " + std::to_string(s) + " is not a distribution");
}

// State-to-state kernel under pi: P_pi(s, s') = sum_a pi(a|s) P(s'|s,a).
Mat state_kernel(const TabularCMDP& m, const Policy& pi) {
    Mat k = Mat::Zero(m.n_states, m.n_states);
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a)
            if (pi.probs(s, a) != 0.0) k.row(s) += pi.probs(s, a) * m.transitions.row(m.pair(s, a));
    return k;
}

}  // namespace

Vec occupancy_measure(const TabularCMDP& m, const Policy& pi) {
    check_policy(m, pi);
    const Mat k = state_kernel(m, pi);
    // nu = mu0 + gamma * P_pi^T nu
    const Mat lhs = Mat::Identity(m.n_states, m.n_states) - m.discount * k.transpose();
    const Vec nu = lhs.partialPivLu().solve(m.initial_dist);
    Vec mu(m.n_pairs());
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a) mu(m.pair(s, a)) = nu(s) * pi.probs(s, a);
    return mu;
}

FeatureExpectations feature_expectations(const TabularCMDP& m, const Policy& pi) {
    return FeatureExpectations(m.features.transpose() * occupancy_measure(m, pi));
}

double evaluate(const TabularCMDP& m, const Policy& pi, const LinearObjective& obj) {
    if (obj.weights.size() != m.dim()) throw InvalidArgument("evaluate: weight length does not match features");
    return obj.weights.dot(feature_expectations(m, pi).values);
}

Vec pair_values(const TabularCMDP& m, const Vec& weights) {
    if (weights.size() != m.dim()) throw InvalidArgument("pair_values: weight length does not match features");
    return m.features * weights;
}

Policy policy_from_occupancy(const TabularCMDP& m, const Vec& mu) {
    Policy pi{Mat::Zero(m.n_states, m.n_actions)};
    for (int s = 0; s < m.n_states; ++s) {
        double mass = 0.0;
        for (int a = 0; a < m.n_actions; ++a) mass += std::max(0.0, mu(m.pair(s, a)));
        if (mass <= 1e-14) {
            pi.probs.row(s).setConstant(1.0 / m.n_actions);
            continue;
        }
        for (int a = 0; a < m.n_actions; ++a) pi.probs(s, a) = std::max(0.0, mu(m.pair(s, a))) / mass;
    }
    return pi;
}

CmdpSolution solve_cmdp(const TabularCMDP& m, const LinearObjective& reward,
                        const std::vector<LinearObjective>& constraints) {
    const int sa = m.n_pairs();
    LinearProgram<double> lp(sa);
    lp.objective = pair_values(m, reward.weights);
    // Flow: sum_a mu(s',a) - gamma sum_{s,a} P(s'|s,a) mu(s,a) = mu0(s')
    Mat flow = -m.discount * m.transitions.transpose();
    for (int s = 0; s < m.n_states; ++s)
        for (int a = 0; a < m.n_actions; ++a) flow(s, m.pair(s, a)) += 1.0;
    lp.eq_lhs = flow;
    lp.eq_rhs = m.initial_dist;
    lp.ineq_lhs.resize(static_cast<Eigen::Index>(constraints.size()), sa);
    lp.ineq_rhs.resize(static_cast<Eigen::Index>(constraints.size()));
    for (std::size_t j = 0; j < constraints.size(); ++j) {
        if (!constraints[j].threshold) throw InvalidArgument("solve_cmdp: constraint without threshold");
        lp.ineq_lhs.row(static_cast<Eigen::Index>(j)) = pair_values(m, constraints[j].weights).transpose();
        lp.ineq_rhs(static_cast<Eigen::Index>(j)) = *constraints[j].threshold;
    }
    CmdpSolution out;
    out.lp = solve_lp(lp);
    if (out.lp.status == LpStatus::Infeasible) throw Infeasible("solve_cmdp: no policy satisfies the constraints");
    if (out.lp.status != LpStatus::Optimal) throw NumericalFailure("solve_cmdp: occupancy LP reported unbounded");
    out.occupancy = out.lp.point;
    out.policy = policy_from_occupancy(m, out.occupancy);
    out.value = out.lp.objective_value;
    return out;
}

ValueIterationResult value_iteration(const TabularCMDP& m, const Vec& pair_reward, double tol, int max_iter) {
    if (pair_reward.size() != m.n_pairs()) throw InvalidArgument("value_iteration: reward length must be S*A");
    ValueIterationResult r;
    r.V = Vec::Zero(m.n_states);
    r.Q = Mat::Zero(m.n_states, m.n_actions);
    for (int it = 0; it < max_iter; ++it) {
        const Vec next = m.transitions * r.V;  // S*A
        for (int s = 0; s < m.n_states; ++s)
            for (int a = 0; a < m.n_actions; ++a)
                r.Q(s, a) = pair_reward(m.pair(s, a)) + m.discount * next(m.pair(s, a));
        const Vec v_new = r.Q.rowwise().maxCoeff();
        const double delta = (v_new - r.V).cwiseAbs().maxCoeff();
        r.V = v_new;
        if (delta <= tol * (1.0 - m.discount) || m.discount == 0.0) break;
        if (it + 1 == max_iter) throw NumericalFailure("value_iteration: no convergence");
    }
    std::vector<int> greedy(static_cast<std::size_t>(m.n_states));
    for (int s = 0; s < m.n_states; ++s) {
        int best = 0;
        for (int a = 1; a < m.n_actions; ++a)
            if (r.Q(s, a) > r.Q(s, best) + 1e-12) best = a;
        greedy[static_cast<std::size_t>(s)] = best;
    }
    r.greedy = Policy::deterministic(greedy, m.n_actions);
    return r;
}

int default_horizon(double gamma) {
    if (gamma <= 0.0) return 1;
    return static_cast<int>(std::ceil(std::log(1e-6 * (1.0 - gamma)) / std::log(gamma)));
}

namespace {

int sample_index(const Eigen::Ref<const Eigen::RowVectorXd>& probs, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng);
    double acc = 0.0;
    int last = 0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        if (probs(i) <= 0.0) continue;
        last = static_cast<int>(i);
        acc += probs(i);
        if (x < acc) return last;
    }
    return last;
}

}  // namespace

Trajectory rollout(const TabularCMDP& m, const Policy& pi, int horizon, Rng& rng) {
    if (horizon < 1) throw InvalidArgument("rollout: horizon must be at least 1");
    Trajectory t;
    t.steps.reserve(static_cast<std::size_t>(horizon));
    int s = sample_index(m.initial_dist.transpose(), rng);
    for (int h = 0; h < horizon; ++h) {
        const int a = sample_index(pi.probs.row(s), rng);
        t.steps.emplace_back(s, a);
        s = sample_index(m.transitions.row(m.pair(s, a)), rng);
    }
    return t;
}

FeatureExpectations estimate_feature_expectations(const std::vector<Trajectory>& trajectories,
                                                  const TabularCMDP& m, double gamma) {
    if (trajectories.empty()) throw InvalidArgument("estimate_feature_expectations: no trajectories");
    Vec sum = Vec::Zero(m.dim());
    for (const auto& t : trajectories) {
        double disc = 1.0;
        for (const auto& [s, a] : t.steps) {
            if (s < 0 || s >= m.n_states || a < 0 || a >= m.n_actions)
                throw InvalidArgument("estimate_feature_expectations: index out of range");
            sum += disc * m.features.row(m.pair(s, a)).transpose();
            disc *= gamma;
        }
    }
    FeatureExpectations fe(sum / static_cast<double>(trajectories.size()));
    fe.provenance = Provenance::Estimated;
    fe.n_traj = static_cast<int>(trajectories.size());
    return fe;
}

double confidence_half_width(int d, int n_traj, double delta, double gamma) {
    if (n_traj < 1) throw InvalidArgument("confidence_half_width: need at least one trajectory");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("confidence_half_width: delta must lie in (0, 1)");
    const double bound = 1.0 / (1.0 - gamma);
    const double eps = std::sqrt(d * std::log(2.0 * d / delta) / (2.0 * n_traj * (1.0 - gamma)));
    return std::clamp(eps, 0.0, bound);
}

Box confidence_boxes(const FeatureExpectations& estimate, double delta, double gamma) {
    if (estimate.provenance != Provenance::Estimated)
        throw InvalidArgument("confidence_boxes: estimate must come from trajectories");
    const auto d = static_cast<int>(estimate.values.size());
    const double eps = confidence_half_width(d, estimate.n_traj, delta, gamma);
    const double bound = 1.0 / (1.0 - gamma);
    Vec lo = (estimate.values.array() - eps).max(0.0).min(bound);
    Vec hi = (estimate.values.array() + eps).max(0.0).min(bound);
    return Box(lo, hi);
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_row(std::ostream& os, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    for (Eigen::Index j = 0; j < row.size(); ++j) os << (j ? " " : "") << fmt(row(j));
    os << '\n';
}

void expect(std::istream& is, const std::string& word) {
    std::string tok;
    if (!(is >> tok) || tok != word) throw InvalidArgument("load_cmdp: expected '" + word + "', got '" + tok + "'");
}

double read_number(std::istream& is) {
    std::string tok;
    if (!(is >> tok)) throw InvalidArgument("load_cmdp: unexpected end of input");
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw InvalidArgument("load_cmdp: malformed number '" + tok + "'");
    return v;
}

}  // namespace

void save_cmdp(std::ostream& os, const TabularCMDP& m) {
    os << "cmdp 1\n";
    os << "n_states " << m.n_states << "\n";
    os << "n_actions " << m.n_actions << "\n";
    os << "dim " << m.dim() << "\n";
    os << "gamma " << fmt(m.discount) << "\n";
    os << "mu0\n";
    write_row(os, m.initial_dist.transpose());
    os << "transitions\n";
    for (int i = 0; i < m.n_pairs(); ++i) write_row(os, m.transitions.row(i));
    os << "features\n";
    for (int i = 0; i < m.n_pairs(); ++i) write_row(os, m.features.row(i));
    os << "end\n";
}

TabularCMDP load_cmdp(std::istream& is) {
    TabularCMDP m;
    expect(is, "cmdp");
    if (read_number(is) != 1.0) throw InvalidArgument("load_cmdp: unsupported version");
    expect(is, "n_states");
    m.n_states = static_cast<int>(read_number(is));
    expect(is, "n_actions");
    m.n_actions = static_cast<int>(read_number(is));
    expect(is, "dim");
    const int d = static_cast<int>(read_number(is));
    expect(is, "gamma");
    m.discount = read_number(is);
    if (m.n_states <= 0 || m.n_actions <= 0 || d < 0) throw InvalidArgument("load_cmdp: bad sizes");
    expect(is, "mu0");
    m.initial_dist.resize(m.n_states);
    for (int s = 0; s < m.n_states; ++s) m.initial_dist(s) = read_number(is);
    expect(is, "transitions");
    m.transitions.resize(m.n_pairs(), m.n_states);
    for (int i = 0; i < m.n_pairs(); ++i)
        for (int s = 0; s < m.n_states; ++s) m.transitions(i, s) = read_number(is);
    expect(is, "features");
    m.features.resize(m.n_pairs(), d);
    for (int i = 0; i < m.n_pairs(); ++i)
        for (int j = 0; j < d; ++j) m.features(i, j) = read_number(is);
    expect(is, "end");
    m.validate();
    return m;
}

}  // namespace cocorl
