// Acceptance run: one PASS/FAIL line per criterion, details indented below.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>

#include "cocorl/bounds.hpp"
#include "cocorl/errors.hpp"
#include "cocorl/experiment.hpp"
#include "cocorl/safe_set.hpp"
#include "cocorl/solvers/lp.hpp"

using namespace cocorl;

namespace {

struct Outcome {
    bool pass = false;
    std::vector<std::string> details;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::vector<double> ranks(const std::vector<double>& x) {
    std::vector<std::size_t> idx(x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        for (std::size_t t = i; t <= j; ++t) r[idx[t]] = 0.5 * static_cast<double>(i + j) + 1.0;
        i = j + 1;
    }
    return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    const auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) mx += rx[i] / n, my += ry[i] / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

// P(X >= x) for X ~ Binomial(n, p).
double binomial_upper_tail(int n, int x, double p) {
    double tail = 0.0;
    for (int i = x; i <= n; ++i)
        tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * std::log(p) +
                         (n - i) * std::log1p(-p));
    return tail;
}

Vec random_vec(Eigen::Index d, Rng& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = u(rng);
    return v;
}

// Vertices of {x : Ax <= b} by intersecting every d-subset of facets.
std::size_t enumerate_vertices(const Mat& A, const Vec& b) {
    const int n = static_cast<int>(A.rows()), d = static_cast<int>(A.cols());
    std::vector<Vec> found;
    std::vector<bool> mask(static_cast<std::size_t>(n), false);
    std::fill(mask.begin(), mask.begin() + d, true);
    do {
        Mat sub(d, d);
        Vec rhs(d);
        for (int i = 0, r = 0; i < n; ++i)
            if (mask[static_cast<std::size_t>(i)]) {
                sub.row(r) = A.row(i);
                rhs(r++) = b(i);
            }
        Eigen::FullPivLU<Mat> lu(sub);
        if (lu.rank() < d) continue;
        const Vec x = lu.solve(rhs);
        if (((A * x - b).array() > 1e-9).any()) continue;
        bool dup = false;
        for (const auto& v : found) dup = dup || (v - x).norm() < 1e-7;
        if (!dup) found.push_back(x);
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return found.size();
}

// Convex-combination feasibility LP with relaxed equalities.
bool lp_membership(const std::vector<Vec>& pts, const Vec& x, double tol) {
    const auto k = static_cast<Eigen::Index>(pts.size());
    LinearProgram<double> lp(k);
    for (Eigen::Index r = 0; r < x.size(); ++r) {
        Vec row(k);
        for (Eigen::Index i = 0; i < k; ++i) row(i) = pts[static_cast<std::size_t>(i)](r);
        lp.add_inequality(row, x(r) + tol);
        lp.add_inequality(-row, -x(r) + tol);
    }
    lp.add_equality(Vec::Ones(k), 1.0);
    return solve_lp(lp).status == LpStatus::Optimal;
}

// x is the feature vector of a policy that satisfies every true constraint.
bool in_true_feasible_set(const TabularCMDP& m, const std::vector<LinearObjective>& constraints, const Vec& x) {
    const int sa = m.n_pairs();
    LinearProgram<double> lp(sa);
    Mat flow = -m.discount * m.transitions.transpose();
    for (int p = 0; p < sa; ++p) flow(p / m.n_actions, p) += 1.0;
    lp.eq_lhs.resize(m.n_states + m.dim(), sa);
    lp.eq_lhs << flow, m.features.transpose();
    lp.eq_rhs.resize(m.n_states + m.dim());
    lp.eq_rhs << m.initial_dist, x;
    for (const auto& c : constraints) lp.add_inequality(m.features * c.weights, *c.threshold);
    return solve_lp(lp).status == LpStatus::Optimal;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::uint64_t> seed_range(int n) {
    std::vector<std::uint64_t> s;
    for (int i = 0; i < n; ++i) s.push_back(static_cast<std::uint64_t>(i));
    return s;
}

std::vector<int> k_range(int lo, int hi) {
    std::vector<int> k;
    for (int i = lo; i <= hi; ++i) k.push_back(i);
    return k;
}

// Mean of a metric per (method, k) over rows without errors.
std::map<std::pair<std::string, int>, double> means(const std::vector<ResultRow>& rows, bool violation) {
    std::map<std::pair<std::string, int>, std::pair<double, int>> acc;
    for (const auto& r : rows) {
        if (!r.error.empty()) continue;
        auto& a = acc[{r.method, r.k}];
        a.first += violation ? r.constraint_violation : r.normalized_return;
        a.second += 1;
    }
    std::map<std::pair<std::string, int>, double> out;
    for (const auto& [key, a] : acc) out[key] = a.first / a.second;
    return out;
}

struct Shared {
    int n_seeds = 100;
    std::vector<ResultRow> single_env;  // criterion 1's single-env sweep, reused by 2 and 10
};

Outcome criterion1(Shared& sh) {
    Outcome o;
    o.pass = true;
    const auto t0 = std::chrono::steady_clock::now();
    for (Setting s : {Setting::SingleEnv, Setting::TaskTransfer, Setting::DynamicsTransfer}) {
        const auto ts = std::chrono::steady_clock::now();
        ExperimentConfig cfg;
        cfg.setting = s;
        cfg.methods = {Method::CoCoRL};
        if (s == Setting::SingleEnv) cfg.methods = {Method::CoCoRL, Method::MaxMarginAverage, Method::MaxMarginKnown};
        cfg.k_schedule = k_range(1, 26);
        cfg.seeds = seed_range(sh.n_seeds);
        const auto rows = run_experiment(cfg);
        int n = 0, errors = 0, fallbacks = 0;
        double worst = 0.0;
        for (const auto& r : rows) {
            if (r.method != "cocorl") continue;
            ++n;
            if (!r.error.empty()) {
                ++errors;
                continue;
            }
            fallbacks += r.fallback_used;
            worst = std::max(worst, r.constraint_violation);
        }
        const bool ok = errors == 0 && worst <= 1e-6;
        o.pass = o.pass && ok;
        o.details.push_back(fmt("%s: %d cocorl rows, %d errors, %d fallbacks, max violation %.3g (%.1f s)",
                                to_string(s).c_str(), n, errors, fallbacks, worst, seconds_since(ts)));
        if (s == Setting::SingleEnv) sh.single_env = rows;
    }
    const double total = seconds_since(t0);
    o.details.push_back(fmt("total %.1f s (target < 600 s)", total));
    return o;
}

Outcome criterion2(Shared& sh) {
    Outcome o;
    const auto m = means(sh.single_env, false);
    std::vector<double> ks, vals;
    for (const auto& [key, v] : m)
        if (key.first == "cocorl") ks.push_back(key.second), vals.push_back(v);
    const double rho = spearman(ks, vals);
    const double last = vals.back();
    o.details.push_back(fmt("gridworld single-env: spearman(k, mean return) %.4f (> 0.9), mean at k=%d %.4f (>= 0.95)",
                            rho, static_cast<int>(ks.back()), last));
    o.details.push_back(fmt("  mean at k=1 %.4f, k=5 %.4f, k=10 %.4f", vals[0], vals[4], vals[9]));
    bool ok = rho > 0.9 && last >= 0.95;

    const auto t0 = std::chrono::steady_clock::now();
    for (int d : {2, 3, 4})
        for (int n : {8, 12, 16}) {
            ExperimentConfig cfg;
            cfg.setting = Setting::SingleState;
            cfg.ss_d = d;
            cfg.ss_n = n;
            cfg.k_schedule = {1, 10, 50, 100, 200};
            cfg.seeds = seed_range(std::max(5, sh.n_seeds / 5));
            const auto rows = run_experiment(cfg);
            const auto mm = means(rows, false);
            double worst_viol = 0.0;
            int errors = 0;
            for (const auto& r : rows) {
                errors += !r.error.empty();
                if (r.error.empty()) worst_viol = std::max(worst_viol, r.constraint_violation);
            }
            const double at200 = mm.at({"cocorl", 200});
            std::vector<double> kk, vv;
            for (const auto& [key, v] : mm) kk.push_back(key.second), vv.push_back(v);
            const bool gate = d <= 3;
            if (gate) ok = ok && at200 >= 0.99 && errors == 0;
            o.details.push_back(fmt("single-state d=%d n=%d: mean at k=1 %.4f, k=200 %.4f%s, spearman %.3f, "
                                    "%d errors, max violation %.2g",
                                    d, n, mm.at({"cocorl", 1}), at200, gate ? " (>= 0.99)" : " (not gated)",
                                    spearman(kk, vv), errors, worst_viol));
        }
    o.details.push_back(fmt("single-state sweep %.1f s (target < 900 s)", seconds_since(t0)));
    o.pass = ok;
    return o;
}

Outcome criterion3() {
    Outcome o;
    const auto c = prop1_cmdp(true);
    Rng rng(3);
    // (a)
    double worst_a = 0.0;
    std::vector<LinearObjective> rewards = c.known_rewards;
    for (int i = 0; i < 20; ++i) rewards.emplace_back(random_vec(2, rng, -1.0, 1.0));
    for (const auto& r : rewards) {
        const auto sol = solve_cmdp(c.cmdp, r, c.constraints);
        worst_a = std::max(worst_a, (sol.policy.probs.array() - 0.5).abs().maxCoeff());
    }
    const bool a = worst_a <= 1e-9;
    o.details.push_back(fmt("(a) solve_cmdp on %zu rewards: max |pi - 1/2| = %.2g", rewards.size(), worst_a));

    // (b)
    const auto uniform = Policy::uniform(1, 2);
    const std::vector<Policy> experts = {uniform, uniform};
    std::vector<IrlResult> fits;
    for (auto basis : {RewardBasis::NextState, RewardBasis::Features}) {
        MaxMarginOptions opt;
        opt.basis = basis;
        fits.push_back(max_margin_average(c.cmdp, experts, opt));
        fits.push_back(max_margin_shared(c.cmdp, experts, opt));
        fits.push_back(max_margin_known(c.cmdp, experts, c.known_rewards, opt));
    }
    int checked = 0;
    double worst_b = 0.0;
    auto downstream = [&](const Vec& w) {
        const auto pi = value_iteration(c.cmdp, pair_values(c.cmdp, w)).greedy;
        double excess = 0.0;
        for (const auto& con : c.constraints) excess = std::max(excess, evaluate(c.cmdp, pi, con) - *con.threshold);
        worst_b = std::max(worst_b, std::abs(excess - 0.5));
        ++checked;
    };
    for (const auto& f : fits) {
        for (std::size_t i = 0; i < f.per_demo_rewards.size(); ++i) {
            Vec w = f.per_demo_rewards[i];
            if (f.shared_penalty.size() > 0) w += f.shared_penalty;
            downstream(w);
        }
        for (const auto& r : rewards) downstream(apply_irl_constraints(f, r).weights);
    }
    const bool b = worst_b <= 1e-9;
    o.details.push_back(fmt("(b) %d downstream optima of max-margin rewards: max |excess - 0.5| = %.2g", checked, worst_b));

    // (c)
    bool c_ok = true;
    for (std::size_t i = 0; i < fits.size(); i += 3) {
        const auto& sr = fits[i + 1];
        const auto& kr = fits[i + 2];
        c_ok = c_ok && !(sr.margins[0] > 1e-9 && sr.margins[1] > 1e-9);
        c_ok = c_ok && !(kr.margins[0] > 1e-9 && kr.margins[1] > 1e-9) && !kr.rationalizable;
        o.details.push_back(fmt("(c) %s basis: SR margins %.3g, %.3g; KR with r1/r2 margins %.3g, %.3g (rationalizable=%d)",
                                i == 0 ? "next-state" : "feature", sr.margins[0], sr.margins[1], kr.margins[0],
                                kr.margins[1], kr.rationalizable ? 1 : 0));
    }
    o.pass = a && b && c_ok;
    return o;
}

Outcome criterion4() {
    Outcome o;
    Rng rng(4);
    std::uniform_int_distribution<int> kk(2, 15);
    double worst = 0.0;
    int n = 0;
    while (n < 50) {
        const auto g = gen_gridworld(GridworldSpec{}, rng);
        DemoSpec spec;
        spec.k = kk(rng);
        const auto demos = gen_demos(g.cmdp, g.constraints, spec, [&](Rng& r) { return sample_reward(g, r); }, rng);
        std::vector<FeatureExpectations> f;
        for (const auto& d : demos) f.push_back(d.features);
        const auto s = build_safe_set(f, -1, 0.0, rng);
        const LinearObjective r(random_vec(g.cmdp.dim(), rng, -1.0, 1.0));
        const auto sol = solve_for_reward(g.cmdp, s, r);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& v : s.selected) best = std::max(best, r.weights.dot(v.values));
        worst = std::max(worst, std::abs(sol.value - best));
        ++n;
    }
    o.pass = worst <= 1e-6;
    o.details.push_back(fmt("%d gridworld instances: max |LP value - best vertex| = %.3g (<= 1e-6)", n, worst));
    return o;
}

Outcome criterion5() {
    Outcome o;
    const auto k = sample_bound_exact_fv(0.1, 10.0);
    const auto t = traj_bound_eps_safety(4, 2, 10, 0.05, 0.1, 0.9);
    // Direct formula evaluation.
    const double p = 0.1 / 10.0;
    const auto k_ref = static_cast<std::uint64_t>(std::ceil(std::log(p) / std::log(1.0 - p)));
    const auto t_ref = static_cast<std::uint64_t>(std::floor(4 * std::log(2 * 10 / 0.05) / (2 * 0.01 * 0.1)) + 1);
    o.details.push_back(fmt("sample_bound_exact(0.1, f_v=10) = %llu (459, formula %llu)", (unsigned long long)k,
                            (unsigned long long)k_ref));
    o.details.push_back(fmt("traj_bound_eps_safety(4, 2, 10, 0.05, 0.1, 0.9) = %llu (11983, formula %llu)",
                            (unsigned long long)t, (unsigned long long)t_ref));
    Rng rng(5);
    std::uniform_int_distribution<int> dd(2, 4);
    int checked = 0, exceeded = 0, tight = 0;
    while (checked < 100) {
        const int d = dd(rng);
        std::uniform_int_distribution<int> nn(d + 1, 8);
        const int n = nn(rng);
        Mat A(n, d);
        for (int i = 0; i < n; ++i) A.row(i) = sample_unit_sphere(d, rng).transpose();
        const Vec b = Vec::Ones(n);
        if (!is_bounded(A, b)) continue;
        ++checked;
        const auto v = enumerate_vertices(A, b);
        const auto bound = mcmullen_vertex_bound(d, n);
        exceeded += v > bound;
        tight += v == bound;
    }
    o.details.push_back(fmt("McMullen bound over %d random polytopes (d<=4, n<=8): %d exceeded, %d tight", checked,
                            exceeded, tight));
    o.pass = k == 459 && t == 11983 && k == k_ref && t == t_ref && exceeded == 0;
    return o;
}

Outcome criterion6(int reps) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    GridworldSpec spec;
    spec.N = 2;
    spec.n_goal = 1;
    spec.n_limited = 2;
    spec.n_constraints = 2;
    const int k = 5;
    const double eps = 0.2, delta = 0.1;
    Rng rng(6);
    const auto probe = gen_gridworld(spec, rng);
    const int d = probe.cmdp.dim();
    const auto n_traj = traj_bound_eps_safety(d, spec.n_constraints, k, delta, eps, spec.gamma);
    const int horizon = default_horizon(spec.gamma);
    int events = 0, fallbacks = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < reps; ++rep) {
        std::seed_seq seq{6u, static_cast<unsigned>(rep)};
        Rng r(seq);
        const auto g = gen_gridworld(spec, r);
        DemoSpec ds;
        ds.k = k;
        const auto demos = gen_demos(g.cmdp, g.constraints, ds, [&](Rng& q) { return sample_reward(g, q); }, r);
        std::vector<FeatureExpectations> est;
        for (const auto& dm : demos) {
            std::vector<Trajectory> trajs;
            trajs.reserve(n_traj);
            for (std::uint64_t i = 0; i < n_traj; ++i) trajs.push_back(rollout(g.cmdp, dm.policy, horizon, r));
            est.push_back(estimate_feature_expectations(trajs, g.cmdp, g.cmdp.discount));
        }
        const auto s = build_safe_set(est, -1, 0.0, r);
        const auto reward = sample_reward(g, r);
        try {
            const auto sol = solve_for_reward(g.cmdp, s, reward);
            double excess = -std::numeric_limits<double>::infinity();
            for (const auto& c : g.constraints)
                excess = std::max(excess, evaluate(g.cmdp, sol.policy, c) - *c.threshold);
            worst = std::max(worst, excess);
            events += excess > eps;
        } catch (const Infeasible&) {
            ++fallbacks;
        }
    }
    const double pval = binomial_upper_tail(reps, events, delta);
    o.pass = pval >= 0.01;
    o.details.push_back(fmt("2x2 gridworlds, d=%d, n=%d, k=%d, n_traj=%llu, horizon %d", d, spec.n_constraints, k,
                            (unsigned long long)n_traj, horizon));
    o.details.push_back(fmt("%d/%d repetitions with max_j(J_j - xi_j) > %.1f (rate %.3f, delta %.1f), one-sided "
                            "p-value %.3g (reject below 0.01); %d infeasible fallbacks; worst excess %.3g; %.1f s",
                            events, reps, eps, static_cast<double>(events) / reps, delta, pval, fallbacks, worst,
                            seconds_since(t0)));
    return o;
}

Outcome criterion7() {
    Outcome o;
    Rng rng(7);
    // Zero-width boxes.
    int mismatches = 0, queries = 0;
    for (int inst = 0; inst < 10; ++inst) {
        const int d = 2 + inst % 2;
        std::vector<Vec> centers;
        std::vector<Box> boxes;
        for (int i = 0; i < 6; ++i) {
            centers.push_back(random_vec(d, rng, 0.0, 1.0));
            boxes.emplace_back(centers.back(), centers.back());
        }
        const auto g = guaranteed_hull(boxes);
        const auto h = convex_hull(centers);
        while (queries < 100 * (inst + 1)) {
            const Vec x = random_vec(d, rng, -0.1, 1.1);
            if (std::abs((h.A * x - h.b).maxCoeff()) < 1e-6) continue;  // skip boundary ties
            ++queries;
            mismatches += contains(g, x) != contains(h, x);
        }
    }
    o.details.push_back(fmt("zero-width boxes: %d membership mismatches over %d queries", mismatches, queries));

    // Oversized boxes.
    int nonempty = 0;
    for (int inst = 0; inst < 10; ++inst) {
        std::vector<Box> boxes;
        for (int i = 0; i < 4; ++i) {
            const Vec c = random_vec(2, rng, 0.0, 1.0);
            boxes.emplace_back(c.array() - 5.0, c.array() + 5.0);
        }
        const auto g = guaranteed_hull(boxes);
        nonempty += !g.empty;
    }
    o.details.push_back(fmt("oversized boxes: %d of 10 results non-empty", nonempty));

    // Sampled selections.
    int counterexamples = 0, tested = 0, instances = 0;
    std::uniform_real_distribution<double> u(0, 1);
    std::bernoulli_distribution corner(0.5);
    while (instances < 5) {
        const int d = 2 + instances % 2;
        std::vector<Vec> centers;
        for (int i = 0; i <= d; ++i) centers.push_back(Vec::Unit(d, i % d) * ((i == d) ? 0.0 : 2.0));
        for (auto& c : centers) c += random_vec(d, rng, -0.3, 0.3);
        std::vector<Box> boxes;
        for (const auto& c : centers) boxes.emplace_back(c.array() - 0.1, c.array() + 0.1);
        const auto g = guaranteed_hull(boxes);
        if (g.empty) continue;
        ++instances;
        std::vector<Vec> inside;
        for (int q = 0; q < 50000 && inside.size() < 40; ++q) {
            const Vec x = random_vec(d, rng, -0.5, 2.5);
            if (contains(g, x, 0.0)) inside.push_back(x);
        }
        if (g.vertices)
            for (const auto& v : *g.vertices) inside.push_back(v);
        for (int s = 0; s < 500; ++s) {
            std::vector<Vec> sel;
            for (const auto& b : boxes) {
                Vec x(d);
                for (int j = 0; j < d; ++j) {
                    const double t = (s % 2 == 0) ? (corner(rng) ? 1.0 : 0.0) : u(rng);
                    x(j) = b.lower(j) + t * (b.upper(j) - b.lower(j));
                }
                sel.push_back(x);
            }
            for (const auto& x : inside) {
                ++tested;
                counterexamples += lp_membership(sel, x, 1e-7) ? 0 : 1;
            }
        }
    }
    o.details.push_back(fmt("sampled selections: %d instances x 500 selections, %d point checks, %d counterexamples",
                            instances, tested, counterexamples));
    o.pass = mismatches == 0 && nonempty == 0 && counterexamples == 0;
    return o;
}

Outcome criterion8() {
    Outcome o;
    Rng rng(8);
    int sets = 0, flagged = 0, counterexamples = 0, constraint_violating = 0, self_flags = 0;
    std::uniform_real_distribution<double> u(0.0, 0.5);
    while (sets < 50) {
        const auto g = gen_gridworld(GridworldSpec{}, rng);
        DemoSpec spec;
        spec.k = 6;
        const auto demos = gen_demos(g.cmdp, g.constraints, spec, [&](Rng& r) { return sample_reward(g, r); }, rng);
        std::vector<FeatureExpectations> f;
        for (const auto& d : demos) f.push_back(d.features);
        // Non-degenerate: at least two distinct demos.
        bool distinct = false;
        for (const auto& fi : f) distinct = distinct || (fi.values - f[0].values).norm() > 1e-6;
        if (!distinct) continue;
        ++sets;
        for (const auto& fi : f) self_flags += unsafe_set_membership(f, fi.values);
        for (int q = 0; q < 40; ++q) {
            Vec x;
            if (q % 2 == 0) {
                const std::size_t i = static_cast<std::size_t>(q / 2) % f.size();
                x = f[i].values;
                for (std::size_t j = 0; j < f.size(); ++j)
                    if (j != i) x += u(rng) * (f[i].values - f[j].values);
            } else {
                x = random_vec(g.cmdp.dim(), rng, 0.0, 1.0 / (1.0 - g.cmdp.discount));
            }
            if (!unsafe_set_membership(f, x)) continue;
            ++flagged;
            if (in_true_feasible_set(g.cmdp, g.constraints, x)) ++counterexamples;
            bool violates = false;
            for (const auto& c : g.constraints) violates = violates || c.weights.dot(x) > *c.threshold + 1e-9;
            constraint_violating += violates;
        }
    }
    o.pass = counterexamples == 0 && flagged > 0 && self_flags == 0;
    o.details.push_back(fmt("%d demo sets, %d flagged points, %d inside the true feasible set (counterexamples)", sets,
                            flagged, counterexamples));
    o.details.push_back(fmt("  of the flagged points, %d break a constraint row c_j.x > xi_j; the rest are not "
                            "achievable feature vectors; %d demos flagged themselves",
                            constraint_violating, self_flags));
    return o;
}

Outcome criterion9() {
    Outcome o;
    CemConfig cem;
    cem.n_iter = 200;
    cem.n_samp = 200;
    cem.n_elite = 20;
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto c = compare_cem_lp(3, 4, seed, cem);
        const bool hit = c.ratio >= 0.98 && c.max_violation <= 1e-3;
        ok += hit;
        o.details.push_back(fmt("seed %llu: LP %.5f, CEM %.5f, ratio %.4f, max J_j - xi_j %.2g%s",
                                (unsigned long long)seed, c.lp_value, c.cem_value, c.ratio, c.max_violation,
                                hit ? "" : "  (miss)"));
    }
    o.details.push_back(fmt("%d/5 seeds within 2%% of the LP optimum with violations <= 1e-3", ok));
    o.pass = ok == 5;
    return o;
}

Outcome criterion10(Shared& sh) {
    Outcome o;
    const auto m = means(sh.single_env, true);
    bool any = false;
    for (const char* method : {"mm-average", "mm-known"}) {
        int positive = 0, total = 0;
        double lo = std::numeric_limits<double>::infinity();
        for (const auto& [key, v] : m) {
            if (key.first != method) continue;
            ++total;
            positive += v > 0.0;
            lo = std::min(lo, v);
        }
        any = any || (total > 0 && positive == total);
        o.details.push_back(
            fmt("%s: mean violation > 0 at %d/%d values of k (smallest mean %.3g)", method, positive, total, lo));
    }
    o.pass = any;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria 1-10"};
    std::vector<int> only;
    Shared sh;
    int reps = 500;
    app.add_option("--only", only, "Run only these criteria (1 and 2, 10 share a sweep)");
    app.add_option("--seeds", sh.n_seeds, "Gridworld seeds for the sweeps");
    app.add_option("--reps", reps, "Repetitions for criterion 6");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
        {1, [&] { return criterion1(sh); }},  {2, [&] { return criterion2(sh); }},
        {3, [] { return criterion3(); }},     {4, [] { return criterion4(); }},
        {5, [] { return criterion5(); }},     {6, [&] { return criterion6(reps); }},
        {7, [] { return criterion7(); }},     {8, [] { return criterion8(); }},
        {9, [] { return criterion9(); }},     {10, [&] { return criterion10(sh); }},
    };
    const std::map<int, std::string> names = {
        {1, "safety of CoCoRL over the gridworld sweep"},
        {2, "convergence shape"},
        {3, "counterexample CMDP"},
        {4, "safe-set LP equals best vertex"},
        {5, "bound calculators and McMullen bound"},
        {6, "epsilon-safety coverage with estimated demos"},
        {7, "guaranteed hull"},
        {8, "unsafe set soundness"},
        {9, "CEM vs LP oracle"},
        {10, "IRL baselines are unsafe"},
    };
    auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
    // 2 and 10 read the sweep of 1.
    const bool need_sweep = wanted(1) || wanted(2) || wanted(10);

    int failed = 0;
    for (const auto& [id, run] : criteria) {
        if (!wanted(id) && !(id == 1 && need_sweep)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.details.push_back(std::string("exception: ") + e.what());
        }
        if (!wanted(id)) continue;
        failed += !o.pass;
        std::printf("criterion %2d: %s  %s (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", names.at(id).c_str(),
                    seconds_since(t0));
        for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
