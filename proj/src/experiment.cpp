#include "cocorl/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "cocorl/errors.hpp"
#include "cocorl/safe_set.hpp"

namespace cocorl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::map<std::string, Setting>& setting_names() {
    static const std::map<std::string, Setting> names = {
        {"single-env", Setting::SingleEnv},           {"task-transfer", Setting::TaskTransfer},
        {"dynamics-transfer", Setting::DynamicsTransfer}, {"single-state", Setting::SingleState},
        {"counterexample", Setting::Counterexample}};
    return names;
}

const std::map<std::string, Method>& method_names() {
    static const std::map<std::string, Method> names = {
        {"cocorl", Method::CoCoRL},         {"mm-average", Method::MaxMarginAverage},
        {"mm-shared", Method::MaxMarginShared}, {"mm-known", Method::MaxMarginKnown},
        {"me-average", Method::MaxEntAverage},  {"me-shared", Method::MaxEntShared},
        {"me-known", Method::MaxEntKnown}};
    return names;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw InvalidArgument("config: " + key + " expects a number, got '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw InvalidArgument("config: " + key + " expects an integer, got '" + v + "'");
    }
}

// "1,2,5" or "1..26" or a mix of both.
std::vector<long long> parse_list(const std::string& key, const std::string& v) {
    std::vector<long long> out;
    for (const auto& part : split(v, ',')) {
        if (part.empty()) continue;
        const auto dots = part.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_int(key, part));
            continue;
        }
        const long long lo = to_int(key, trim(part.substr(0, dots)));
        const long long hi = to_int(key, trim(part.substr(dots + 2)));
        if (hi < lo) throw InvalidArgument("config: empty range in " + key);
        for (long long x = lo; x <= hi; ++x) out.push_back(x);
    }
    if (out.empty()) throw InvalidArgument("config: " + key + " is empty");
    return out;
}

bool is_irl(Method m) { return m != Method::CoCoRL; }

Rng stream_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    return Rng(seq);
}

double violation(const TabularCMDP& m, const Policy& pi, const std::vector<LinearObjective>& constraints) {
    double v = 0.0;
    for (const auto& c : constraints) v += std::max(evaluate(m, pi, c) - *c.threshold, 0.0);
    return v;
}

}  // namespace

TabularTask make_tabular_task(const ExperimentConfig& cfg, std::uint64_t seed, int max_k) {
    Rng rng = stream_rng(seed, 0, 0);
    TabularTask t;
    RewardSampler sampler;
    std::optional<Gridworld> grid;
    std::optional<std::vector<int>> eval_goals;

    if (cfg.setting == Setting::Counterexample) {
        auto c = prop1_cmdp(true);
        t.train = t.eval = c.cmdp;
        t.constraints = c.constraints;
        auto counter = std::make_shared<int>(0);
        const auto known = c.known_rewards;
        sampler = [known, counter](Rng&) { return known[static_cast<std::size_t>((*counter)++ % 2)]; };
    } else {
        if (cfg.setting == Setting::DynamicsTransfer) {
            for (int attempt = 0;; ++attempt) {
                if (attempt >= cfg.grid.max_rejections)
                    throw GenerationFailure("no gridworld feasible under both dynamics");
                auto g = gen_gridworld(cfg.grid, rng);
                const auto shifted = with_slip(g, cfg.eval_slip_p);
                try {
                    solve_cmdp(shifted.cmdp, LinearObjective(Vec::Zero(g.cmdp.dim())), g.constraints);
                } catch (const Infeasible&) {
                    continue;
                }
                grid = g;
                t.eval = shifted.cmdp;
                break;
            }
        } else {
            grid = gen_gridworld(cfg.grid, rng);
            t.eval = grid->cmdp;
        }
        t.train = grid->cmdp;
        t.constraints = grid->constraints;
        const Gridworld g = *grid;
        sampler = [g](Rng& r) { return sample_reward(g, r); };
        if (cfg.setting == Setting::TaskTransfer) eval_goals = sample_new_goals(g, rng);
    }

    DemoSpec spec;
    spec.mode = cfg.demo_mode;
    spec.k = max_k;
    spec.beta = cfg.beta;
    t.demos = gen_demos(t.train, t.constraints, spec, sampler, rng);
    if (cfg.n_traj > 0) {
        const int h = default_horizon(t.train.discount);
        for (auto& d : t.demos) {
            std::vector<Trajectory> trajs;
            for (int i = 0; i < cfg.n_traj; ++i) trajs.push_back(rollout(t.train, d.policy, h, rng));
            d.features = estimate_feature_expectations(trajs, t.train, t.train.discount);
        }
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int e = 0; e < cfg.n_eval; ++e) {
        LinearObjective r;
        if (grid) {
            r = sample_reward(*grid, rng, eval_goals);
        } else {
            Vec w(t.eval.dim());
            for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = unit(rng);
            r = LinearObjective(w);
        }
        t.opt_values.push_back(solve_cmdp(t.eval, r, t.constraints).value);
        t.eval_rewards.push_back(r);
    }
    return t;
}

SingleStateTask make_single_state_task(const ExperimentConfig& cfg, std::uint64_t seed, int max_k) {
    Rng rng = stream_rng(seed, 0, 0);
    SingleStateTask t;
    t.problem = gen_single_state(cfg.ss_d, cfg.ss_n, rng);
    for (int i = 0; i < max_k; ++i)
        t.demos.emplace_back(solve_single_state(t.problem, sample_unit_sphere(cfg.ss_d, rng)).action);
    for (int e = 0; e < cfg.n_eval; ++e) {
        t.eval_rewards.push_back(sample_unit_sphere(cfg.ss_d, rng));
        t.opt_values.push_back(solve_single_state(t.problem, t.eval_rewards.back()).value);
    }
    return t;
}

namespace {

struct Score {
    double returns = 0.0;
    double violation = 0.0;
    bool fallback = false;
};

void finish_row(ResultRow& row, const Score& s, const std::vector<double>& opt_values) {
    double opt = 0.0;
    for (double v : opt_values) opt += v;
    row.normalized_return = s.returns / opt;
    row.constraint_violation = s.violation / static_cast<double>(opt_values.size());
    row.fallback_used = s.fallback;
}

std::vector<FeatureExpectations> first_features(const std::vector<Demo>& demos, int k) {
    std::vector<FeatureExpectations> out;
    for (int i = 0; i < k; ++i) out.push_back(demos[static_cast<std::size_t>(i)].features);
    return out;
}

Score score_cocorl(const TabularTask& t, const SafeSet& s) {
    Score out;
    for (const auto& r : t.eval_rewards) {
        try {
            const auto sol = solve_for_reward(t.eval, s, r);
            out.returns += evaluate(t.eval, sol.policy, r);
            out.violation += violation(t.eval, sol.policy, t.constraints);
        } catch (const Infeasible&) {
            // Default safe behavior: zero return, no violation.
            out.fallback = true;
        }
    }
    return out;
}

Score score_irl(const TabularTask& t, const IrlResult& res) {
    Score out;
    for (const auto& r : t.eval_rewards) {
        const auto composite = apply_irl_constraints(res, r);
        const auto pi = value_iteration(t.eval, pair_values(t.eval, composite.weights)).greedy;
        out.returns += evaluate(t.eval, pi, r);
        out.violation += violation(t.eval, pi, t.constraints);
    }
    return out;
}

class IrlFitter {
public:
    IrlFitter(const ExperimentConfig& cfg, const TabularTask& t) : cfg_(cfg), t_(t) {}

    IrlResult fit(Method m, int k) {
        std::vector<Policy> policies;
        std::vector<LinearObjective> rewards;
        std::vector<Vec> reward_weights;
        for (int i = 0; i < k; ++i) {
            policies.push_back(t_.demos[static_cast<std::size_t>(i)].policy);
            rewards.push_back(t_.demos[static_cast<std::size_t>(i)].reward);
            reward_weights.push_back(rewards.back().weights);
        }
        MaxMarginOptions mm;
        mm.basis = cfg_.mm_basis;
        const Vec zero = Vec::Zero(t_.train.dim());
        MaxEntConfig me = cfg_.maxent;
        switch (m) {
            case Method::MaxMarginAverage: {
                // Independent per expert, so earlier fits are reused.
                while (static_cast<int>(mm_cache_.size()) < k) {
                    const auto one = max_margin_average(t_.train, {policies[mm_cache_.size()]}, mm);
                    mm_cache_.push_back(one.per_demo_rewards.front());
                    mm_margins_.push_back(one.margins.front());
                }
                IrlResult res;
                res.variant = IrlVariant::Average;
                res.per_demo_rewards.assign(mm_cache_.begin(), mm_cache_.begin() + k);
                res.margins.assign(mm_margins_.begin(), mm_margins_.begin() + k);
                return res;
            }
            case Method::MaxMarginShared: return max_margin_shared(t_.train, policies, mm);
            case Method::MaxMarginKnown: return max_margin_known(t_.train, policies, rewards, mm);
            case Method::MaxEntAverage:
                me.alpha_phi = 0.0;
                if (me.alpha_theta == 0.0) throw InvalidArgument("me-average needs maxent_alpha_theta > 0");
                return max_entropy_irl(t_.train, first_features(t_.demos, k), me,
                                       std::vector<Vec>(static_cast<std::size_t>(k), zero), zero);
            case Method::MaxEntShared:
                if (me.alpha_theta == 0.0 || me.alpha_phi == 0.0)
                    throw InvalidArgument("me-shared needs both learning rates positive");
                return max_entropy_irl(t_.train, first_features(t_.demos, k), me,
                                       std::vector<Vec>(static_cast<std::size_t>(k), zero), zero);
            case Method::MaxEntKnown:
                me.alpha_theta = 0.0;
                if (me.alpha_phi == 0.0) throw InvalidArgument("me-known needs maxent_alpha_phi > 0");
                return max_entropy_irl(t_.train, first_features(t_.demos, k), me, reward_weights, zero);
            default: throw InvalidArgument("not an IRL method");
        }
    }

private:
    const ExperimentConfig& cfg_;
    const TabularTask& t_;
    std::vector<Vec> mm_cache_;
    std::vector<double> mm_margins_;
};

}  // namespace

std::string to_string(Setting s) {
    for (const auto& [name, v] : setting_names())
        if (v == s) return name;
    return "?";
}

std::string to_string(Method m) {
    for (const auto& [name, v] : method_names())
        if (v == m) return name;
    return "?";
}

Setting parse_setting(const std::string& s) {
    const auto it = setting_names().find(s);
    if (it == setting_names().end()) throw InvalidArgument("unknown setting '" + s + "'");
    return it->second;
}

Method parse_method(const std::string& s) {
    const auto it = method_names().find(s);
    if (it == method_names().end()) throw InvalidArgument("unknown method '" + s + "'");
    return it->second;
}

void ExperimentConfig::validate() const {
    if (methods.empty()) throw InvalidArgument("config: no methods");
    if (k_schedule.empty()) throw InvalidArgument("config: empty k_schedule");
    if (seeds.empty()) throw InvalidArgument("config: no seeds");
    for (int k : k_schedule)
        if (k < 1) throw InvalidArgument("config: k must be at least 1");
    if (n_eval < 1) throw InvalidArgument("config: n_eval must be at least 1");
    if (n_traj < 0) throw InvalidArgument("config: n_traj must be non-negative");
    if (setting == Setting::SingleState) {
        for (Method m : methods)
            if (is_irl(m)) throw InvalidArgument("config: IRL baselines need a tabular setting, not single-state");
        if (demo_mode != DemoMode::ExactOptimal || n_traj > 0)
            throw InvalidArgument("config: single-state demos are exact optimal actions");
        if (ss_d < 1 || ss_n < 1) throw InvalidArgument("config: ss_d and ss_n must be positive");
    }
    if (demo_mode == DemoMode::Boltzmann && !(beta > 0.0)) throw InvalidArgument("config: beta must be positive");
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    const std::string& v = value;
    if (key == "setting") cfg.setting = parse_setting(v);
    else if (key == "method" || key == "methods") {
        cfg.methods.clear();
        for (const auto& m : split(v, ','))
            if (!m.empty()) cfg.methods.push_back(parse_method(m));
    } else if (key == "k_schedule") {
        cfg.k_schedule.clear();
        for (long long k : parse_list(key, v)) cfg.k_schedule.push_back(static_cast<int>(k));
    } else if (key == "seeds") {
        cfg.seeds.clear();
        for (long long s : parse_list(key, v)) {
            if (s < 0) throw InvalidArgument("config: seeds must be non-negative");
            cfg.seeds.push_back(static_cast<std::uint64_t>(s));
        }
    } else if (key == "grid_n") cfg.grid.N = static_cast<int>(to_int(key, v));
    else if (key == "slip_p") cfg.grid.slip_p = to_double(key, v);
    else if (key == "eval_slip_p") cfg.eval_slip_p = to_double(key, v);
    else if (key == "n_goal") cfg.grid.n_goal = static_cast<int>(to_int(key, v));
    else if (key == "n_limited") cfg.grid.n_limited = static_cast<int>(to_int(key, v));
    else if (key == "n_constraints") cfg.grid.n_constraints = static_cast<int>(to_int(key, v));
    else if (key == "gamma") cfg.grid.gamma = to_double(key, v);
    else if (key == "reward_std") cfg.grid.reward_std = to_double(key, v);
    else if (key == "threshold_max") cfg.grid.threshold_max = to_double(key, v);
    else if (key == "ss_d") cfg.ss_d = static_cast<int>(to_int(key, v));
    else if (key == "ss_n") cfg.ss_n = static_cast<int>(to_int(key, v));
    else if (key == "demo_mode") {
        if (v == "exact") cfg.demo_mode = DemoMode::ExactOptimal;
        else if (v == "boltzmann") cfg.demo_mode = DemoMode::Boltzmann;
        else throw InvalidArgument("config: demo_mode must be exact or boltzmann");
    } else if (key == "beta") cfg.beta = to_double(key, v);
    else if (key == "n_traj") cfg.n_traj = static_cast<int>(to_int(key, v));
    else if (key == "n_eval") cfg.n_eval = static_cast<int>(to_int(key, v));
    else if (key == "n_points") cfg.n_points = static_cast<int>(to_int(key, v));
    else if (key == "d_stop") cfg.d_stop = to_double(key, v);
    else if (key == "mm_basis") {
        if (v == "next-state") cfg.mm_basis = RewardBasis::NextState;
        else if (v == "features") cfg.mm_basis = RewardBasis::Features;
        else throw InvalidArgument("config: mm_basis must be next-state or features");
    } else if (key == "maxent_alpha_theta") cfg.maxent.alpha_theta = to_double(key, v);
    else if (key == "maxent_alpha_phi") cfg.maxent.alpha_phi = to_double(key, v);
    else if (key == "maxent_sweeps") cfg.maxent.sweeps = static_cast<int>(to_int(key, v));
    else if (key == "output") cfg.output = v;
    else throw InvalidArgument("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& is) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const int max_k = *std::max_element(cfg.k_schedule.begin(), cfg.k_schedule.end());
    std::vector<ResultRow> rows;
    for (std::uint64_t seed : cfg.seeds) {
        std::optional<TabularTask> tab;
        std::optional<SingleStateTask> ss;
        std::string seed_error;
        try {
            if (cfg.setting == Setting::SingleState) ss = make_single_state_task(cfg, seed, max_k);
            else tab = make_tabular_task(cfg, seed, max_k);
        } catch (const std::exception& e) {
            seed_error = e.what();
        }

        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
            const Method method = cfg.methods[mi];
            std::optional<IrlFitter> fitter;
            if (tab && is_irl(method)) fitter.emplace(cfg, *tab);
            for (int k : cfg.k_schedule) {
                ResultRow row;
                row.seed = seed;
                row.k = k;
                row.method = to_string(method);
                row.setting = to_string(cfg.setting);
                const auto start = std::chrono::steady_clock::now();
                try {
                    if (!seed_error.empty()) throw GenerationFailure(seed_error);
                    Rng rng = stream_rng(seed, static_cast<std::uint64_t>(k), 1 + mi);
                    if (ss) {
                        const std::vector<FeatureExpectations> f(ss->demos.begin(), ss->demos.begin() + k);
                        const auto s = build_safe_set(f, cfg.n_points, cfg.d_stop, rng);
                        const Mat phi = ss->problem.phi();
                        const Vec xi = ss->problem.xi();
                        Score score;
                        for (const auto& theta : ss->eval_rewards) {
                            try {
                                const auto sol = solve_for_reward(s.polytope, theta);
                                score.returns += theta.dot(sol.point);
                                score.violation += (phi * sol.point - xi).cwiseMax(0.0).sum();
                            } catch (const Infeasible&) {
                                score.fallback = true;
                            }
                        }
                        finish_row(row, score, ss->opt_values);
                    } else if (method == Method::CoCoRL) {
                        const auto s = build_safe_set(first_features(tab->demos, k), cfg.n_points, cfg.d_stop, rng);
                        finish_row(row, score_cocorl(*tab, s), tab->opt_values);
                    } else {
                        finish_row(row, score_irl(*tab, fitter->fit(method, k)), tab->opt_values);
                    }
                } catch (const std::exception& e) {
                    row.error = e.what();
                    row.normalized_return = kNaN;
                    row.constraint_violation = kNaN;
                }
                row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
                rows.push_back(row);
            }
        }
    }
    return rows;
}

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << kCsvHeader << '\n';
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%llu,%d,%s,%s,%.17g,%.17g,%d,%.3f\n", static_cast<unsigned long long>(r.seed),
                      r.k, r.method.c_str(), r.setting.c_str(), r.normalized_return, r.constraint_violation,
                      r.fallback_used ? 1 : 0, r.wall_ms);
        os << buf;
    }
}

std::vector<ResultRow> read_results_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || trim(line) != kCsvHeader) throw InvalidArgument("results CSV: bad header");
    std::vector<ResultRow> rows;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 8) throw InvalidArgument("results CSV: expected 8 fields");
        ResultRow r;
        r.seed = static_cast<std::uint64_t>(std::stoull(f[0]));
        r.k = std::stoi(f[1]);
        r.method = f[2];
        r.setting = f[3];
        r.normalized_return = std::strtod(f[4].c_str(), nullptr);
        r.constraint_violation = std::strtod(f[5].c_str(), nullptr);
        r.fallback_used = f[6] == "1";
        r.wall_ms = std::strtod(f[7].c_str(), nullptr);
        if (std::isnan(r.normalized_return)) r.error = "failed";
        rows.push_back(r);
    }
    return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
    std::map<std::tuple<std::string, std::string, int>, std::vector<const ResultRow*>> groups;
    for (const auto& r : rows)
        if (r.error.empty() && !std::isnan(r.normalized_return)) groups[{r.method, r.setting, r.k}].push_back(&r);
    std::vector<SummaryRow> out;
    for (const auto& [key, members] : groups) {
        SummaryRow s;
        std::tie(s.method, s.setting, s.k) = key;
        s.n = static_cast<int>(members.size());
        auto stats = [&](auto get, double& mean, double& se) {
            mean = 0.0;
            for (const auto* r : members) mean += get(*r);
            mean /= s.n;
            double ss = 0.0;
            for (const auto* r : members) ss += (get(*r) - mean) * (get(*r) - mean);
            se = s.n > 1 ? std::sqrt(ss / (s.n - 1)) / std::sqrt(static_cast<double>(s.n)) : 0.0;
        };
        stats([](const ResultRow& r) { return r.normalized_return; }, s.mean_return, s.stderr_return);
        stats([](const ResultRow& r) { return r.constraint_violation; }, s.mean_violation, s.stderr_violation);
        out.push_back(s);
    }
    return out;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& summary) {
    os << "method,setting,k,n,mean_normalized_return,stderr_normalized_return,mean_constraint_violation,"
          "stderr_constraint_violation\n";
    char buf[512];
    for (const auto& s : summary) {
        std::snprintf(buf, sizeof buf, "%s,%s,%d,%d,%.17g,%.17g,%.17g,%.17g\n", s.method.c_str(), s.setting.c_str(),
                      s.k, s.n, s.mean_return, s.stderr_return, s.mean_violation, s.stderr_violation);
        os << buf;
    }
}

std::string summary_path(const std::string& path) {
    const std::string ext = ".csv";
    if (path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0)
        return path.substr(0, path.size() - ext.size()) + ".summary.csv";
    return path + ".summary.csv";
}

void emit_results(const std::vector<ResultRow>& rows, const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream csv(path);
    if (!csv) throw Error("cannot open '" + path + "' for writing");
    write_results_csv(csv, rows);
    if (!csv) throw Error("write to '" + path + "' failed");
    const std::string spath = summary_path(path);
    std::ofstream sum(spath);
    if (!sum) throw Error("cannot open '" + spath + "' for writing");
    write_summary_csv(sum, summarize(rows));
    if (!sum) throw Error("write to '" + spath + "' failed");
}

CemComparison compare_cem_lp(int d, int n, std::uint64_t seed, CemConfig cem) {
    Rng rng = stream_rng(seed, 0, 0);
    const auto p = gen_single_state(d, n, rng);
    const Vec theta = sample_unit_sphere(d, rng);
    const Mat phi = p.phi();
    const Vec xi = p.xi();
    if (cem.init_mean.size() == 0) cem.init_mean = Vec::Zero(d);
    if (cem.init_std.size() == 0) cem.init_std = Vec::Ones(d);
    Rng search = stream_rng(seed, 1, 0);
    const auto res = constrained_cem(
        [&](const Vec& a) {
            Evaluation e;
            e.value = theta.dot(a);
            e.violations = phi * a - xi;
            return e;
        },
        cem, search);
    CemComparison out;
    out.seed = seed;
    out.lp_value = solve_single_state(p, theta).value;
    out.cem_value = theta.dot(res.params);
    out.ratio = out.cem_value / out.lp_value;
    out.max_violation = (phi * res.params - xi).maxCoeff();
    out.degenerate_variance = res.degenerate_variance;
    return out;
}

}  // namespace cocorl
