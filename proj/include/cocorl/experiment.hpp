#pragma once

// Experiment harness: sweeps over seeds and demonstration counts, fits a
// method, and scores it on fresh evaluation rewards.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cocorl/cem.hpp"
#include "cocorl/envs.hpp"
#include "cocorl/irl.hpp"

namespace cocorl {

enum class Setting { SingleEnv, TaskTransfer, DynamicsTransfer, SingleState, Counterexample };

enum class Method { CoCoRL, MaxMarginAverage, MaxMarginShared, MaxMarginKnown, MaxEntAverage, MaxEntShared, MaxEntKnown };

std::string to_string(Setting s);
std::string to_string(Method m);
Setting parse_setting(const std::string& s);
Method parse_method(const std::string& s);

struct ExperimentConfig {
    Setting setting = Setting::SingleEnv;
    std::vector<Method> methods = {Method::CoCoRL};
    std::vector<int> k_schedule = {1, 2, 4, 8, 16};
    std::vector<std::uint64_t> seeds = {0};

    GridworldSpec grid;
    double eval_slip_p = 0.2;  // dynamics transfer: demos at grid.slip_p, evaluation here

    int ss_d = 3;   // single-state dimension
    int ss_n = 8;   // single-state constraint count

    DemoMode demo_mode = DemoMode::ExactOptimal;
    double beta = 1.0;
    int n_traj = 0;  // > 0: demos' feature expectations estimated from this many rollouts

    int n_eval = 10;
    int n_points = -1;     // Alg. 1 cap, < 0 means min(k, 50)
    double d_stop = 1e-6;

    RewardBasis mm_basis = RewardBasis::NextState;
    MaxEntConfig maxent;

    std::string output;  // CSV path; the summary goes next to it

    // Throws InvalidArgument on empty schedules or incompatible setting/method.
    void validate() const;
};

// Flat "key = value" text, '#' comments. Unknown keys are an error.
ExperimentConfig parse_config(std::istream& is);
void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct ResultRow {
    std::uint64_t seed = 0;
    int k = 0;
    std::string method;
    std::string setting;
    double normalized_return = 0.0;
    double constraint_violation = 0.0;
    bool fallback_used = false;
    double wall_ms = 0.0;
    std::string error;  // non-empty marks a failed row (metrics are NaN)
};

// Everything the rows of one seed share: environment, demo pool (the first k
// are used at demo count k), evaluation rewards and the true optimum for each.
struct TabularTask {
    TabularCMDP train;  // demos come from here
    TabularCMDP eval;   // policies are scored here
    std::vector<LinearObjective> constraints;
    std::vector<Demo> demos;
    std::vector<LinearObjective> eval_rewards;
    std::vector<double> opt_values;
};

struct SingleStateTask {
    SingleStateProblem problem;
    std::vector<FeatureExpectations> demos;
    std::vector<Vec> eval_rewards;
    std::vector<double> opt_values;
};

TabularTask make_tabular_task(const ExperimentConfig& cfg, std::uint64_t seed, int max_k);
SingleStateTask make_single_state_task(const ExperimentConfig& cfg, std::uint64_t seed, int max_k);

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

inline constexpr const char* kCsvHeader =
    "seed,k,method,setting,normalized_return,constraint_violation,fallback_used,wall_ms";

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& is);

struct SummaryRow {
    std::string method;
    std::string setting;
    int k = 0;
    int n = 0;  // rows without errors
    double mean_return = 0.0;
    double stderr_return = 0.0;
    double mean_violation = 0.0;
    double stderr_violation = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& summary);

// Writes `path` and `path` with ".summary.csv" in place of a trailing ".csv",
// creating missing parent directories.
void emit_results(const std::vector<ResultRow>& rows, const std::string& path);
std::string summary_path(const std::string& path);

// CEM against the LP optimum on a random single-state problem. The CEM
// config's mean/std are filled in when empty (zero mean, unit std).
struct CemComparison {
    std::uint64_t seed = 0;
    double lp_value = 0.0;
    double cem_value = 0.0;
    double ratio = 0.0;          // cem_value / lp_value
    double max_violation = 0.0;  // max_j phi_j . a - xi_j at the CEM answer
    bool degenerate_variance = false;
};
CemComparison compare_cem_lp(int d, int n, std::uint64_t seed, CemConfig cem);

}  // namespace cocorl
