#pragma once

// Cross-entropy search that ranks candidates by constraint violation before
// return.

#include <functional>
#include <vector>

#include "cocorl/cmdp.hpp"

namespace cocorl {

struct CemConfig {
    int n_iter = 100;
    int n_samp = 64;
    int n_elite = 8;
    Vec init_mean;
    Vec init_std;  // positive

    void validate() const;
};

struct Evaluation {
    double value = 0.0;   // G(omega)
    Vec violations;       // J_j(omega) - xi_j; positive means violated

    int n_viol() const;
    double t_viol() const;
};

using Evaluator = std::function<Evaluation(const Vec&)>;

// Strict weak order on (n_viol asc, t_viol asc, value desc, index asc).
bool cem_before(const Evaluation& a, std::size_t ia, const Evaluation& b, std::size_t ib);

struct CemIteration {
    Vec mean;
    Vec std;
    Evaluation best;           // first elite
    int feasible_in_elite = 0;
};

struct CemResult {
    Vec params;          // final mean
    Vec best_params;     // best candidate seen under cem_before
    Evaluation best;
    std::vector<CemIteration> history;
    bool degenerate_variance = false;  // sigma collapsed below 1e-12 before n_iter
};

// Elite selection of one iteration: indices of the n_elite winners. If the
// n_elite-th ranked candidate is feasible, the elites are the n_elite best
// feasible candidates by value.
std::vector<std::size_t> select_elites(const std::vector<Evaluation>& evals, int n_elite);

CemResult constrained_cem(const Evaluator& evaluator, const CemConfig& config, Rng& rng);

}  // namespace cocorl
