#include "cocorl/cem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cocorl/errors.hpp"

namespace cocorl {

namespace {
constexpr double kSigmaFloor = 1e-12;
}

void CemConfig::validate() const {
    if (n_iter < 1) throw InvalidArgument("CEM: n_iter must be at least 1");
    if (n_elite < 1 || n_samp < n_elite) throw InvalidArgument("CEM: need 1 <= n_elite <= n_samp");
    if (init_mean.size() == 0 || init_std.size() != init_mean.size())
        throw InvalidArgument("CEM: init_mean and init_std must have the same nonzero length");
    if ((init_std.array() <= 0.0).any()) throw InvalidArgument("CEM: init_std must be positive");
}

int Evaluation::n_viol() const { return static_cast<int>((violations.array() > 0.0).count()); }

double Evaluation::t_viol() const { return violations.cwiseMax(0.0).sum(); }

bool cem_before(const Evaluation& a, std::size_t ia, const Evaluation& b, std::size_t ib) {
    const int na = a.n_viol(), nb = b.n_viol();
    if (na != nb) return na < nb;
    const double ta = a.t_viol(), tb = b.t_viol();
    if (ta != tb) return ta < tb;
    if (a.value != b.value) return a.value > b.value;
    return ia < ib;
}

std::vector<std::size_t> select_elites(const std::vector<Evaluation>& evals, int n_elite) {
    if (n_elite < 1 || static_cast<std::size_t>(n_elite) > evals.size())
        throw InvalidArgument("select_elites: n_elite out of range");
    std::vector<std::size_t> order(evals.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return cem_before(evals[i], i, evals[j], j); });
    const auto n = static_cast<std::size_t>(n_elite);
    if (evals[order[n - 1]].n_viol() == 0) {
        std::vector<std::size_t> feasible;
        for (std::size_t i : order)
            if (evals[i].n_viol() == 0) feasible.push_back(i);
        std::stable_sort(feasible.begin(), feasible.end(), [&](std::size_t i, std::size_t j) {
            if (evals[i].value != evals[j].value) return evals[i].value > evals[j].value;
            return i < j;
        });
        feasible.resize(n);
        return feasible;
    }
    order.resize(n);
    return order;
}

CemResult constrained_cem(const Evaluator& evaluator, const CemConfig& config, Rng& rng) {
    config.validate();
    const Eigen::Index d = config.init_mean.size();
    Vec mean = config.init_mean, sd = config.init_std;
    std::normal_distribution<double> g(0.0, 1.0);

    CemResult out;
    bool have_best = false;
    std::size_t best_tag = 0;
    for (int it = 0; it < config.n_iter; ++it) {
        std::vector<Vec> cand(static_cast<std::size_t>(config.n_samp));
        std::vector<Evaluation> evals(cand.size());
        for (std::size_t i = 0; i < cand.size(); ++i) {
            cand[i].resize(d);
            for (Eigen::Index j = 0; j < d; ++j) cand[i](j) = mean(j) + sd(j) * g(rng);
            evals[i] = evaluator(cand[i]);
            if (!std::isfinite(evals[i].value) || !evals[i].violations.allFinite())
                throw NumericalFailure("CEM: evaluator returned a non-finite value");
        }
        const auto elites = select_elites(evals, config.n_elite);

        const std::size_t tag = static_cast<std::size_t>(it) * cand.size() + elites.front();
        if (!have_best || cem_before(evals[elites.front()], tag, out.best, best_tag)) {
            out.best = evals[elites.front()];
            out.best_params = cand[elites.front()];
            best_tag = tag;
            have_best = true;
        }

        Vec m = Vec::Zero(d);
        for (std::size_t i : elites) m += cand[i];
        m /= static_cast<double>(elites.size());
        Vec var = Vec::Zero(d);
        for (std::size_t i : elites) var += (cand[i] - m).cwiseAbs2();
        var /= static_cast<double>(elites.size());
        mean = m;
        sd = var.cwiseSqrt().cwiseMax(kSigmaFloor);

        CemIteration h;
        h.mean = mean;
        h.std = sd;
        h.best = evals[elites.front()];
        for (std::size_t i : elites) h.feasible_in_elite += evals[i].n_viol() == 0;
        out.history.push_back(std::move(h));

        if (sd.maxCoeff() <= kSigmaFloor && it + 1 < config.n_iter) {
            out.degenerate_variance = true;
            break;
        }
    }
    out.params = mean;
    return out;
}

}  // namespace cocorl
