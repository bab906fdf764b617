#include <doctest.h>

#include <cmath>

#include "cocorl/cem.hpp"
#include "cocorl/envs.hpp"
#include "cocorl/errors.hpp"

using namespace cocorl;

namespace {

Evaluation make_eval(double value, std::vector<double> v) {
    Evaluation e;
    e.value = value;
    e.violations = Eigen::Map<Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
    return e;
}

CemConfig config(int d, int iters, int samp, int elite, double sd) {
    CemConfig c;
    c.n_iter = iters;
    c.n_samp = samp;
    c.n_elite = elite;
    c.init_mean = Vec::Zero(d);
    c.init_std = Vec::Constant(d, sd);
    return c;
}

}  // namespace

TEST_CASE("cem: violation counts") {
    const auto e = make_eval(1.0, {0.5, -1.0, 0.0, 2.0});
    CHECK(e.n_viol() == 2);
    CHECK(e.t_viol() == doctest::Approx(2.5));
}

TEST_CASE("cem: comparator is a strict total order") {
    Rng rng(1);
    std::uniform_int_distribution<int> small(0, 2);
    std::vector<Evaluation> ev;
    for (int i = 0; i < 40; ++i)
        ev.push_back(make_eval(small(rng), {static_cast<double>(small(rng)) - 1, static_cast<double>(small(rng)) - 1}));
    const auto n = ev.size();
    for (std::size_t a = 0; a < n; ++a) {
        CHECK_FALSE(cem_before(ev[a], a, ev[a], a));
        for (std::size_t b = 0; b < n; ++b) {
            if (a != b) CHECK(cem_before(ev[a], a, ev[b], b) != cem_before(ev[b], b, ev[a], a));
            for (std::size_t c = 0; c < n; ++c)
                if (cem_before(ev[a], a, ev[b], b) && cem_before(ev[b], b, ev[c], c))
                    CHECK(cem_before(ev[a], a, ev[c], c));
        }
    }
    // Fewer violations beat higher value; then magnitude; then value; then index.
    CHECK(cem_before(make_eval(0, {1, -1}), 5, make_eval(9, {1, 1}), 0));
    CHECK(cem_before(make_eval(0, {0.1, -1}), 5, make_eval(9, {1, -1}), 0));
    CHECK(cem_before(make_eval(2, {-1}), 5, make_eval(1, {-1}), 0));
    CHECK(cem_before(make_eval(1, {-1}), 0, make_eval(1, {-1}), 5));
}

TEST_CASE("cem: elite selection branches") {
    std::vector<Evaluation> ev = {make_eval(5, {1}), make_eval(1, {-1}), make_eval(3, {-1}), make_eval(2, {-1}),
                                  make_eval(9, {0.5})};
    // Third-ranked is feasible: elites are the feasible ones by value.
    const auto e3 = select_elites(ev, 3);
    REQUIRE(e3.size() == 3);
    CHECK(e3[0] == 2);
    CHECK(e3[1] == 3);
    CHECK(e3[2] == 1);
    // Fourth-ranked is infeasible: plain ranking, infeasible ones after.
    const auto e4 = select_elites(ev, 4);
    REQUIRE(e4.size() == 4);
    CHECK(e4[3] == 4);
    CHECK_THROWS_AS(select_elites(ev, 6), InvalidArgument);
}

TEST_CASE("cem: unconstrained sphere") {
    Rng rng(2);
    Vec target(3);
    target << 0.7, -1.2, 2.0;
    const auto res = constrained_cem(
        [&](const Vec& w) {
            Evaluation e;
            e.value = -(w - target).squaredNorm();
            e.violations = Vec::Zero(0);
            return e;
        },
        config(3, 200, 64, 8, 1.0), rng);
    CHECK((res.params - target).cwiseAbs().maxCoeff() < 0.05);
    for (const auto& h : res.history) CHECK(h.feasible_in_elite == 8);
}

TEST_CASE("cem: all candidates infeasible") {
    Rng rng(3);
    double min_seen = 1e300;
    const auto res = constrained_cem(
        [&](const Vec& w) {
            Evaluation e;
            e.value = w.sum();
            e.violations = w.cwiseAbs().array() + 1.0;
            min_seen = std::min(min_seen, e.t_viol());
            return e;
        },
        config(2, 30, 32, 4, 1.0), rng);
    CHECK(res.best.t_viol() == min_seen);
    CHECK(res.params.norm() < 0.1);
    for (const auto& h : res.history) CHECK(h.feasible_in_elite == 0);
}

TEST_CASE("cem: feasible elites exclude infeasible candidates") {
    Rng rng(4);
    const auto res = constrained_cem(
        [&](const Vec& w) {
            Evaluation e;
            e.value = w(0);
            e.violations = Vec::Constant(1, w(0) - 1.0);
            return e;
        },
        config(1, 40, 50, 5, 0.5), rng);
    bool saw_full = false;
    for (const auto& h : res.history) saw_full = saw_full || h.feasible_in_elite == 5;
    CHECK(saw_full);
    CHECK(res.params(0) <= 1.0);
    CHECK(res.params(0) > 0.95);
}

TEST_CASE("cem: single-state CMDP stays feasible and below the LP optimum") {
    // The plain diagonal refit tends to stall on an edge of the feasible
    // polytope, so only the oracle-consistent bounds are asserted here.
    Rng rng(5);
    for (int trial = 0; trial < 3; ++trial) {
        const auto p = gen_single_state(3, 4, rng);
        const Vec theta = sample_unit_sphere(3, rng);
        const double opt = solve_single_state(p, theta).value;
        const Mat phi = p.phi();
        const Vec xi = p.xi();
        Rng local(100 + trial);
        const auto res = constrained_cem(
            [&](const Vec& w) {
                Evaluation e;
                e.value = theta.dot(w);
                e.violations = phi * w - xi;
                return e;
            },
            config(3, 300, 200, 20, 3.0), local);
        CHECK((phi * res.params - xi).maxCoeff() <= 1e-3);
        CHECK(theta.dot(res.params) <= opt + 1e-9);
        CHECK(theta.dot(res.params) > 0.0);
        for (const auto& h : res.history) CHECK(h.feasible_in_elite <= 20);
    }
}

TEST_CASE("cem: collapsed variance is flagged") {
    Rng rng(6);
    const auto res = constrained_cem(
        [](const Vec& w) {
            Evaluation e;
            e.value = -w.squaredNorm();
            e.violations = Vec::Zero(0);
            return e;
        },
        config(2, 10, 5, 1, 1.0), rng);
    CHECK(res.degenerate_variance);
    CHECK(res.history.size() == 1);
}

TEST_CASE("cem: config validation") {
    Rng rng(7);
    auto ev = [](const Vec&) { return Evaluation{}; };
    CHECK_THROWS_AS(constrained_cem(ev, config(2, 0, 5, 1, 1.0), rng), InvalidArgument);
    CHECK_THROWS_AS(constrained_cem(ev, config(2, 5, 5, 6, 1.0), rng), InvalidArgument);
    CHECK_THROWS_AS(constrained_cem(ev, config(2, 5, 5, 2, 0.0), rng), InvalidArgument);
}
