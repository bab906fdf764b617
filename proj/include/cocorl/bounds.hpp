#pragma once

// Sample-complexity calculators. All return the smallest integer satisfying
// the respective inequality.

#include <cstdint>

namespace cocorl {

// Maximum number of vertices of a d-polytope with n facets (upper bound
// theorem, dual of the cyclic polytope). Requires n >= d + 1.
std::uint64_t mcmullen_vertex_bound(int d, int n);

// k >= log(delta / f_v) / log(1 - delta / f_v)
std::uint64_t sample_bound_exact(double delta, int d, int n);
std::uint64_t sample_bound_exact_fv(double delta, double f_v);

// k >= log(delta / f_v) / log(1 - exp(-beta d / (1 - gamma))).
// Throws OverflowGuard when exp(-beta d / (1 - gamma)) underflows or the
// result is not representable.
std::uint64_t sample_bound_boltzmann(double delta, int d, int n, double beta, double gamma);
std::uint64_t sample_bound_boltzmann_fv(double delta, int d, double f_v, double beta, double gamma);

// n_traj > d log(n k / delta) / (2 eps^2 (1 - gamma))
std::uint64_t traj_bound_eps_safety(int d, int n, std::uint64_t k, double delta, double eps, double gamma);

enum class DemoModel { ExactDemos, Boltzmann };

struct EstimatedBounds {
    std::uint64_t k = 0;
    std::uint64_t n_traj = 0;
};

// k > log(delta / (2 f_v)) / log(1 - delta / (2 f_v))   (exact demos), or
// k > log(delta / (2 f_v)) / log(1 - exp(-beta d / (1 - gamma)))  (Boltzmann);
// n_traj > d log(2 f_v / delta) / (2 eps^2 (1 - gamma)) in both modes.
EstimatedBounds bounds_estimated(double delta, int d, int n, double eps, double gamma, DemoModel mode,
                                 double beta = 0.0);
EstimatedBounds bounds_estimated_fv(double delta, int d, double f_v, double eps, double gamma, DemoModel mode,
                                    double beta = 0.0);

}  // namespace cocorl
