#include "cocorl/bounds.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cocorl/errors.hpp"

namespace cocorl {

namespace {

// Binomial coefficient as long double; exact for the sizes used here.
long double choose(long long n, long long r) {
    if (r < 0 || n < r) return 0.0L;
    r = std::min(r, n - r);
    long double c = 1.0L;
    for (long long i = 1; i <= r; ++i) c = c * static_cast<long double>(n - r + i) / static_cast<long double>(i);
    return std::round(c);
}

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1), got " + std::to_string(delta));
}

void check_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in [0, 1), got " + std::to_string(gamma));
}

std::uint64_t to_count(long double x) {
    if (!std::isfinite(static_cast<double>(x)) || x > 1.8e19L)
        throw OverflowGuard("bound astronomically large (not representable)");
    return static_cast<std::uint64_t>(x);
}

// Smallest integer k >= x, with a relative guard against rounding noise.
std::uint64_t ceil_at_least(long double x) {
    if (x <= 1.0L) return 1;
    return to_count(std::ceil(x - 1e-9L * x));
}

// Smallest integer strictly greater than x.
std::uint64_t floor_plus_one(long double x) {
    if (x < 0.0L) return 1;
    return to_count(std::floor(x) + 1.0L);
}

// log(1 - exp(-beta d / (1 - gamma))), guarded.
long double boltzmann_denominator(int d, double beta, double gamma) {
    if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
    check_gamma(gamma);
    const long double expo = static_cast<long double>(beta) * d / (1.0L - gamma);
    const long double q = std::exp(-expo);
    if (q >= 1.0L) throw OverflowGuard("degenerate rationality: log(1 - exp(-beta d / (1 - gamma))) diverges");
    if (q == 0.0L) throw OverflowGuard("bound astronomically large: exp(-beta d / (1 - gamma)) underflows");
    const long double den = std::log1p(-q);
    if (den == 0.0L) throw OverflowGuard("bound astronomically large: log(1 - exp(.)) rounds to zero");
    return den;
}

}  // namespace

std::uint64_t mcmullen_vertex_bound(int d, int n) {
    if (d < 1) throw InvalidArgument("mcmullen_vertex_bound: d must be positive");
    if (n < d + 1) throw InvalidArgument("mcmullen_vertex_bound: need n >= d + 1");
    const long long lo = d / 2, hi = (d + 1) / 2;  // floor, ceil
    const long double v = choose(n - hi, lo) + choose(n - lo - 1, hi - 1);
    return to_count(v);
}

std::uint64_t sample_bound_exact_fv(double delta, double f_v) {
    check_delta(delta);
    if (!(f_v >= 1.0)) throw InvalidArgument("f_v must be at least 1");
    const long double p = static_cast<long double>(delta) / f_v;
    if (p >= 1.0L) return 1;
    return ceil_at_least(std::log(p) / std::log1p(-p));
}

std::uint64_t sample_bound_exact(double delta, int d, int n) {
    return sample_bound_exact_fv(delta, static_cast<double>(mcmullen_vertex_bound(d, n)));
}

std::uint64_t sample_bound_boltzmann_fv(double delta, int d, double f_v, double beta, double gamma) {
    check_delta(delta);
    if (!(f_v >= 1.0)) throw InvalidArgument("f_v must be at least 1");
    const long double den = boltzmann_denominator(d, beta, gamma);
    return ceil_at_least(std::log(static_cast<long double>(delta) / f_v) / den);
}

std::uint64_t sample_bound_boltzmann(double delta, int d, int n, double beta, double gamma) {
    return sample_bound_boltzmann_fv(delta, d, static_cast<double>(mcmullen_vertex_bound(d, n)), beta, gamma);
}

std::uint64_t traj_bound_eps_safety(int d, int n, std::uint64_t k, double delta, double eps, double gamma) {
    check_delta(delta);
    check_gamma(gamma);
    if (d < 1 || n < 1 || k < 1) throw InvalidArgument("traj_bound_eps_safety: d, n, k must be positive");
    if (!(eps > 0.0)) throw InvalidArgument("traj_bound_eps_safety: eps must be positive");
    const long double x = d * std::log(static_cast<long double>(n) * k / delta) /
                          (2.0L * eps * eps * (1.0L - gamma));
    return floor_plus_one(x);
}

EstimatedBounds bounds_estimated_fv(double delta, int d, double f_v, double eps, double gamma, DemoModel mode,
                                    double beta) {
    check_delta(delta);
    check_gamma(gamma);
    if (!(eps > 0.0)) throw InvalidArgument("bounds_estimated: eps must be positive");
    if (!(f_v >= 1.0)) throw InvalidArgument("f_v must be at least 1");
    const long double p = static_cast<long double>(delta) / (2.0L * f_v);
    const long double num = std::log(p);
    const long double den = mode == DemoModel::ExactDemos ? std::log1p(-p) : boltzmann_denominator(d, beta, gamma);
    EstimatedBounds out;
    out.k = floor_plus_one(num / den);
    out.n_traj = floor_plus_one(d * std::log(2.0L * f_v / delta) / (2.0L * eps * eps * (1.0L - gamma)));
    return out;
}

EstimatedBounds bounds_estimated(double delta, int d, int n, double eps, double gamma, DemoModel mode, double beta) {
    return bounds_estimated_fv(delta, d, static_cast<double>(mcmullen_vertex_bound(d, n)), eps, gamma, mode, beta);
}

}  // namespace cocorl
