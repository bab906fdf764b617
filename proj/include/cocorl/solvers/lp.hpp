#pragma once

// Dense two-phase primal simplex.
//
// The problem is stated in "natural" form
//
//     maximize    c^T x
//     subject to  A_ineq x <= b_ineq
//                 A_eq   x  = b_eq
//                 lower <= x <= upper        (either side may be infinite)
//
// and rewritten internally into standard form (nonnegative variables, equality
// rows, nonnegative right-hand side) before the tableau is built.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cocorl/errors.hpp"

namespace cocorl {

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "?";
}

// Entering-variable selection. Bland is the default and never cycles;
// Dantzig picks the most positive reduced cost and drops to Bland's rule
// while the objective stalls on degenerate pivots.
enum class PivotRule { Bland, DantzigWithBlandFallback };

template <typename Scalar>
struct LpTolerances {
    Scalar feasibility = Scalar(1e-8);
    Scalar optimality = Scalar(1e-7);
    Scalar pivot = Scalar(1e-11);
};

template <typename Scalar>
struct LinearProgram {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Vec objective;
    Mat ineq_lhs;
    Vec ineq_rhs;
    Mat eq_lhs;
    Vec eq_rhs;
    Vec lower;
    Vec upper;

    LinearProgram() = default;

    // n variables, no rows, x >= 0.
    explicit LinearProgram(Eigen::Index n)
        : objective(Vec::Zero(n)),
          ineq_lhs(0, n),
          ineq_rhs(0),
          eq_lhs(0, n),
          eq_rhs(0),
          lower(Vec::Zero(n)),
          upper(Vec::Constant(n, std::numeric_limits<Scalar>::infinity())) {}

    Eigen::Index num_vars() const { return objective.size(); }

    void add_inequality(const Eigen::Ref<const Vec>& row, Scalar rhs) {
        append_row(ineq_lhs, ineq_rhs, row, rhs);
    }
    void add_equality(const Eigen::Ref<const Vec>& row, Scalar rhs) {
        append_row(eq_lhs, eq_rhs, row, rhs);
    }

    void set_free(Eigen::Index j) {
        lower(j) = -std::numeric_limits<Scalar>::infinity();
        upper(j) = std::numeric_limits<Scalar>::infinity();
    }

    // Throws InvalidArgument on shape mismatches or non-finite data.
    void validate() const {
        const Eigen::Index n = num_vars();
        if (ineq_lhs.cols() != n || eq_lhs.cols() != n || lower.size() != n || upper.size() != n)
            throw InvalidArgument("LinearProgram: column count mismatch");
        if (ineq_lhs.rows() != ineq_rhs.size() || eq_lhs.rows() != eq_rhs.size())
            throw InvalidArgument("LinearProgram: row count does not match rhs length");
        if (!objective.allFinite() || !ineq_lhs.allFinite() || !ineq_rhs.allFinite() ||
            !eq_lhs.allFinite() || !eq_rhs.allFinite())
            throw InvalidArgument("LinearProgram: non-finite coefficient");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) > upper(j) ||
                lower(j) == std::numeric_limits<Scalar>::infinity() ||
                upper(j) == -std::numeric_limits<Scalar>::infinity())
                throw InvalidArgument("LinearProgram: bad bounds on variable " + std::to_string(j));
        }
    }

private:
    static void append_row(Mat& lhs, Vec& rhs, const Eigen::Ref<const Vec>& row, Scalar value) {
        if (lhs.cols() != row.size()) throw InvalidArgument("LinearProgram: row length mismatch");
        lhs.conservativeResize(lhs.rows() + 1, Eigen::NoChange);
        lhs.row(lhs.rows() - 1) = row.transpose();
        rhs.conservativeResize(rhs.size() + 1);
        rhs(rhs.size() - 1) = value;
    }
};

template <typename Scalar>
struct LpSolution {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    LpStatus status = LpStatus::Infeasible;
    Vec point;  // empty unless Optimal
    Scalar objective_value = Scalar(0);
    std::size_t iterations = 0;

    bool optimal() const { return status == LpStatus::Optimal; }
};

// Largest violation of any constraint or bound at x (0 when feasible).
template <typename Scalar>
Scalar max_violation(const LinearProgram<Scalar>& lp,
                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
    Scalar v(0);
    if (lp.ineq_lhs.rows() > 0)
        v = std::max(v, (lp.ineq_lhs * x - lp.ineq_rhs).maxCoeff());
    if (lp.eq_lhs.rows() > 0)
        v = std::max(v, (lp.eq_lhs * x - lp.eq_rhs).cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        v = std::max(v, lp.lower(j) - x(j));
        v = std::max(v, x(j) - lp.upper(j));
    }
    return v;
}

namespace detail {

template <typename Scalar>
class SimplexTableau {
public:
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    SimplexTableau(Mat a, Vec b, std::vector<Eigen::Index> basis, PivotRule rule,
                   const LpTolerances<Scalar>& tol, std::size_t cap)
        : t_(std::move(a)),
          beta_(std::move(b)),
          basis_(std::move(basis)),
          rule_(rule),
          tol_(tol),
          cap_(cap),
          t0_(t_),
          b0_(beta_) {
        allowed_.assign(static_cast<std::size_t>(t_.cols()), true);
        for (Eigen::Index i = 0; i < t_.rows(); ++i) rows_.push_back(i);
    }

    // Runs simplex iterations for the given cost vector (maximize). Returns
    // false if the problem is unbounded in this phase.
    bool optimize(const Vec& cost) {
        reduced_ = cost.transpose();
        for (Eigen::Index i = 0; i < t_.rows(); ++i)
            reduced_.noalias() -= cost(basis_[static_cast<std::size_t>(i)]) * t_.row(i);
        Scalar scale = std::max<Scalar>(Scalar(1), cost.cwiseAbs().maxCoeff());
        const Scalar rc_tol = tol_.pivot * 10 * scale;
        std::size_t stall = 0;
        for (;;) {
            if (iterations_ >= cap_)
                throw NumericalFailure("simplex: iteration cap reached (" + std::to_string(cap_) + ")");
            const bool bland = rule_ == PivotRule::Bland || stall > 50;
            Eigen::Index q = -1;
            Scalar best = rc_tol;
            for (Eigen::Index j = 0; j < t_.cols(); ++j) {
                if (!allowed_[static_cast<std::size_t>(j)]) continue;
                if (reduced_(j) > best) {
                    q = j;
                    if (bland) break;
                    best = reduced_(j);
                }
            }
            if (q < 0) return true;

            // Rows whose pivot is tiny relative to the column are skipped;
            // among near-tied ratios the larger pivot wins unless the two
            // are comparable, where the lower basis index decides.
            Scalar colmax(0);
            for (Eigen::Index i = 0; i < t_.rows(); ++i) colmax = std::max(colmax, t_(i, q));
            const Scalar amin = std::max(tol_.pivot, colmax * Scalar(1e-9));
            Eigen::Index r = -1;
            Scalar ratio = std::numeric_limits<Scalar>::infinity();
            for (Eigen::Index i = 0; i < t_.rows(); ++i) {
                const Scalar a = t_(i, q);
                if (a <= amin) continue;
                const Scalar cand = beta_(i) / a;
                if (r < 0 || cand < ratio - tol_.pivot) {
                    r = i;
                    ratio = cand;
                } else if (cand <= ratio + tol_.pivot) {
                    const Scalar ar = t_(r, q);
                    const bool larger = a > 10 * ar;
                    const bool comparable = a * 10 >= ar;
                    if (larger || (comparable && basis_[static_cast<std::size_t>(i)] <
                                                     basis_[static_cast<std::size_t>(r)])) {
                        r = i;
                        ratio = std::min(ratio, cand);
                    }
                }
            }
            if (r < 0) return false;
            stall = (ratio <= tol_.pivot) ? stall + 1 : 0;
            pivot(r, q);
            ++iterations_;
        }
    }

    void pivot(Eigen::Index r, Eigen::Index q) {
        const Scalar p = t_(r, q);
        t_.row(r) /= p;
        beta_(r) /= p;
        Vec col = t_.col(q);
        col(r) = Scalar(0);
        t_.noalias() -= col * t_.row(r);
        beta_.noalias() -= col * beta_(r);
        if (reduced_.size() == t_.cols()) {
            const Scalar f = reduced_(q);
            reduced_.noalias() -= f * t_.row(r);
        }
        for (Eigen::Index i = 0; i < t_.rows(); ++i) {
            if (i != r) t_(i, q) = Scalar(0);
            if (beta_(i) < Scalar(0) && beta_(i) > -tol_.feasibility) beta_(i) = Scalar(0);
        }
        t_(r, q) = Scalar(1);
        basis_[static_cast<std::size_t>(r)] = q;
    }

    // Pivots artificial columns (index >= first_artificial) out of the basis
    // where possible and drops rows that turn out to be redundant.
    void expel_artificials(Eigen::Index first_artificial) {
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < t_.rows(); ++i) {
            if (basis_[static_cast<std::size_t>(i)] < first_artificial) continue;
            Eigen::Index q = -1;
            Scalar best = tol_.pivot * 1e3;
            for (Eigen::Index j = 0; j < first_artificial; ++j) {
                if (std::abs(t_(i, j)) > best) {
                    best = std::abs(t_(i, j));
                    q = j;
                }
            }
            if (q >= 0) pivot(i, q);
        }
        for (Eigen::Index i = 0; i < t_.rows(); ++i)
            if (basis_[static_cast<std::size_t>(i)] < first_artificial) keep.push_back(i);
        if (static_cast<Eigen::Index>(keep.size()) != t_.rows()) {
            Mat t(static_cast<Eigen::Index>(keep.size()), t_.cols());
            Vec b(static_cast<Eigen::Index>(keep.size()));
            std::vector<Eigen::Index> basis;
            for (std::size_t k = 0; k < keep.size(); ++k) {
                t.row(static_cast<Eigen::Index>(k)) = t_.row(keep[k]);
                b(static_cast<Eigen::Index>(k)) = beta_(keep[k]);
                basis.push_back(basis_[static_cast<std::size_t>(keep[k])]);
            }
            std::vector<Eigen::Index> rows;
            for (auto k : keep) rows.push_back(rows_[static_cast<std::size_t>(k)]);
            t_ = std::move(t);
            beta_ = std::move(b);
            basis_ = std::move(basis);
            rows_ = std::move(rows);
        }
        for (Eigen::Index j = first_artificial; j < t_.cols(); ++j)
            allowed_[static_cast<std::size_t>(j)] = false;
    }

    Vec primal() const {
        Vec y = Vec::Zero(t_.cols());
        for (Eigen::Index i = 0; i < t_.rows(); ++i)
            y(basis_[static_cast<std::size_t>(i)]) = std::max(Scalar(0), beta_(i));
        return y;
    }

    // Recomputes the basic values from the original rows, discarding the
    // rounding accumulated over the pivots. False if the basis is singular.
    bool refine() {
        const auto m = static_cast<Eigen::Index>(basis_.size());
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> B(m, m);
        Vec rhs(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const Eigen::Index row = rows_[static_cast<std::size_t>(i)];
            rhs(i) = b0_(row);
            for (Eigen::Index j = 0; j < m; ++j) B(i, j) = t0_(row, basis_[static_cast<std::size_t>(j)]);
        }
        Eigen::FullPivLU<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> lu(B);
        if (lu.rank() < m) return false;
        beta_ = lu.solve(rhs);
        return beta_.allFinite();
    }

    std::size_t iterations() const { return iterations_; }

private:
    Mat t_;
    Vec beta_;
    std::vector<Eigen::Index> basis_;
    PivotRule rule_;
    LpTolerances<Scalar> tol_;
    std::size_t cap_;
    std::size_t iterations_ = 0;
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> reduced_;
    std::vector<bool> allowed_;
    Mat t0_;
    Vec b0_;
    std::vector<Eigen::Index> rows_;  // original row of each tableau row
};

}  // namespace detail

// Solves the LP. Status is Optimal/Infeasible/Unbounded; throws
// NumericalFailure if the pivot count exceeds 50 * (rows + variables).
template <typename Scalar>
LpSolution<Scalar> solve_lp(const LinearProgram<Scalar>& lp,
                            PivotRule rule = PivotRule::Bland,
                            const LpTolerances<Scalar>& tol = {}) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using RowMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
    lp.validate();

    const Eigen::Index n = lp.num_vars();
    const Eigen::Index m_in = lp.ineq_lhs.rows();
    const Eigen::Index m_eq = lp.eq_lhs.rows();

    // x_j = offset_j + sum_k coef * y_k over at most two standard variables.
    struct VarMap {
        Eigen::Index pos = -1, neg = -1;
        Scalar offset = 0;
        Scalar sign = 1;
    };
    std::vector<VarMap> map(static_cast<std::size_t>(n));
    Eigen::Index ny = 0;
    std::vector<std::pair<Eigen::Index, Scalar>> range_rows;  // y_k <= width
    for (Eigen::Index j = 0; j < n; ++j) {
        auto& vm = map[static_cast<std::size_t>(j)];
        const Scalar lo = lp.lower(j), hi = lp.upper(j);
        if (lo > -inf) {
            vm.pos = ny++;
            vm.offset = lo;
            if (hi < inf) range_rows.emplace_back(vm.pos, hi - lo);
        } else if (hi < inf) {
            vm.pos = ny++;
            vm.offset = hi;
            vm.sign = -1;
        } else {
            vm.pos = ny++;
            vm.neg = ny++;
        }
    }

    const Eigen::Index m_range = static_cast<Eigen::Index>(range_rows.size());
    const Eigen::Index m_le = m_in + m_range;
    const Eigen::Index m = m_le + m_eq;

    // Structural block in y-space.
    RowMat a = RowMat::Zero(m, ny);
    Vec b(m);
    Vec cost = Vec::Zero(ny);
    auto lift_row = [&](const auto& row, Eigen::Index i, Scalar rhs) {
        Scalar shift = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const Scalar v = row(j);
            if (v == Scalar(0)) continue;
            const auto& vm = map[static_cast<std::size_t>(j)];
            a(i, vm.pos) += vm.sign * v;
            if (vm.neg >= 0) a(i, vm.neg) -= v;
            shift += v * vm.offset;
        }
        b(i) = rhs - shift;
    };
    for (Eigen::Index i = 0; i < m_in; ++i) lift_row(lp.ineq_lhs.row(i), i, lp.ineq_rhs(i));
    for (Eigen::Index k = 0; k < m_range; ++k) {
        a(m_in + k, range_rows[static_cast<std::size_t>(k)].first) = 1;
        b(m_in + k) = range_rows[static_cast<std::size_t>(k)].second;
    }
    for (Eigen::Index i = 0; i < m_eq; ++i) lift_row(lp.eq_lhs.row(i), m_le + i, lp.eq_rhs(i));
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& vm = map[static_cast<std::size_t>(j)];
        cost(vm.pos) += vm.sign * lp.objective(j);
        if (vm.neg >= 0) cost(vm.neg) -= lp.objective(j);
    }

    // Slack columns for the <= rows, then artificials where the slack cannot
    // serve as the initial basic variable.
    std::vector<Scalar> slack_sign(static_cast<std::size_t>(m_le), 1);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (b(i) < 0) {
            a.row(i) *= -1;
            b(i) = -b(i);
            if (i < m_le) slack_sign[static_cast<std::size_t>(i)] = -1;
        }
    }
    std::vector<Eigen::Index> needs_art;
    for (Eigen::Index i = 0; i < m; ++i)
        if (i >= m_le || slack_sign[static_cast<std::size_t>(i)] < 0) needs_art.push_back(i);

    const Eigen::Index first_slack = ny;
    const Eigen::Index first_art = ny + m_le;
    const Eigen::Index total = first_art + static_cast<Eigen::Index>(needs_art.size());
    RowMat t = RowMat::Zero(m, total);
    t.leftCols(ny) = a;
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m), -1);
    for (Eigen::Index i = 0; i < m_le; ++i) {
        t(i, first_slack + i) = slack_sign[static_cast<std::size_t>(i)];
        if (slack_sign[static_cast<std::size_t>(i)] > 0) basis[static_cast<std::size_t>(i)] = first_slack + i;
    }
    for (std::size_t k = 0; k < needs_art.size(); ++k) {
        t(needs_art[k], first_art + static_cast<Eigen::Index>(k)) = 1;
        basis[static_cast<std::size_t>(needs_art[k])] = first_art + static_cast<Eigen::Index>(k);
    }

    const std::size_t cap = static_cast<std::size_t>(50 * std::max<Eigen::Index>(1, m_in + m_eq + n));
    detail::SimplexTableau<Scalar> tab(std::move(t), b, std::move(basis), rule, tol, cap);

    LpSolution<Scalar> sol;
    const Scalar b_scale = std::max<Scalar>(Scalar(1), b.size() ? b.cwiseAbs().maxCoeff() : Scalar(0));
    if (!needs_art.empty()) {
        Vec phase1 = Vec::Zero(total);
        phase1.tail(static_cast<Eigen::Index>(needs_art.size())).setConstant(-1);
        tab.optimize(phase1);
        const Vec y = tab.primal();
        const Scalar infeas = y.tail(static_cast<Eigen::Index>(needs_art.size())).sum();
        if (infeas > tol.feasibility * b_scale) {
            sol.status = LpStatus::Infeasible;
            sol.iterations = tab.iterations();
            return sol;
        }
        tab.expel_artificials(first_art);
    }

    Vec phase2 = Vec::Zero(total);
    phase2.head(ny) = cost;
    if (!tab.optimize(phase2)) {
        sol.status = LpStatus::Unbounded;
        sol.iterations = tab.iterations();
        return sol;
    }
    auto recover = [&] {
        const Vec y = tab.primal();
        Vec x(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto& vm = map[static_cast<std::size_t>(j)];
            x(j) = vm.offset + vm.sign * y(vm.pos) - (vm.neg >= 0 ? y(vm.neg) : Scalar(0));
        }
        return x;
    };
    Vec x = recover();
    const Scalar accept = std::sqrt(tol.feasibility) * b_scale;
    Scalar viol = max_violation(lp, x);
    if (viol > tol.feasibility * b_scale && tab.refine()) {
        x = recover();
        viol = max_violation(lp, x);
    }
    if (viol > accept)
        throw NumericalFailure("simplex: final basis violates the constraints by " + std::to_string(double(viol)));
    sol.status = LpStatus::Optimal;
    sol.point = x;
    sol.objective_value = lp.objective.dot(x);
    sol.iterations = tab.iterations();
    return sol;
}

}  // namespace cocorl
