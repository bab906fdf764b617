#pragma once

// One-sided (Hestenes) Jacobi singular value decomposition.
//
//     M = U * diag(singular_values) * V^T
//
// U is rows x rows and V is cols x cols, both orthogonal; singular values are
// sorted in descending order. Null-space columns of U and V are completed to a
// full orthonormal basis, which the hull projection relies on.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "cocorl/errors.hpp"

namespace cocorl {

template <typename Scalar>
struct SvdResult {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Mat U;
    Vec singular_values;  // length min(rows, cols)
    Mat V;

    // Number of singular values above rel_tol * sigma_max (and above an
    // absolute floor so that an all-zero matrix has rank 0).
    Eigen::Index rank(Scalar rel_tol = Scalar(1e-9), Scalar abs_floor = Scalar(1e-12)) const {
        if (singular_values.size() == 0) return 0;
        const Scalar cut = std::max(rel_tol * singular_values(0), abs_floor);
        Eigen::Index r = 0;
        while (r < singular_values.size() && singular_values(r) > cut) ++r;
        return r;
    }
};

namespace detail {

// Extends the first `filled` orthonormal columns of q to a full basis.
template <typename Scalar>
void complete_basis(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& q, Eigen::Index filled) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = q.rows();
    Eigen::Index next = filled;
    for (Eigen::Index e = 0; e < n && next < q.cols(); ++e) {
        Vec v = Vec::Unit(n, e);
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index c = 0; c < next; ++c) v -= q.col(c).dot(v) * q.col(c);
        const Scalar nv = v.norm();
        if (nv > Scalar(1e-6)) q.col(next++) = v / nv;
    }
    if (next < q.cols()) throw NumericalFailure("svd: failed to complete orthonormal basis");
}

// Tall-or-square case (rows >= cols).
template <typename Scalar>
SvdResult<Scalar> jacobi_svd_tall(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m, int max_sweeps) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index rows = m.rows(), cols = m.cols();
    Mat u = m;
    Mat v = Mat::Identity(cols, cols);
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    // Columns below this squared norm are round-off; rotating them against
    // each other need not settle.
    const Scalar negligible = eps * eps * m.squaredNorm();

    bool converged = cols < 2;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        converged = true;
        for (Eigen::Index p = 0; p + 1 < cols; ++p) {
            for (Eigen::Index q = p + 1; q < cols; ++q) {
                const Scalar alpha = u.col(p).squaredNorm();
                const Scalar beta = u.col(q).squaredNorm();
                const Scalar gamma = u.col(p).dot(u.col(q));
                if (gamma == Scalar(0) || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                if (alpha <= negligible || beta <= negligible) continue;
                converged = false;
                const Scalar zeta = (beta - alpha) / (2 * gamma);
                const Scalar t = (zeta >= 0 ? Scalar(1) : Scalar(-1)) / (std::abs(zeta) + std::sqrt(1 + zeta * zeta));
                const Scalar c = 1 / std::sqrt(1 + t * t);
                const Scalar s = c * t;
                const Vec up = u.col(p);
                u.col(p) = c * up - s * u.col(q);
                u.col(q) = s * up + c * u.col(q);
                const Vec vp = v.col(p);
                v.col(p) = c * vp - s * v.col(q);
                v.col(q) = s * vp + c * v.col(q);
            }
        }
    }
    if (!converged) throw NumericalFailure("svd: Jacobi sweeps did not converge");

    Vec sigma(cols);
    for (Eigen::Index j = 0; j < cols; ++j) sigma(j) = u.col(j).norm();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(cols));
    std::iota(order.begin(), order.end(), Eigen::Index(0));
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sigma(a) > sigma(b); });

    SvdResult<Scalar> out;
    out.singular_values.resize(cols);
    out.V.resize(cols, cols);
    out.U = Mat::Zero(rows, rows);
    const Scalar floor = std::max<Scalar>(sigma.size() ? sigma.maxCoeff() : Scalar(0), Scalar(1)) * eps * Scalar(rows + cols);
    Eigen::Index filled = 0;
    for (Eigen::Index k = 0; k < cols; ++k) {
        const Eigen::Index j = order[static_cast<std::size_t>(k)];
        out.singular_values(k) = sigma(j);
        out.V.col(k) = v.col(j);
        if (sigma(j) > floor && filled == k) {
            out.U.col(k) = u.col(j) / sigma(j);
            ++filled;
        }
    }
    // Zero singular values (and anything after them) get arbitrary orthonormal
    // completions; the corresponding singular values are forced to zero so
    // that the factorisation stays exact.
    for (Eigen::Index k = filled; k < cols; ++k) out.singular_values(k) = Scalar(0);
    complete_basis<Scalar>(out.U, filled);
    return out;
}

}  // namespace detail

template <typename Scalar>
SvdResult<Scalar> svd(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m, int max_sweeps = 80) {
    if (!m.allFinite()) throw InvalidArgument("svd: non-finite entry");
    if (m.rows() >= m.cols()) return detail::jacobi_svd_tall<Scalar>(m, max_sweeps);
    // Wide matrix: decompose the transpose and swap the factors.
    SvdResult<Scalar> t = detail::jacobi_svd_tall<Scalar>(m.transpose(), max_sweeps);
    SvdResult<Scalar> out;
    out.U = std::move(t.V);
    out.V = std::move(t.U);
    out.singular_values = std::move(t.singular_values);
    return out;
}

}  // namespace cocorl
