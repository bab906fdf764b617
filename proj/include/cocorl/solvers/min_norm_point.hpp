#pragma once

// Wolfe's minimum-norm-point algorithm, used to project a target onto the
// convex hull of a finite generator set.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "cocorl/errors.hpp"

namespace cocorl {

template <typename Scalar>
struct MinNormResult {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Vec point;    // closest point of conv(generators) to the target
    Scalar distance = Scalar(0);
    Vec weights;  // convex weights over the generators, point = G * weights
};

// `generators` holds one generator per column.
template <typename Scalar>
MinNormResult<Scalar> min_norm_point(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& target,
                                     const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& generators) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index k = generators.cols();
    if (k == 0) throw InvalidArgument("min_norm_point: empty generator set");
    if (generators.rows() != target.size()) throw InvalidArgument("min_norm_point: dimension mismatch");

    const Mat p = generators.colwise() - target;
    const Scalar scale = std::max<Scalar>(Scalar(1), p.colwise().squaredNorm().maxCoeff());
    const Scalar z1 = Scalar(1e-12) * scale;  // optimality test
    const Scalar z2 = Scalar(1e-10);          // weight positivity

    Eigen::Index start;
    p.colwise().squaredNorm().minCoeff(&start);
    std::vector<Eigen::Index> corral{start};
    std::vector<Scalar> lambda{Scalar(1)};
    Vec x = p.col(start);

    auto affine_minimizer = [&](const std::vector<Eigen::Index>& s) {
        const Eigen::Index n = static_cast<Eigen::Index>(s.size());
        Mat kkt = Mat::Zero(n + 1, n + 1);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) kkt(i, j) = p.col(s[i]).dot(p.col(s[j]));
        kkt.block(0, n, n, 1).setOnes();
        kkt.block(n, 0, 1, n).setOnes();
        Vec rhs = Vec::Zero(n + 1);
        rhs(n) = 1;
        Vec sol = kkt.completeOrthogonalDecomposition().solve(rhs);
        Vec alpha = sol.head(n);
        alpha /= alpha.sum();
        return alpha;
    };

    const int max_major = 50 * static_cast<int>(k) + 100;
    for (int major = 0; major < max_major; ++major) {
        Eigen::Index j;
        (p.transpose() * x).minCoeff(&j);
        if (x.dot(p.col(j)) > x.squaredNorm() - z1) break;
        if (std::find(corral.begin(), corral.end(), j) != corral.end()) break;
        corral.push_back(j);
        lambda.push_back(Scalar(0));

        for (int minor = 0; minor < 10 * static_cast<int>(k) + 10; ++minor) {
            const Vec alpha = affine_minimizer(corral);
            if (alpha.minCoeff() > z2) {
                for (std::size_t i = 0; i < corral.size(); ++i) lambda[i] = alpha(static_cast<Eigen::Index>(i));
                break;
            }
            Scalar theta = Scalar(1);
            for (std::size_t i = 0; i < corral.size(); ++i) {
                const Scalar a = alpha(static_cast<Eigen::Index>(i));
                if (a <= z2 && lambda[i] - a > Scalar(0)) theta = std::min(theta, lambda[i] / (lambda[i] - a));
            }
            std::vector<Eigen::Index> kept;
            std::vector<Scalar> kept_lambda;
            for (std::size_t i = 0; i < corral.size(); ++i) {
                const Scalar l = lambda[i] + theta * (alpha(static_cast<Eigen::Index>(i)) - lambda[i]);
                if (l > z2) {
                    kept.push_back(corral[i]);
                    kept_lambda.push_back(l);
                }
            }
            if (kept.empty()) {  // numerical corner: fall back to the newest point
                kept.push_back(corral.back());
                kept_lambda.push_back(Scalar(1));
            }
            Scalar total = 0;
            for (Scalar l : kept_lambda) total += l;
            for (Scalar& l : kept_lambda) l /= total;
            corral = std::move(kept);
            lambda = std::move(kept_lambda);
        }
        x.setZero();
        for (std::size_t i = 0; i < corral.size(); ++i) x += lambda[i] * p.col(corral[i]);
    }

    MinNormResult<Scalar> out;
    out.weights = Vec::Zero(k);
    for (std::size_t i = 0; i < corral.size(); ++i) out.weights(corral[i]) = lambda[i];
    out.point = generators * out.weights;
    out.distance = (out.point - target).norm();
    return out;
}

template <typename Scalar>
MinNormResult<Scalar> min_norm_point(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& target,
                                     const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& generators) {
    if (generators.empty()) throw InvalidArgument("min_norm_point: empty generator set");
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> g(target.size(), static_cast<Eigen::Index>(generators.size()));
    for (std::size_t i = 0; i < generators.size(); ++i) g.col(static_cast<Eigen::Index>(i)) = generators[i];
    return min_norm_point<Scalar>(target, g);
}

}  // namespace cocorl
