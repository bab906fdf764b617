#include <doctest.h>

#include <functional>
#include <random>

#include <Eigen/Dense>

#include "cocorl/solvers/lp.hpp"
#include "cocorl/solvers/min_norm_point.hpp"
#include "cocorl/solvers/svd.hpp"

using namespace cocorl;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace {

// Classical two-sided Jacobi eigensolver for a symmetric matrix. Independent
// of the one-sided SVD under test.
Vec jacobi_eigenvalues(Mat a) {
    const Eigen::Index n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j) off += a(i, j) * a(i, j);
        if (off < 1e-24) break;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = 0.5 * std::atan2(2 * a(p, q), a(q, q) - a(p, p));
                const double c = std::cos(theta), s = std::sin(theta);
                Mat g = Mat::Identity(n, n);
                g(p, p) = c;
                g(q, q) = c;
                g(p, q) = s;
                g(q, p) = -s;
                a = g.transpose() * a * g;
            }
    }
    Vec ev = a.diagonal();
    std::sort(ev.data(), ev.data() + n, std::greater<double>());
    return ev;
}

// Vertex enumeration by intersecting every triple of facets in 3D.
double brute_force_max_3d(const Mat& a, const Vec& b, const Vec& theta) {
    double best = -std::numeric_limits<double>::infinity();
    const Eigen::Index m = a.rows();
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j)
            for (Eigen::Index k = j + 1; k < m; ++k) {
                Eigen::Matrix3d s;
                s << a.row(i), a.row(j), a.row(k);
                if (std::abs(s.determinant()) < 1e-10) continue;
                const Eigen::Vector3d v = s.fullPivLu().solve(Eigen::Vector3d(b(i), b(j), b(k)));
                if (((a * v - b).array() <= 1e-9).all()) best = std::max(best, theta.dot(v));
            }
    return best;
}

}  // namespace

TEST_CASE("lp: single active bound") {
    LinearProgram<double> lp(1);
    lp.objective << 1;
    lp.add_inequality(Vec::Ones(1), 1);
    auto sol = solve_lp(lp);
    REQUIRE(sol.optimal());
    CHECK(sol.point(0) == doctest::Approx(1));
}

TEST_CASE("lp: contradictory bounds are infeasible") {
    LinearProgram<double> lp(1);
    lp.objective << 1;
    lp.add_inequality(Vec::Ones(1), 1);
    lp.lower(0) = 2;
    CHECK(solve_lp(lp).status == LpStatus::Infeasible);
}

TEST_CASE("lp: unbounded ray") {
    LinearProgram<double> lp(2);
    lp.objective << 1, 1;
    Vec row(2);
    row << 1, -1;
    lp.add_inequality(row, 1);
    CHECK(solve_lp(lp).status == LpStatus::Unbounded);
}

TEST_CASE("lp: free variables, equalities and upper-only bounds") {
    // max -x0 + x1  s.t. x0 + x1 = 1, x0 free, x1 <= 3 (no lower bound)
    LinearProgram<double> lp(2);
    lp.objective << -1, 1;
    lp.set_free(0);
    lp.lower(1) = -std::numeric_limits<double>::infinity();
    lp.upper(1) = 3;
    Vec row(2);
    row << 1, 1;
    lp.add_equality(row, 1);
    auto sol = solve_lp(lp);
    REQUIRE(sol.optimal());
    CHECK(sol.point(0) == doctest::Approx(-2));
    CHECK(sol.point(1) == doctest::Approx(3));
    CHECK(sol.objective_value == doctest::Approx(5));
}

TEST_CASE("lp: random 3D polytopes match vertex enumeration") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        Mat a(6, 3);
        for (Eigen::Index i = 0; i < 6; ++i) {
            Eigen::Vector3d n(g(rng), g(rng), g(rng));
            a.row(i) = n.normalized().transpose();
        }
        // Add a bounding box so the polytope is compact.
        Mat full(12, 3);
        full << a, Mat::Identity(3, 3), -Mat::Identity(3, 3);
        Vec b(12);
        for (Eigen::Index i = 0; i < 6; ++i) b(i) = 0.5 + std::abs(g(rng));
        b.tail(6).setConstant(3);
        Vec theta(3);
        theta << g(rng), g(rng), g(rng);

        LinearProgram<double> lp(3);
        lp.objective = theta;
        for (int j = 0; j < 3; ++j) lp.set_free(j);
        for (Eigen::Index i = 0; i < 12; ++i) lp.add_inequality(full.row(i).transpose(), b(i));
        for (PivotRule rule : {PivotRule::Bland, PivotRule::DantzigWithBlandFallback}) {
            auto sol = solve_lp(lp, rule);
            REQUIRE(sol.optimal());
            CHECK(max_violation(lp, sol.point) <= 1e-8);
            CHECK(std::abs(sol.objective_value - brute_force_max_3d(full, b, theta)) <= 1e-7);
        }
    }
}

TEST_CASE("lp: weak duality against a synthesized dual point") {
    // max c^T x, Ax <= b, x >= 0. Any y >= 0 with A^T y >= c bounds the optimum by b^T y.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Mat a(5, 4);
        for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = u(rng);
        Vec b(5), c(4);
        for (Eigen::Index i = 0; i < 5; ++i) b(i) = u(rng);
        for (Eigen::Index i = 0; i < 4; ++i) c(i) = u(rng);
        LinearProgram<double> lp(4);
        lp.objective = c;
        for (Eigen::Index i = 0; i < 5; ++i) lp.add_inequality(a.row(i).transpose(), b(i));
        auto sol = solve_lp(lp);
        REQUIRE(sol.optimal());
        // y concentrated on row 0, scaled until dual feasible.
        Vec y = Vec::Zero(5);
        y(0) = (c.array() / a.row(0).transpose().array()).maxCoeff();
        CHECK(sol.objective_value <= b.dot(y) + 1e-7);
    }
}

TEST_CASE("lp: malformed program throws") {
    LinearProgram<double> lp(2);
    lp.ineq_rhs.resize(1);
    CHECK_THROWS_AS(solve_lp(lp), InvalidArgument);
}

TEST_CASE("min_norm_point: membership and symmetric projection") {
    Mat gens(2, 2);
    gens << 0, 0, -1, 1;
    Vec t(2);
    t << 2, 0;
    auto r = min_norm_point<double>(t, gens);
    CHECK(r.distance == doctest::Approx(2));
    CHECK(r.point.norm() == doctest::Approx(0).epsilon(1e-12));

    auto r0 = min_norm_point<double>(Vec(gens.col(0)), gens);
    CHECK(r0.distance <= 1e-12);
}

TEST_CASE("min_norm_point: random 4D matches weight grid search") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 5; ++trial) {
        Mat gens(4, 6);
        for (Eigen::Index i = 0; i < gens.size(); ++i) gens(i) = g(rng);
        Vec t(4);
        for (Eigen::Index i = 0; i < 4; ++i) t(i) = 2 * g(rng);
        auto r = min_norm_point<double>(t, gens);
        CHECK(r.weights.minCoeff() >= -1e-12);
        CHECK(std::abs(r.weights.sum() - 1) <= 1e-8);
        CHECK((gens * r.weights - r.point).norm() <= 1e-10);

        // Coarse grid over the 5-simplex at resolution 1/20, then local
        // coordinate refinement with shrinking step down to 1e-6.
        const int res = 20;
        Vec best_w;
        double best = std::numeric_limits<double>::infinity();
        std::vector<int> c(6, 0);
        std::function<void(int, int)> rec = [&](int idx, int left) {
            if (idx == 5) {
                c[5] = left;
                Vec w(6);
                for (int i = 0; i < 6; ++i) w(i) = double(c[i]) / res;
                const double d = (gens * w - t).norm();
                if (d < best) {
                    best = d;
                    best_w = w;
                }
                return;
            }
            for (int v = 0; v <= left; ++v) {
                c[idx] = v;
                rec(idx + 1, left - v);
            }
        };
        rec(0, res);
        for (double step = 1.0 / res; step > 1e-7; step *= 0.5) {
            bool moved = true;
            while (moved) {
                moved = false;
                for (int i = 0; i < 6; ++i)
                    for (int j = 0; j < 6; ++j) {
                        if (i == j || best_w(j) < step) continue;
                        Vec w = best_w;
                        w(i) += step;
                        w(j) -= step;
                        const double d = (gens * w - t).norm();
                        if (d < best - 1e-15) {
                            best = d;
                            best_w = w;
                            moved = true;
                        }
                    }
            }
        }
        CHECK(r.distance <= best + 1e-6);
        CHECK(r.distance >= best - 1e-5);
    }
}

TEST_CASE("min_norm_point: empty generator set throws") {
    CHECK_THROWS_AS(min_norm_point<double>(Vec::Zero(2), Mat(2, 0)), InvalidArgument);
}

TEST_CASE("svd: identity and rank one") {
    auto s = svd<double>(Mat::Identity(3, 3));
    CHECK((s.singular_values - Vec::Ones(3)).cwiseAbs().maxCoeff() <= 1e-12);

    Vec u(4), v(3);
    u << 1, 2, -1, 0.5;
    v << 3, 0, -2;
    auto r = svd<double>(u * v.transpose());
    CHECK(r.singular_values(0) == doctest::Approx(u.norm() * v.norm()));
    CHECK(r.singular_values.tail(2).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(r.rank() == 1);
}

TEST_CASE("svd: random shapes against eigen-oracle, reconstruction and orthogonality") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (auto [rows, cols] : {std::pair{5, 3}, std::pair{3, 5}, std::pair{4, 4}, std::pair{6, 1}}) {
        Mat m(rows, cols);
        for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = g(rng);
        auto s = svd<double>(m);
        REQUIRE(s.U.rows() == rows);
        REQUIRE(s.V.rows() == cols);
        Mat sigma = Mat::Zero(rows, cols);
        for (Eigen::Index i = 0; i < s.singular_values.size(); ++i) sigma(i, i) = s.singular_values(i);
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        CHECK((s.U * sigma * s.V.transpose() - m).cwiseAbs().maxCoeff() <= 1e-9 * scale);
        CHECK((s.U.transpose() * s.U - Mat::Identity(rows, rows)).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK((s.V.transpose() * s.V - Mat::Identity(cols, cols)).cwiseAbs().maxCoeff() <= 1e-9);
        for (Eigen::Index i = 0; i + 1 < s.singular_values.size(); ++i)
            CHECK(s.singular_values(i) >= s.singular_values(i + 1));

        const Mat gram = rows >= cols ? Mat(m.transpose() * m) : Mat(m * m.transpose());
        const Vec ev = jacobi_eigenvalues(gram);
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            CHECK(std::abs(std::sqrt(std::max(0.0, ev(i))) - s.singular_values(i)) <= 1e-9);
    }
}

TEST_CASE("svd: rank-deficient input still returns full orthogonal factors") {
    Mat m(4, 3);
    m << 1, 2, 3, 2, 4, 6, 0, 0, 0, 1, 2, 3;
    auto s = svd<double>(m);
    CHECK(s.rank() == 1);
    CHECK((s.U.transpose() * s.U - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-9);
    Mat sigma = Mat::Zero(4, 3);
    for (Eigen::Index i = 0; i < 3; ++i) sigma(i, i) = s.singular_values(i);
    CHECK((s.U * sigma * s.V.transpose() - m).cwiseAbs().maxCoeff() <= 1e-9 * 6);
}

