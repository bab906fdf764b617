#include <doctest.h>

#include <random>
#include <sstream>

#include "cocorl/errors.hpp"
#include "cocorl/geometry.hpp"
#include "cocorl/solvers/lp.hpp"

using namespace cocorl;

namespace {

// Convex-combination feasibility LP: does x = sum_i l_i p_i with l in the simplex?
bool lp_membership(const std::vector<Vec>& pts, const Vec& x, double tol = 1e-9) {
    const auto k = static_cast<Eigen::Index>(pts.size());
    LinearProgram<double> lp(k);
    for (Eigen::Index r = 0; r < x.size(); ++r) {
        Vec row(k);
        for (Eigen::Index i = 0; i < k; ++i) row(i) = pts[static_cast<std::size_t>(i)](r);
        // Relaxed equality as two inequalities so boundary points are not lost to rounding.
        lp.add_inequality(row, x(r) + tol);
        lp.add_inequality(-row, -x(r) + tol);
    }
    lp.add_equality(Vec::Ones(k), 1.0);
    return solve_lp(lp).status == LpStatus::Optimal;
}

Vec random_vec(Eigen::Index d, std::mt19937_64& rng, double lo = 0, double hi = 1) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = u(rng);
    return v;
}

}  // namespace

TEST_CASE("hull: single point closed form") {
    Vec p(3);
    p << 0.2, 0.5, 1.0;
    const auto h = convex_hull({p});
    CHECK(h.A.rows() == 6);
    CHECK(h.effective_dim == 0);
    CHECK(contains(h, p));
    CHECK_FALSE(contains(h, p + Vec::Constant(3, 1e-5)));
}

TEST_CASE("hull: two points closed form") {
    Vec p1(3), p2(3);
    p1 << 0, 0, 0;
    p2 << 1, 1, 0;
    const auto h = convex_hull({p1, p2});
    CHECK(h.A.rows() == 2 * 2 + 2);
    CHECK(h.effective_dim == 1);
    CHECK(contains(h, 0.5 * (p1 + p2)));
    CHECK_FALSE(contains(h, 1.1 * p2));
    Vec off(3);
    off << 0.5, 0.5, 1e-4;
    CHECK_FALSE(contains(h, off));
}

TEST_CASE("hull: unit triangle") {
    std::vector<Vec> pts{Vec::Zero(2), Vec::Unit(2, 0), Vec::Unit(2, 1)};
    const auto h = convex_hull(pts);
    CHECK(h.A.rows() == 3);
    Vec q(2);
    q << 0.25, 0.25;
    CHECK(contains(h, q));
    CHECK_FALSE(contains(h, Vec::Ones(2)));
}

TEST_CASE("hull: random 4D point clouds agree with the LP membership oracle") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<Vec> pts;
        for (int i = 0; i < 20; ++i) pts.push_back(random_vec(4, rng));
        const auto h = convex_hull(pts);
        CHECK(h.effective_dim == 4);
        int mismatches = 0;
        for (int q = 0; q < 1000; ++q) {
            const Vec x = random_vec(4, rng, -0.1, 1.1);
            // Skip points within 1e-6 of the boundary where both tests are tolerance-bound.
            const double slack = (h.A * x - h.b).maxCoeff();
            if (std::abs(slack) < 1e-6) continue;
            mismatches += (contains(h, x) != lp_membership(pts, x)) ? 1 : 0;
        }
        CHECK(mismatches == 0);
        // H/V duality.
        for (const auto& p : pts) CHECK(contains(h, p, 1e-7));
        for (Eigen::Index f = 0; f < h.A.rows(); ++f) {
            int support = 0;
            for (const auto& p : pts) support += std::abs(h.A.row(f).dot(p) - h.b(f)) <= 1e-6 ? 1 : 0;
            CHECK(support >= h.effective_dim);
        }
    }
}

TEST_CASE("hull: degenerate input is projected and lifted") {
    // Points on a 2D plane inside R^4.
    std::mt19937_64 rng(2);
    Vec o = random_vec(4, rng), u = random_vec(4, rng), v = random_vec(4, rng);
    std::vector<Vec> pts;
    for (int i = 0; i < 12; ++i) {
        const Vec c = random_vec(2, rng);
        pts.push_back(o + c(0) * u + c(1) * v);
    }
    const auto h = convex_hull(pts);
    CHECK(h.effective_dim == 2);
    for (const auto& p : pts) CHECK(contains(h, p, 1e-7));
    Vec mean = Vec::Zero(4);
    for (const auto& p : pts) mean += p / 12.0;
    CHECK(contains(h, mean));
    Vec normal = random_vec(4, rng);
    normal -= normal.dot(u.normalized()) * u.normalized();
    const Vec vn = v - v.dot(u.normalized()) * u.normalized();
    normal -= normal.dot(vn.normalized()) * vn.normalized();
    CHECK_FALSE(contains(h, mean + 1e-4 * normal.normalized()));
    int mismatches = 0;
    for (int q = 0; q < 300; ++q) {
        const Vec c = random_vec(2, rng, -0.3, 1.3);
        const Vec x = o + c(0) * u + c(1) * v;
        if (std::abs((h.A * x - h.b).maxCoeff()) < 1e-6) continue;
        mismatches += contains(h, x) != lp_membership(pts, x, 1e-7);
    }
    CHECK(mismatches == 0);
}

TEST_CASE("hull: monotone under point addition, contains centroid, rejects outward offsets") {
    std::mt19937_64 rng(3);
    std::vector<Vec> pts;
    for (int i = 0; i < 8; ++i) pts.push_back(random_vec(3, rng));
    const auto h1 = convex_hull(pts);
    pts.push_back(random_vec(3, rng, -0.5, 1.5));
    const auto h2 = convex_hull(pts);
    for (const auto& v : *h1.vertices) CHECK(contains(h2, v));
    Vec c = Vec::Zero(3);
    for (const auto& v : *h2.vertices) c += v / static_cast<double>(h2.vertices->size());
    CHECK(contains(h2, c));
    const double tol = 1e-7;
    for (Eigen::Index f = 0; f < h2.A.rows(); ++f) {
        // Walk from a facet point along its outward normal.
        Vec on;
        for (const auto& v : *h2.vertices)
            if (std::abs(h2.A.row(f).dot(v) - h2.b(f)) < 1e-9) on = v;
        if (on.size() == 0) continue;
        const Vec n = h2.A.row(f).transpose();
        CHECK_FALSE(contains(h2, on + 10 * tol * n / n.squaredNorm(), tol));
    }
}

TEST_CASE("furthest_point: inside, perpendicular, exhaustive") {
    std::vector<Vec> seg{Vec::Zero(2), Vec::Unit(2, 0)};
    Vec a(2), b(2);
    a << 0.5, 1;
    b << 0.5, 0.2;
    auto fp = furthest_point({a, b}, seg);
    CHECK(fp.index == 0);
    CHECK(fp.distance == doctest::Approx(1));

    auto inside = furthest_point({Vec::Zero(2), Vec::Unit(2, 0)}, seg);
    CHECK(inside.distance <= 1e-12);
    CHECK(inside.index == 0);

    std::mt19937_64 rng(4);
    std::vector<Vec> cands, verts;
    for (int i = 0; i < 10; ++i) cands.push_back(random_vec(3, rng, -1, 2));
    for (int i = 0; i < 5; ++i) verts.push_back(random_vec(3, rng));
    const auto best = furthest_point(cands, verts);
    const auto hull = convex_hull(verts);
    for (std::size_t i = 0; i < cands.size(); ++i) {
        const double d = furthest_point({cands[i]}, verts).distance;
        CHECK(d <= best.distance + 1e-12);
        CHECK((d <= 1e-9) == contains(hull, cands[i], 1e-7));
    }
}

TEST_CASE("intersect: idempotence, disjoint boxes, random simplices") {
    std::mt19937_64 rng(5);
    std::vector<Vec> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(random_vec(2, rng));
    const auto h = convex_hull(pts);
    const auto hh = intersect(h, h);
    CHECK_FALSE(hh.empty);
    for (int q = 0; q < 500; ++q) {
        const Vec x = random_vec(2, rng, -0.2, 1.2);
        CHECK(contains(hh, x) == contains(h, x));
    }

    auto unit_box = [](const Vec& lo) {
        std::vector<Vec> corners;
        for (std::size_t bits = 0; bits < 4; ++bits) corners.push_back(Box(lo, lo + Vec::Ones(2)).corner(bits));
        return convex_hull(corners);
    };
    Vec o1 = Vec::Zero(2), o2 = Vec::Constant(2, 3.0);
    CHECK(intersect(unit_box(o1), unit_box(o2)).empty);

    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Vec> s1, s2;
        for (int i = 0; i < 3; ++i) {
            s1.push_back(random_vec(2, rng));
            s2.push_back(random_vec(2, rng));
        }
        const auto p1 = convex_hull(s1), p2 = convex_hull(s2);
        const auto p = intersect(p1, p2);
        int mismatches = 0;
        for (int q = 0; q < 1000; ++q) {
            const Vec x = random_vec(2, rng);
            const double margin = std::min(std::abs((p1.A * x - p1.b).maxCoeff()), std::abs((p2.A * x - p2.b).maxCoeff()));
            if (margin < 1e-7) continue;
            mismatches += contains(p, x) != (contains(p1, x) && contains(p2, x));
        }
        CHECK(mismatches == 0);
    }
}

TEST_CASE("guaranteed hull: zero-width boxes reproduce the exact hull") {
    std::mt19937_64 rng(6);
    std::vector<Vec> centers;
    std::vector<Box> boxes;
    for (int i = 0; i < 5; ++i) {
        centers.push_back(random_vec(2, rng));
        boxes.emplace_back(centers.back(), centers.back());
    }
    const auto g = guaranteed_hull(boxes);
    const auto h = convex_hull(centers);
    int mismatches = 0;
    for (int q = 0; q < 1000; ++q) {
        const Vec x = random_vec(2, rng, -0.1, 1.1);
        if (std::abs((h.A * x - h.b).maxCoeff()) < 1e-6) continue;
        mismatches += contains(g, x) != contains(h, x);
    }
    CHECK(mismatches == 0);
}

TEST_CASE("guaranteed hull: oversized boxes give an empty set") {
    std::vector<Box> boxes;
    for (int i = 0; i < 3; ++i) {
        Vec c(2);
        c << 0.1 * i, 0.05 * i * i;
        boxes.emplace_back(c.array() - 5.0, c.array() + 5.0);
    }
    CHECK(guaranteed_hull(boxes).empty);
}

TEST_CASE("guaranteed hull: sampled selections never exclude a point of the result") {
    std::mt19937_64 rng(7);
    std::vector<Vec> centers{Vec::Zero(2), Vec::Unit(2, 0) * 2.0, Vec::Unit(2, 1) * 2.0};
    std::vector<Box> boxes;
    for (const auto& c : centers) boxes.emplace_back(c.array() - 0.1, c.array() + 0.1);
    const auto g = guaranteed_hull(boxes);
    REQUIRE_FALSE(g.empty);
    const auto centre_hull = convex_hull(centers);

    // Points of g: rejection-sample from the bounding square.
    std::vector<Vec> inside, just_outside;
    for (int q = 0; q < 20000 && inside.size() < 200; ++q) {
        const Vec x = random_vec(2, rng, -0.2, 2.2);
        if (contains(g, x, 0.0)) inside.push_back(x);
    }
    REQUIRE(inside.size() >= 50);
    for (const auto& x : inside) CHECK(contains(centre_hull, x));

    std::uniform_real_distribution<double> u(0, 1);
    std::bernoulli_distribution corner(0.5);
    std::vector<std::vector<Vec>> selections;
    for (int s = 0; s < 500; ++s) {
        std::vector<Vec> sel;
        for (const auto& b : boxes) {
            Vec x(2);
            for (int j = 0; j < 2; ++j) {
                const double t = (s % 2 == 0) ? (corner(rng) ? 1.0 : 0.0) : u(rng);
                x(j) = b.lower(j) + t * (b.upper(j) - b.lower(j));
            }
            sel.push_back(x);
        }
        selections.push_back(sel);
    }
    int counterexamples = 0;
    for (const auto& x : inside)
        for (const auto& sel : selections) counterexamples += lp_membership(sel, x, 1e-7) ? 0 : 1;
    CHECK(counterexamples == 0);

    // Just beyond each facet of g, some sampled selection must exclude the point.
    for (Eigen::Index f = 0; f < g.A.rows(); ++f) {
        // Point on facet f: maximise a_f^T x over g.
        LinearProgram<double> lp(2);
        lp.set_free(0);
        lp.set_free(1);
        lp.ineq_lhs = g.A;
        lp.ineq_rhs = g.b;
        lp.objective = g.A.row(f).transpose();
        const auto sol = solve_lp(lp);
        REQUIRE(sol.optimal());
        const Vec n = g.A.row(f).transpose().normalized();
        const Vec x = sol.point + 0.02 * n;
        bool excluded = false;
        for (const auto& sel : selections)
            if (!lp_membership(sel, x, 1e-9)) {
                excluded = true;
                break;
            }
        CHECK(excluded);
    }
}

TEST_CASE("guaranteed hull: budget check") {
    std::vector<Box> boxes(4, Box(Vec::Zero(20), Vec::Ones(20)));
    CHECK_THROWS_AS(guaranteed_hull(boxes), BudgetExceeded);
}

TEST_CASE("polytope text export round-trips") {
    std::vector<Vec> pts{Vec::Zero(2), Vec::Unit(2, 0), Vec::Unit(2, 1)};
    const auto h = convex_hull(pts);
    std::stringstream ss;
    write_polytope(ss, h);
    const auto back = read_polytope(ss);
    CHECK(back.A == h.A);
    CHECK(back.b == h.b);
    REQUIRE(back.vertices.has_value());
    CHECK(back.vertices->size() == h.vertices->size());
}
