#pragma once

// Convex polytopes in feature space.
//
// Hulls are built from finite point sets. Degenerate point sets (affine rank
// below the ambient dimension) are projected onto their affine hull, the hull
// is computed there, and the result is lifted back with pairs of slightly
// relaxed equality rows for the dead directions.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cocorl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Box {
    Vec lower;
    Vec upper;

    Box() = default;
    Box(Vec lo, Vec hi);
    Eigen::Index dim() const { return lower.size(); }
    Vec center() const { return 0.5 * (lower + upper); }
    bool contains(const Vec& x, double tol = 0.0) const;
    // Corner selected by the bit pattern: bit j set picks upper(j).
    Vec corner(std::size_t bits) const;
};

struct Polytope {
    Mat A;  // m x d
    Vec b;  // m
    std::optional<std::vector<Vec>> vertices;
    Eigen::Index effective_dim = 0;
    bool empty = false;  // set by intersect / guaranteed_hull when infeasible

    Eigen::Index dim() const { return A.cols(); }
    Eigen::Index num_halfspaces() const { return A.rows(); }
};

struct HullOptions {
    double eps = 1e-7;          // relaxation of lifted equality rows
    double rank_tol = 1e-9;     // sigma_i <= rank_tol * sigma_max is a dead direction
};

Polytope convex_hull(const std::vector<Vec>& points, const HullOptions& opt = {});

bool contains(const Polytope& p, const Vec& x, double tol = 1e-7);

struct FurthestPoint {
    std::size_t index = 0;
    Vec point;
    double distance = 0.0;
};

// Candidate with the largest Euclidean distance to conv(hull_vertices).
// Ties go to the lowest index.
FurthestPoint furthest_point(const std::vector<Vec>& candidates, const std::vector<Vec>& hull_vertices);

// H-representation intersection. Redundant rows are removed by LP; an empty
// result is returned with `empty = true` and no rows pruned.
Polytope intersect(const Polytope& p1, const Polytope& p2);

// Removes rows implied by the others. Leaves the polytope unchanged if empty.
Polytope prune_redundant(const Polytope& p, double tol = 1e-9);

// True if {x : Ax <= b} has a point, decided by LP.
bool is_feasible(const Polytope& p);

// Set of points that lie in conv(x_1..x_k) for every choice x_i in boxes[i].
// Throws BudgetExceeded when k * 2^d > budget.
Polytope guaranteed_hull(const std::vector<Box>& boxes, std::size_t budget = std::size_t(1) << 20,
                         const HullOptions& opt = {});

// Plain-text export: "polytope d m", m rows "a_1 .. a_d | b", then an optional
// "vertices n" block with one vertex per line.
void write_polytope(std::ostream& os, const Polytope& p);
Polytope read_polytope(std::istream& is);

}  // namespace cocorl
