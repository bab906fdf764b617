#include "cocorl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include "cocorl/errors.hpp"
#include "cocorl/solvers/lp.hpp"
#include "cocorl/solvers/min_norm_point.hpp"
#include "cocorl/solvers/svd.hpp"

namespace cocorl {

Box::Box(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) throw InvalidArgument("Box: bound lengths differ");
    if (((upper - lower).array() < 0.0).any()) throw InvalidArgument("Box: lower exceeds upper");
}

bool Box::contains(const Vec& x, double tol) const {
    return ((x - lower).array() >= -tol).all() && ((upper - x).array() >= -tol).all();
}

Vec Box::corner(std::size_t bits) const {
    Vec c = lower;
    for (Eigen::Index j = 0; j < c.size(); ++j)
        if ((bits >> j) & 1u) c(j) = upper(j);
    return c;
}

namespace {

struct Facet {
    std::vector<int> verts;  // sorted indices into the projected point set
    Vec normal;
    double offset = 0.0;
};

// Beneath-beyond construction of the full-dimensional hull of pts (columns)
// in R^m, m >= 2. Returns one facet per simplicial piece.
std::vector<Facet> full_dim_hull(const Mat& pts) {
    const auto m = static_cast<int>(pts.rows());
    const auto n = static_cast<int>(pts.cols());
    const double scale = std::max(1.0, pts.cwiseAbs().maxCoeff());
    const double vis_tol = 1e-10 * scale;

    // Initial simplex: greedily maximize the distance to the current affine hull.
    std::vector<int> simplex;
    {
        int first = 0;
        (pts.colwise() - pts.col(0)).colwise().squaredNorm().maxCoeff(&first);
        simplex.push_back(first);
        while (static_cast<int>(simplex.size()) < m + 1) {
            const auto s = static_cast<Eigen::Index>(simplex.size());
            Mat basis(m, s - 1);
            for (Eigen::Index j = 1; j < s; ++j) basis.col(j - 1) = pts.col(simplex[j]) - pts.col(simplex[0]);
            Eigen::HouseholderQR<Mat> qr(basis);
            Mat q = qr.householderQ() * Mat::Identity(m, s - 1);
            int best = -1;
            double best_r = -1.0;
            for (int i = 0; i < n; ++i) {
                Vec r = pts.col(i) - pts.col(simplex[0]);
                if (s > 1) r -= q * (q.transpose() * r);
                const double rn = r.norm();
                if (rn > best_r) {
                    best_r = rn;
                    best = i;
                }
            }
            if (best_r <= 1e-12 * scale) throw NumericalFailure("convex_hull: projected points are not full rank");
            simplex.push_back(best);
        }
    }
    Vec interior = Vec::Zero(m);
    for (int i : simplex) interior += pts.col(i);
    interior /= static_cast<double>(simplex.size());

    auto make_facet = [&](std::vector<int> verts) {
        std::sort(verts.begin(), verts.end());
        Mat diff(m - 1, m);
        for (int j = 1; j < m; ++j) diff.row(j - 1) = (pts.col(verts[j]) - pts.col(verts[0])).transpose();
        Eigen::FullPivLU<Mat> lu(diff);
        lu.setThreshold(1e-12);
        const Mat ker = lu.kernel();
        if (ker.cols() != 1) throw NumericalFailure("convex_hull: degenerate facet during construction");
        Facet f;
        f.normal = ker.col(0).normalized();
        f.offset = f.normal.dot(pts.col(verts[0]));
        if (f.normal.dot(interior) > f.offset) {
            f.normal = -f.normal;
            f.offset = -f.offset;
        }
        f.verts = std::move(verts);
        return f;
    };

    std::vector<Facet> facets;
    for (int skip = 0; skip <= m; ++skip) {
        std::vector<int> verts;
        for (int j = 0; j <= m; ++j)
            if (j != skip) verts.push_back(simplex[static_cast<std::size_t>(j)]);
        facets.push_back(make_facet(std::move(verts)));
    }

    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (int i : simplex) used[static_cast<std::size_t>(i)] = true;

    const int max_rounds = n + 1;
    for (int round = 0; round < max_rounds; ++round) {
        // Pick the point furthest beyond any facet.
        int best = -1;
        double best_excess = vis_tol;
        for (int i = 0; i < n; ++i) {
            if (used[static_cast<std::size_t>(i)]) continue;
            double excess = -std::numeric_limits<double>::infinity();
            for (const auto& f : facets) excess = std::max(excess, f.normal.dot(pts.col(i)) - f.offset);
            if (excess > best_excess) {
                best_excess = excess;
                best = i;
            }
        }
        if (best < 0) break;
        used[static_cast<std::size_t>(best)] = true;

        std::vector<Facet> keep;
        std::map<std::vector<int>, int> ridge_count;
        for (auto& f : facets) {
            if (f.normal.dot(pts.col(best)) - f.offset > vis_tol) {
                for (int drop = 0; drop < m; ++drop) {
                    std::vector<int> ridge;
                    for (int j = 0; j < m; ++j)
                        if (j != drop) ridge.push_back(f.verts[static_cast<std::size_t>(j)]);
                    ++ridge_count[ridge];
                }
            } else {
                keep.push_back(std::move(f));
            }
        }
        for (const auto& [ridge, count] : ridge_count) {
            if (count != 1) continue;
            std::vector<int> verts = ridge;
            verts.push_back(best);
            keep.push_back(make_facet(std::move(verts)));
        }
        facets = std::move(keep);
    }

    // Outward offsets are tightened to cover every input point.
    for (auto& f : facets) f.offset = std::max(f.offset, (f.normal.transpose() * pts).maxCoeff());
    return facets;
}

// Removes rows that duplicate another row's (normal, offset) up to tol.
void dedupe_rows(Mat& a, Vec& b, double tol = 1e-9) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        bool dup = false;
        for (Eigen::Index j : keep) {
            if ((a.row(i) - a.row(j)).cwiseAbs().maxCoeff() <= tol && std::abs(b(i) - b(j)) <= tol * std::max(1.0, std::abs(b(i)))) {
                b(j) = std::max(b(j), b(i));
                dup = true;
                break;
            }
        }
        if (!dup) keep.push_back(i);
    }
    Mat a2(static_cast<Eigen::Index>(keep.size()), a.cols());
    Vec b2(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        a2.row(static_cast<Eigen::Index>(k)) = a.row(keep[k]);
        b2(static_cast<Eigen::Index>(k)) = b(keep[k]);
    }
    a = std::move(a2);
    b = std::move(b2);
}

// Orthonormal basis (columns) of the complement of v.
Mat orthogonal_complement(const Vec& v) {
    Mat col(v.size(), 1);
    col.col(0) = v;
    const auto s = svd<double>(col);
    return s.U.rightCols(v.size() - 1);
}

}  // namespace

Polytope convex_hull(const std::vector<Vec>& points, const HullOptions& opt) {
    if (points.empty()) throw InvalidArgument("convex_hull: no points");
    const Eigen::Index d = points.front().size();
    for (const auto& p : points)
        if (p.size() != d || !p.allFinite()) throw InvalidArgument("convex_hull: inconsistent or non-finite point");

    // Drop exact duplicates; they only affect the special-case dispatch.
    std::vector<Vec> uniq;
    for (const auto& p : points) {
        bool seen = false;
        for (const auto& q : uniq)
            if ((p - q).cwiseAbs().maxCoeff() == 0.0) {
                seen = true;
                break;
            }
        if (!seen) uniq.push_back(p);
    }

    Polytope out;
    const Mat I = Mat::Identity(d, d);
    if (uniq.size() == 1) {
        const Vec& p = uniq[0];
        out.A.resize(2 * d, d);
        out.A << I, -I;
        out.b.resize(2 * d);
        out.b << p.array() + opt.eps, -p.array() + opt.eps;
        out.vertices = uniq;
        out.effective_dim = 0;
        return out;
    }
    if (uniq.size() == 2) {
        const Vec& p1 = uniq[0];
        const Vec& p2 = uniq[1];
        const Vec v = p2 - p1;
        const Mat W = orthogonal_complement(v).transpose();  // (d-1) x d
        out.A.resize(2 * (d - 1) + 2, d);
        out.A << W, -W, v.transpose(), -v.transpose();
        out.b.resize(out.A.rows());
        out.b << (W * p1).array() + opt.eps, (-W * p1).array() + opt.eps, v.dot(p2), -v.dot(p1);
        out.vertices = uniq;
        out.effective_dim = 1;
        return out;
    }

    const auto k = static_cast<Eigen::Index>(uniq.size());
    Mat D(k, d);
    for (Eigen::Index i = 0; i < k; ++i) D.row(i) = uniq[static_cast<std::size_t>(i)].transpose();
    const Vec c = D.colwise().mean().transpose();
    const Mat Dc = D.rowwise() - c.transpose();
    const auto s = svd<double>(Dc);
    const Eigen::Index m = s.rank(opt.rank_tol, 0.0);
    out.effective_dim = m;

    const Mat x_ef = s.V.leftCols(m).transpose();  // m x d
    const Mat x_orth = s.V.rightCols(d - m).transpose();
    const Mat proj = x_ef * Dc.transpose();  // m x k

    Mat a_proj;
    Vec b_proj;
    std::vector<bool> is_vertex(static_cast<std::size_t>(k), false);
    if (m == 0) {
        a_proj.resize(0, 0);
        b_proj.resize(0);
        is_vertex[0] = true;
    } else if (m == 1) {
        Eigen::Index lo = 0, hi = 0;
        proj.row(0).minCoeff(&lo);
        proj.row(0).maxCoeff(&hi);
        a_proj.resize(2, 1);
        a_proj << 1, -1;
        b_proj.resize(2);
        b_proj << proj(0, hi), -proj(0, lo);
        is_vertex[static_cast<std::size_t>(lo)] = is_vertex[static_cast<std::size_t>(hi)] = true;
    } else {
        const auto facets = full_dim_hull(proj);
        a_proj.resize(static_cast<Eigen::Index>(facets.size()), m);
        b_proj.resize(static_cast<Eigen::Index>(facets.size()));
        for (std::size_t f = 0; f < facets.size(); ++f) {
            a_proj.row(static_cast<Eigen::Index>(f)) = facets[f].normal.transpose();
            b_proj(static_cast<Eigen::Index>(f)) = facets[f].offset;
            for (int v : facets[f].verts) is_vertex[static_cast<std::size_t>(v)] = true;
        }
    }

    const Eigen::Index rows_ef = a_proj.rows();
    const Eigen::Index rows_orth = d - m;
    out.A.resize(rows_ef + 2 * rows_orth, d);
    out.b.resize(rows_ef + 2 * rows_orth);
    if (rows_ef > 0) {
        out.A.topRows(rows_ef) = a_proj * x_ef;
        out.b.head(rows_ef) = b_proj + a_proj * (x_ef * c);
    }
    if (rows_orth > 0) {
        const Vec oc = x_orth * c;
        out.A.middleRows(rows_ef, rows_orth) = x_orth;
        out.A.bottomRows(rows_orth) = -x_orth;
        out.b.segment(rows_ef, rows_orth) = oc.array() + opt.eps;
        out.b.tail(rows_orth) = -oc.array() + opt.eps;
    }
    dedupe_rows(out.A, out.b);

    std::vector<Vec> verts;
    for (Eigen::Index i = 0; i < k; ++i)
        if (is_vertex[static_cast<std::size_t>(i)]) verts.push_back(uniq[static_cast<std::size_t>(i)]);
    out.vertices = std::move(verts);
    return out;
}

bool contains(const Polytope& p, const Vec& x, double tol) {
    if (p.empty) return false;
    if (x.size() != p.dim()) throw InvalidArgument("contains: dimension mismatch");
    if (p.A.rows() == 0) return true;
    return (p.A * x - p.b).maxCoeff() <= tol;
}

FurthestPoint furthest_point(const std::vector<Vec>& candidates, const std::vector<Vec>& hull_vertices) {
    if (candidates.empty() || hull_vertices.empty()) throw InvalidArgument("furthest_point: empty input");
    Mat gens(hull_vertices.front().size(), static_cast<Eigen::Index>(hull_vertices.size()));
    for (std::size_t j = 0; j < hull_vertices.size(); ++j) gens.col(static_cast<Eigen::Index>(j)) = hull_vertices[j];
    FurthestPoint best;
    best.distance = -1.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double dist = min_norm_point<double>(candidates[i], gens).distance;
        if (dist > best.distance) {
            best.index = i;
            best.distance = dist;
        }
    }
    best.point = candidates[best.index];
    return best;
}

namespace {

LinearProgram<double> feasibility_lp(const Mat& a, const Vec& b) {
    LinearProgram<double> lp(a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j) lp.set_free(j);
    lp.ineq_lhs = a;
    lp.ineq_rhs = b;
    return lp;
}

}  // namespace

bool is_feasible(const Polytope& p) {
    if (p.empty) return false;
    if (p.A.rows() == 0) return true;
    return solve_lp(feasibility_lp(p.A, p.b)).status != LpStatus::Infeasible;
}

Polytope prune_redundant(const Polytope& p, double tol) {
    if (p.empty || p.A.rows() == 0) return p;
    Mat a = p.A;
    Vec b = p.b;
    dedupe_rows(a, b);
    std::vector<bool> alive(static_cast<std::size_t>(a.rows()), true);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        std::vector<Eigen::Index> rows;
        for (Eigen::Index j = 0; j < a.rows(); ++j)
            if (j != i && alive[static_cast<std::size_t>(j)]) rows.push_back(j);
        Mat sub(static_cast<Eigen::Index>(rows.size()) + 1, a.cols());
        Vec rhs(sub.rows());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            sub.row(static_cast<Eigen::Index>(r)) = a.row(rows[r]);
            rhs(static_cast<Eigen::Index>(r)) = b(rows[r]);
        }
        // Cap the tested row one unit above its bound so the LP stays bounded.
        sub.row(sub.rows() - 1) = a.row(i);
        rhs(rhs.size() - 1) = b(i) + 1.0;
        auto lp = feasibility_lp(sub, rhs);
        lp.objective = a.row(i).transpose();
        const auto sol = solve_lp(lp);
        if (sol.optimal() && sol.objective_value <= b(i) + tol * std::max(1.0, std::abs(b(i))))
            alive[static_cast<std::size_t>(i)] = false;
    }
    Polytope out = p;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        if (alive[static_cast<std::size_t>(i)]) keep.push_back(i);
    out.A.resize(static_cast<Eigen::Index>(keep.size()), a.cols());
    out.b.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t r = 0; r < keep.size(); ++r) {
        out.A.row(static_cast<Eigen::Index>(r)) = a.row(keep[r]);
        out.b(static_cast<Eigen::Index>(r)) = b(keep[r]);
    }
    return out;
}

Polytope intersect(const Polytope& p1, const Polytope& p2) {
    if (p1.dim() != p2.dim()) throw InvalidArgument("intersect: dimension mismatch");
    Polytope out;
    out.A.resize(p1.A.rows() + p2.A.rows(), p1.dim());
    out.A << p1.A, p2.A;
    out.b.resize(p1.b.size() + p2.b.size());
    out.b << p1.b, p2.b;
    out.effective_dim = std::min(p1.effective_dim, p2.effective_dim);
    if (p1.empty || p2.empty || !is_feasible(out)) {
        out.empty = true;
        return out;
    }
    return prune_redundant(out);
}

Polytope guaranteed_hull(const std::vector<Box>& boxes, std::size_t budget, const HullOptions& opt) {
    if (boxes.empty()) throw InvalidArgument("guaranteed_hull: no boxes");
    const Eigen::Index d = boxes.front().dim();
    for (const auto& bx : boxes)
        if (bx.dim() != d) throw InvalidArgument("guaranteed_hull: boxes differ in dimension");
    if (d >= 63 || boxes.size() > budget / (std::size_t(1) << d))
        throw BudgetExceeded("guaranteed_hull: k * 2^d exceeds the enumeration budget");

    // Sign pattern `bits` takes box i's upper bound where the bit is set. For
    // a direction w the pessimistic corner of box i is its w-minimizer, so
    // every supporting inequality of the guaranteed hull is produced by the
    // hull of one pattern's corners.
    const std::size_t patterns = std::size_t(1) << d;
    Polytope acc;
    bool first = true;
    for (std::size_t bits = 0; bits < patterns; ++bits) {
        std::vector<Vec> corners;
        corners.reserve(boxes.size());
        for (const auto& bx : boxes) corners.push_back(bx.corner(bits));
        Polytope h = convex_hull(corners, opt);
        h.vertices.reset();
        if (first) {
            acc = std::move(h);
            first = false;
        } else {
            acc = intersect(acc, h);
        }
        if (acc.empty) return acc;
    }
    return acc;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double read_double(std::istream& is) {
    std::string tok;
    if (!(is >> tok)) throw InvalidArgument("read_polytope: unexpected end of input");
    return std::stod(tok);
}

}  // namespace

void write_polytope(std::ostream& os, const Polytope& p) {
    os << "polytope " << p.dim() << " " << p.A.rows() << " " << p.effective_dim << " " << (p.empty ? 1 : 0) << "\n";
    for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.A.cols(); ++j) os << fmt(p.A(i, j)) << " ";
        os << "| " << fmt(p.b(i)) << "\n";
    }
    if (p.vertices) {
        os << "vertices " << p.vertices->size() << "\n";
        for (const auto& v : *p.vertices) {
            for (Eigen::Index j = 0; j < v.size(); ++j) os << (j ? " " : "") << fmt(v(j));
            os << "\n";
        }
    }
}

Polytope read_polytope(std::istream& is) {
    std::string tok;
    if (!(is >> tok) || tok != "polytope") throw InvalidArgument("read_polytope: missing header");
    Eigen::Index d = 0, m = 0;
    int empty = 0;
    Polytope p;
    is >> d >> m >> p.effective_dim >> empty;
    if (!is || d < 0 || m < 0) throw InvalidArgument("read_polytope: bad header");
    p.empty = empty != 0;
    p.A.resize(m, d);
    p.b.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) p.A(i, j) = read_double(is);
        if (!(is >> tok) || tok != "|") throw InvalidArgument("read_polytope: expected '|'");
        p.b(i) = read_double(is);
    }
    if (is >> tok) {
        if (tok != "vertices") throw InvalidArgument("read_polytope: unexpected token '" + tok + "'");
        std::size_t n = 0;
        is >> n;
        std::vector<Vec> verts(n, Vec(d));
        for (auto& v : verts)
            for (Eigen::Index j = 0; j < d; ++j) v(j) = read_double(is);
        p.vertices = std::move(verts);
    }
    return p;
}

}  // namespace cocorl
