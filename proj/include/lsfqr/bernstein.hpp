#pragma once

#include "lsfqr/common.hpp"
#include "lsfqr/mesh.hpp"

#include <Eigen/QR>
#include <array>
#include <cmath>
#include <vector>

namespace lsfqr {

/// Multi-index (i,j,k) with i+j+k = degree; exponents of the barycentric
/// coordinates of one triangle.
struct MultiIndex {
    int i = 0, j = 0, k = 0;
};

/// Position of (i,j,*) in the canonical enumeration of degree-m indices
/// (i descending, then j descending).
inline int local_index(int m, int i, int j) {
    const int w = m - i;
    return w * (w + 1) / 2 + (w - j);
}

inline int basis_per_triangle(int degree) { return (degree + 1) * (degree + 2) / 2; }

namespace detail {

inline std::vector<MultiIndex> enumerate_indices(int m) {
    std::vector<MultiIndex> out;
    out.reserve(basis_per_triangle(m));
    for (int i = m; i >= 0; --i)
        for (int j = m - i; j >= 0; --j) out.push_back({i, j, m - i - j});
    return out;
}

/// All degree-m Bernstein values at barycentric b, via the degree-raising
/// recurrence B^m_a = b1 B^{m-1}_{a-e1} + b2 B^{m-1}_{a-e2} + b3 B^{m-1}_{a-e3}.
inline std::vector<double> bernstein_values(int m, const std::array<double, 3>& b) {
    std::vector<double> vals{1.0};
    for (int deg = 1; deg <= m; ++deg) {
        std::vector<double> next(basis_per_triangle(deg), 0.0);
        for (int i = deg; i >= 0; --i) {
            for (int j = deg - i; j >= 0; --j) {
                const int k = deg - i - j;
                double v = 0.0;
                if (i > 0) v += b[0] * vals[local_index(deg - 1, i - 1, j)];
                if (j > 0) v += b[1] * vals[local_index(deg - 1, i, j - 1)];
                if (k > 0) v += b[2] * vals[local_index(deg - 1, i, j)];
                next[local_index(deg, i, j)] = v;
            }
        }
        vals = std::move(next);
    }
    return vals;
}

/// One directional-derivative lift: given values w of (already
/// differentiated) degree-(m-1) Bernsteins, returns the degree-m values of
/// grad_a B^m, using grad_a B^m_a = m * sum_l a_l B^{m-1}_{a-e_l}.
inline std::vector<double> derivative_lift(int m, const std::array<double, 3>& a,
                                           const std::vector<double>& lower) {
    std::vector<double> out(basis_per_triangle(m), 0.0);
    for (int i = m; i >= 0; --i) {
        for (int j = m - i; j >= 0; --j) {
            const int k = m - i - j;
            double v = 0.0;
            if (i > 0) v += a[0] * lower[local_index(m - 1, i - 1, j)];
            if (j > 0) v += a[1] * lower[local_index(m - 1, i, j - 1)];
            if (k > 0) v += a[2] * lower[local_index(m - 1, i, j)];
            out[local_index(m, i, j)] = m * v;
        }
    }
    return out;
}

inline double multinomial(int m, int i, int j, int k) {
    double v = 1.0;
    // m! / (i! j! k!) accumulated without large intermediates
    int num = m;
    for (int rep = 0; rep < 3; ++rep) {
        const int cnt = rep == 0 ? i : (rep == 1 ? j : k);
        for (int s = 1; s <= cnt; ++s) v *= static_cast<double>(num--) / s;
    }
    return v;
}

}  // namespace detail

/// Degree-d Bernstein polynomial basis over a triangulation, with C^r
/// smoothness handled through the linear constraint matrix H. Each triangle
/// carries its own (d+1)(d+2)/2 coefficients; global basis index
/// j = triangle * n_loc + local. Immutable and reentrant.
class BernsteinBasis {
public:
    BernsteinBasis(Triangulation tri, int degree, int smoothness)
        : tri_(std::move(tri)), d_(degree), r_(smoothness) {
        LSFQR_REQUIRE(InvalidArgument, d_ >= 0, "degree must be >= 0");
        LSFQR_REQUIRE(InvalidArgument, r_ >= 0, "smoothness order must be >= 0");
        n_loc_ = basis_per_triangle(d_);
        n_basis_ = static_cast<Index>(n_loc_) * tri_.triangle_count();
        indices_ = detail::enumerate_indices(d_);
        build_geometry();
    }

    const Triangulation& mesh() const { return tri_; }
    int degree() const { return d_; }
    int smoothness() const { return r_; }
    int per_triangle() const { return n_loc_; }
    Index size() const { return n_basis_; }

    /// Global basis index -> (triangle, multi-index).
    std::pair<int, MultiIndex> index_map(Index j) const {
        const int m = static_cast<int>(j / n_loc_);
        return {m, indices_[static_cast<std::size_t>(j % n_loc_)]};
    }

    /// Domain point of basis j: (i*V1 + j*V2 + k*V3)/d. Interpolating a
    /// polynomial of degree <= d at these points reproduces it exactly.
    Point domain_point(Index j) const {
        auto [m, mi] = index_map(j);
        const auto v = tri_.triangle_vertices(m);
        const double scale = d_ > 0 ? 1.0 / d_ : 1.0;
        return {(mi.i * v[0].t + mi.j * v[1].t + mi.k * v[2].t) * scale,
                (mi.i * v[0].u + mi.j * v[1].u + mi.k * v[2].u) * scale};
    }

    /// Values (or mixed partial derivatives) of all basis functions of one
    /// triangle at the given barycentric coordinates; length n_loc.
    std::vector<double> local_values(int triangle, const std::array<double, 3>& bary,
                                     int deriv_t = 0, int deriv_u = 0) const {
        LSFQR_REQUIRE(InvalidArgument, deriv_t >= 0 && deriv_u >= 0 && deriv_t + deriv_u <= d_,
                      "derivative order exceeds polynomial degree");
        const auto& g = geoms_[triangle];
        auto vals = detail::bernstein_values(d_ - deriv_t - deriv_u, bary);
        int m = d_ - deriv_t - deriv_u;
        for (int s = 0; s < deriv_u; ++s) vals = detail::derivative_lift(++m, g.db_du, vals);
        for (int s = 0; s < deriv_t; ++s) vals = detail::derivative_lift(++m, g.db_dt, vals);
        return vals;
    }

    /// Rows of basis values at the given points: sparse (points x n_B), at
    /// most n_loc nonzeros per row. Points on shared edges are attributed to
    /// the lowest incident triangle.
    RowSparseMatrix eval(const std::vector<Point>& points, int deriv_t = 0,
                         int deriv_u = 0) const {
        RowSparseMatrix out(static_cast<Index>(points.size()), n_basis_);
        out.reserve(Eigen::VectorXi::Constant(static_cast<Index>(points.size()), n_loc_));
        for (std::size_t p = 0; p < points.size(); ++p) {
            const BaryPoint bp = tri_.locate(points[p]);
            const auto vals = local_values(bp.triangle_id, bp.coords, deriv_t, deriv_u);
            const Index base = static_cast<Index>(bp.triangle_id) * n_loc_;
            for (int l = 0; l < n_loc_; ++l)
                out.insert(static_cast<Index>(p), base + l) = vals[static_cast<std::size_t>(l)];
        }
        out.makeCompressed();
        return out;
    }

    /// Dense per-triangle evaluation (points x n_loc) ignoring locate();
    /// lets callers evaluate a specific triangle's polynomial, e.g. from
    /// both sides of an edge.
    Matrix eval_on_triangle(int triangle, const std::vector<Point>& points, int deriv_t = 0,
                            int deriv_u = 0) const {
        Matrix out(static_cast<Index>(points.size()), n_loc_);
        for (std::size_t p = 0; p < points.size(); ++p) {
            const auto b = tri_.barycentric(triangle, points[p]);
            const auto vals = local_values(triangle, b, deriv_t, deriv_u);
            for (int l = 0; l < n_loc_; ++l) out(static_cast<Index>(p), l) = vals[l];
        }
        return out;
    }

    /// s(p) = sum_j coeffs_j B_j(p).
    Vector eval_spline(const Vector& coeffs, const std::vector<Point>& points, int deriv_t = 0,
                       int deriv_u = 0) const {
        LSFQR_REQUIRE(InvalidArgument, coeffs.size() == n_basis_,
                      "coefficient vector length must equal the basis size");
        return eval(points, deriv_t, deriv_u) * coeffs;
    }

    /// C^r continuity conditions across every interior edge, as rows of H;
    /// a spline with H*gamma = 0 is r-times continuously differentiable.
    ///
    /// For triangles T = <v1,v2,v3> and Tt = <v4,v3,v2> sharing edge
    /// <v2,v3>, with lambda the barycentric coordinates of v4 in T, the
    /// conditions are, for rho = 0..r and j+k = d-rho:
    ///   ct_{rho,j,k} = sum_{i+m+n=rho} B^rho_{imn}(lambda) c_{i,k+m,j+n}.
    SparseMatrix smoothness_constraints() const {
        LSFQR_REQUIRE(InvalidArgument, r_ < d_,
                      "unsupported configuration: smoothness order must satisfy r < d");
        std::vector<Triplet> trips;
        Index row = 0;
        for (const auto& edge : tri_.edges()) {
            if (!edge.interior()) continue;
            emit_edge_rows(edge, trips, row);
        }
        SparseMatrix H(row, n_basis_);
        H.setFromTriplets(trips.begin(), trips.end());
        return H;
    }

private:
    struct TriGeom {
        std::array<double, 3> db_dt{}, db_du{};
        double area = 0.0;
    };

    void build_geometry() {
        geoms_.resize(tri_.triangle_count());
        for (int m = 0; m < tri_.triangle_count(); ++m) {
            const auto v = tri_.triangle_vertices(m);
            const double det = (v[0].t - v[2].t) * (v[1].u - v[2].u) -
                               (v[1].t - v[2].t) * (v[0].u - v[2].u);
            TriGeom g;
            g.db_dt = {(v[1].u - v[2].u) / det, (v[2].u - v[0].u) / det,
                       (v[0].u - v[1].u) / det};
            g.db_du = {(v[2].t - v[1].t) / det, (v[0].t - v[2].t) / det,
                       (v[1].t - v[0].t) / det};
            g.area = 0.5 * det;
            geoms_[m] = g;
        }
    }

    // Maps a multi-index expressed in a relabeled vertex frame back to the
    // triangle's stored frame. slot_of[s] = stored vertex slot of relabeled
    // slot s.
    Index global_index(int triangle, const std::array<int, 3>& slot_of, int e0, int e1,
                       int e2) const {
        std::array<int, 3> stored{};
        stored[slot_of[0]] = e0;
        stored[slot_of[1]] = e1;
        stored[slot_of[2]] = e2;
        return static_cast<Index>(triangle) * n_loc_ + local_index(d_, stored[0], stored[1]);
    }

    void emit_edge_rows(const EdgeInfo& edge, std::vector<Triplet>& trips, Index& row) const {
        const int ta = edge.tri_a, tb = edge.tri_b;
        const auto& va = tri_.triangles()[ta];
        const auto& vb = tri_.triangles()[tb];
        const int v2 = edge.v0, v3 = edge.v1;  // shared vertices, v2 < v3

        auto slot = [](const std::array<int, 3>& t, int vid) {
            for (int s = 0; s < 3; ++s)
                if (t[s] == vid) return s;
            return -1;
        };
        const std::array<int, 3> slots_a{3 - slot(va, v2) - slot(va, v3), slot(va, v2),
                                         slot(va, v3)};
        const std::array<int, 3> slots_b{3 - slot(vb, v2) - slot(vb, v3), slot(vb, v3),
                                         slot(vb, v2)};

        // lambda = barycentric coords of Tb's opposite vertex in the
        // (v1,v2,v3) frame of Ta.
        const Point p1 = tri_.vertices()[va[slots_a[0]]];
        const Point p2 = tri_.vertices()[v2];
        const Point p3 = tri_.vertices()[v3];
        const Point p4 = tri_.vertices()[vb[slots_b[0]]];
        const double det = (p1.t - p3.t) * (p2.u - p3.u) - (p2.t - p3.t) * (p1.u - p3.u);
        const double l1 =
            ((p2.u - p3.u) * (p4.t - p3.t) + (p3.t - p2.t) * (p4.u - p3.u)) / det;
        const double l2 =
            ((p3.u - p1.u) * (p4.t - p3.t) + (p1.t - p3.t) * (p4.u - p3.u)) / det;
        const double l3 = 1.0 - l1 - l2;

        for (int rho = 0; rho <= r_; ++rho) {
            for (int j = d_ - rho; j >= 0; --j) {
                const int k = d_ - rho - j;
                trips.emplace_back(row, global_index(tb, slots_b, rho, j, k), 1.0);
                for (int i = rho; i >= 0; --i) {
                    for (int m = rho - i; m >= 0; --m) {
                        const int n = rho - i - m;
                        const double w = detail::multinomial(rho, i, m, n) * std::pow(l1, i) *
                                         std::pow(l2, m) * std::pow(l3, n);
                        trips.emplace_back(row, global_index(ta, slots_a, i, k + m, j + n), -w);
                    }
                }
                ++row;
            }
        }
    }

    Triangulation tri_;
    int d_, r_;
    int n_loc_ = 0;
    Index n_basis_ = 0;
    std::vector<MultiIndex> indices_;
    std::vector<TriGeom> geoms_;
};

/// Orthonormal basis of null(H) via QR of H^T with column pivoting:
/// H^T P = (Q*, Q) (R; 0); the trailing columns span null(H). Rank is
/// decided by |R_ii| > tol * |R_00|.
inline Matrix null_space(const Matrix& H, double rank_tol = 1e-10) {
    const Index n = H.cols();
    if (H.rows() == 0) return Matrix::Identity(n, n);
    Eigen::ColPivHouseholderQR<Matrix> qr;
    qr.setThreshold(rank_tol);
    qr.compute(H.transpose());
    const Index rank = qr.rank();
    Matrix q_full = qr.householderQ() * Matrix::Identity(n, n);
    return q_full.rightCols(n - rank);
}

/// Smoothness constraints with their null-space reparameterization
/// gamma = Q theta.
struct ConstraintSystem {
    SparseMatrix H;
    Matrix Q;       // n_B x q, orthonormal columns, H*Q = 0
    Index rank = 0; // rank(H); rank + q = n_B
    Index reduced_dim() const { return Q.cols(); }
};

inline ConstraintSystem make_constraint_system(const BernsteinBasis& basis,
                                               double rank_tol = 1e-10) {
    ConstraintSystem cs;
    cs.H = basis.smoothness_constraints();
    cs.Q = null_space(Matrix(cs.H), rank_tol);
    cs.rank = basis.size() - cs.Q.cols();
    return cs;
}

}  // namespace lsfqr
