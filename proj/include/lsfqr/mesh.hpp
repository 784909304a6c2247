#pragma once

#include "lsfqr/common.hpp"
#include "lsfqr/csv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

namespace lsfqr {

struct Point {
    double t = 0.0;
    double u = 0.0;
};

/// Point located inside a triangle: triangle index plus barycentric weights.
struct BaryPoint {
    int triangle_id = -1;
    std::array<double, 3> coords{};  // b1+b2+b3 = 1, each clamped to [0,1]
};

struct EdgeInfo {
    int v0 = -1, v1 = -1;      // vertex indices, v0 < v1
    int tri_a = -1, tri_b = -1;  // incident triangles, tri_a < tri_b; tri_b = -1 on the boundary
    bool interior() const { return tri_b >= 0; }
};

/// Triangulation of the rectangle [0,T] x U: a uniform grid of n_t x n_u
/// cells, each split along its main diagonal (lower-left to upper-right).
/// Immutable after construction.
class Triangulation {
public:
    Triangulation(Interval t_range, Interval u_range, int n_t, int n_u_cells)
        : t_range_(t_range), u_range_(u_range), n_t_(n_t), n_u_cells_(n_u_cells) {
        LSFQR_REQUIRE(InvalidArgument, n_t >= 1 && n_u_cells >= 1,
                      "cell counts must be at least 1");
        LSFQR_REQUIRE(InvalidArgument, t_range.length() > 0.0 && u_range.length() > 0.0,
                      "domain intervals must be nonempty and increasing");
        build_vertices();
        build_triangles();
        build_edges();
    }

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::vector<EdgeInfo>& edges() const { return edges_; }
    int triangle_count() const { return static_cast<int>(triangles_.size()); }
    Interval t_range() const { return t_range_; }
    Interval u_range() const { return u_range_; }
    int n_t() const { return n_t_; }
    int n_u_cells() const { return n_u_cells_; }

    std::array<Point, 3> triangle_vertices(int m) const {
        const auto& tri = triangles_[m];
        return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
    }

    double triangle_area(int m) const {
        const auto v = triangle_vertices(m);
        return 0.5 * ((v[1].t - v[0].t) * (v[2].u - v[0].u) -
                      (v[2].t - v[0].t) * (v[1].u - v[0].u));
    }

    /// Longest edge over the whole triangulation.
    double mesh_size() const {
        double best = 0.0;
        for (const auto& e : edges_) {
            const double dt = vertices_[e.v1].t - vertices_[e.v0].t;
            const double du = vertices_[e.v1].u - vertices_[e.v0].u;
            best = std::max(best, std::hypot(dt, du));
        }
        return best;
    }

    /// Barycentric coordinates of p with respect to triangle m (no clamping).
    std::array<double, 3> barycentric(int m, Point p) const {
        const auto v = triangle_vertices(m);
        const double det = (v[0].t - v[2].t) * (v[1].u - v[2].u) -
                           (v[1].t - v[2].t) * (v[0].u - v[2].u);
        const double b1 =
            ((v[1].u - v[2].u) * (p.t - v[2].t) + (v[2].t - v[1].t) * (p.u - v[2].u)) / det;
        const double b2 =
            ((v[2].u - v[0].u) * (p.t - v[2].t) + (v[0].t - v[2].t) * (p.u - v[2].u)) / det;
        return {b1, b2, 1.0 - b1 - b2};
    }

    /// Locates p in the mesh. Points on shared edges resolve to the lowest
    /// incident triangle index; points farther than `boundary_tol` outside
    /// the rectangle are rejected.
    BaryPoint locate(Point p, double boundary_tol = 1e-9) const {
        if (p.t < t_range_.lo - boundary_tol || p.t > t_range_.hi + boundary_tol ||
            p.u < u_range_.lo - boundary_tol || p.u > u_range_.hi + boundary_tol)
            LSFQR_THROW(OutOfDomain, "point (" + std::to_string(p.t) + ", " + std::to_string(p.u) +
                                         ") outside the mesh domain");
        const double pt = std::clamp(p.t, t_range_.lo, t_range_.hi);
        const double pu = std::clamp(p.u, u_range_.lo, u_range_.hi);

        // Candidate cells around (pt, pu); a point exactly on a grid line
        // belongs to more than one cell, so scan candidates in index order.
        const double ft = (pt - t_range_.lo) / dt_;
        const double fu = (pu - u_range_.lo) / du_;
        std::vector<int> candidates;
        for (int dj : {-1, 0}) {
            for (int di : {-1, 0}) {
                const int ci = std::clamp(static_cast<int>(std::floor(ft)) + di, 0, n_t_ - 1);
                const int cj = std::clamp(static_cast<int>(std::floor(fu)) + dj, 0, n_u_cells_ - 1);
                for (int k = 0; k < 2; ++k) {
                    const int tri = 2 * (cj * n_t_ + ci) + k;
                    if (std::find(candidates.begin(), candidates.end(), tri) == candidates.end())
                        candidates.push_back(tri);
                }
            }
        }
        std::sort(candidates.begin(), candidates.end());

        constexpr double kBaryTol = 1e-12;
        const Point q{pt, pu};
        int best_tri = -1;
        double best_min = -1.0;
        for (int tri : candidates) {
            auto b = barycentric(tri, q);
            const double mn = std::min({b[0], b[1], b[2]});
            if (mn >= -kBaryTol) return make_bary(tri, b);
            if (mn > best_min) {
                best_min = mn;
                best_tri = tri;
            }
        }
        // Roundoff can push an on-edge point marginally outside every
        // candidate; accept within the boundary tolerance scaled to cells.
        const double rel_tol = boundary_tol / std::min(dt_, du_);
        if (best_tri >= 0 && best_min >= -rel_tol)
            return make_bary(best_tri, barycentric(best_tri, q));
        LSFQR_THROW(OutOfDomain, "point could not be located in any triangle");
    }

    /// Two CSV tables for plotting/debugging: vertices (id,t,u) and
    /// triangles (id,v0,v1,v2).
    void export_csv(const std::string& vertex_path, const std::string& triangle_path) const {
        csv::Writer vw(vertex_path);
        vw.header({"id", "t", "u"});
        for (std::size_t i = 0; i < vertices_.size(); ++i)
            vw.raw_row(std::to_string(i) + "," + csv::format(vertices_[i].t) + "," +
                       csv::format(vertices_[i].u));
        csv::Writer tw(triangle_path);
        tw.header({"id", "v0", "v1", "v2"});
        for (std::size_t m = 0; m < triangles_.size(); ++m)
            tw.raw_row(std::to_string(m) + "," + std::to_string(triangles_[m][0]) + "," +
                       std::to_string(triangles_[m][1]) + "," + std::to_string(triangles_[m][2]));
    }

private:
    static BaryPoint make_bary(int tri, std::array<double, 3> b) {
        for (double& x : b) x = std::clamp(x, 0.0, 1.0);
        return BaryPoint{tri, b};
    }

    void build_vertices() {
        dt_ = t_range_.length() / n_t_;
        du_ = u_range_.length() / n_u_cells_;
        vertices_.reserve(static_cast<std::size_t>(n_t_ + 1) * (n_u_cells_ + 1));
        for (int j = 0; j <= n_u_cells_; ++j) {
            const double u = (j == n_u_cells_) ? u_range_.hi : u_range_.lo + j * du_;
            for (int i = 0; i <= n_t_; ++i) {
                const double t = (i == n_t_) ? t_range_.hi : t_range_.lo + i * dt_;
                vertices_.push_back({t, u});
            }
        }
    }

    // Cell (i,j) has corners ll, lr, ur, ul; the diagonal ll-ur splits it
    // into triangle 2*(j*n_t+i) = (ll,lr,ur) and +1 = (ll,ur,ul), both CCW.
    void build_triangles() {
        triangles_.reserve(static_cast<std::size_t>(2) * n_t_ * n_u_cells_);
        const int stride = n_t_ + 1;
        for (int j = 0; j < n_u_cells_; ++j) {
            for (int i = 0; i < n_t_; ++i) {
                const int ll = j * stride + i;
                const int lr = ll + 1;
                const int ul = ll + stride;
                const int ur = ul + 1;
                triangles_.push_back({ll, lr, ur});
                triangles_.push_back({ll, ur, ul});
            }
        }
    }

    void build_edges() {
        std::map<std::pair<int, int>, EdgeInfo> seen;
        for (int m = 0; m < triangle_count(); ++m) {
            const auto& tri = triangles_[m];
            for (int e = 0; e < 3; ++e) {
                int a = tri[e], b = tri[(e + 1) % 3];
                if (a > b) std::swap(a, b);
                auto [it, inserted] = seen.try_emplace({a, b}, EdgeInfo{a, b, m, -1});
                if (!inserted) {
                    LSFQR_REQUIRE(InvalidArgument, it->second.tri_b == -1,
                                  "edge shared by more than two triangles");
                    it->second.tri_b = m;
                }
            }
        }
        edges_.reserve(seen.size());
        for (auto& [key, info] : seen) edges_.push_back(info);
    }

    Interval t_range_, u_range_;
    int n_t_, n_u_cells_;
    double dt_ = 0.0, du_ = 0.0;
    std::vector<Point> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<EdgeInfo> edges_;
};

inline Triangulation build_rect_triangulation(Interval t_range, Interval u_range, int n_t,
                                              int n_u_cells) {
    return Triangulation(t_range, u_range, n_t, n_u_cells);
}

}  // namespace lsfqr
