#pragma once

#include "lsfqr/bernstein.hpp"
#include "lsfqr/bspline.hpp"
#include "lsfqr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace lsfqr {

/// Per-quantile regression rows w_{i,r} = [z_i' V(u_r), A_i(u_r)' Q],
/// stacked r-major (row index = r*n + i), plus the replicated responses and
/// quantile levels the solver consumes.
struct DesignBundle {
    Matrix W;      // (n*n_u) x (alpha_dim + q)
    Vector y;      // replicated responses
    Vector u_row;  // quantile level per row
    Index n = 0;
    Index n_u = 0;
    Index alpha_dim = 0;  // (p+1) * n_b
    Index q = 0;          // reduced spline dimension
};

namespace detail {

/// Breakpoints for integrating along the line at height u: the t-grid, cell
/// boundaries, and diagonal crossings. Between consecutive breakpoints the
/// line stays inside one triangle and every curve piece is linear.
inline std::vector<double> integration_breakpoints(const Vector& t_grid,
                                                   const Triangulation& mesh, double u) {
    const Interval tr = mesh.t_range();
    std::vector<double> brk(t_grid.data(), t_grid.data() + t_grid.size());
    const double dt_cell = tr.length() / mesh.n_t();
    for (int i = 1; i < mesh.n_t(); ++i) brk.push_back(tr.lo + i * dt_cell);
    const double du_cell = mesh.u_range().length() / mesh.n_u_cells();
    const double fu = (u - mesh.u_range().lo) / du_cell;
    for (int dj : {-1, 0}) {
        const int j = std::clamp(static_cast<int>(std::floor(fu)) + dj, 0, mesh.n_u_cells() - 1);
        const double ub = mesh.u_range().lo + j * du_cell;
        const double frac = (u - ub) / du_cell;
        if (frac < 0.0 || frac > 1.0) continue;
        for (int i = 0; i < mesh.n_t(); ++i)
            brk.push_back(tr.lo + (i + frac) * dt_cell);
    }
    std::sort(brk.begin(), brk.end());
    const double tol = 1e-12 * std::max(1.0, tr.length());
    brk.erase(std::unique(brk.begin(), brk.end(),
                          [tol](double a, double b) { return std::abs(a - b) <= tol; }),
              brk.end());
    return brk;
}

}  // namespace detail

/// A(i,j) ~ integral of B_j(t,u) x_i(t) dt, by the composite trapezoid rule
/// on the t-grid refined so that every triangle-edge crossing is a
/// breakpoint, with `n_subdiv` subdivisions per piece and x_i interpolated
/// linearly. Each piece is evaluated one-sidedly inside its own triangle
/// (basis columns jump at edge crossings). Only columns whose triangle meets
/// the line at height u are nonzero.
inline Matrix assemble_A(const FunctionalDataset& data, const BernsteinBasis& basis, double u,
                         int n_subdiv = 4) {
    LSFQR_REQUIRE(InvalidArgument, n_subdiv >= 1, "need at least one subdivision");
    const auto& mesh = basis.mesh();
    LSFQR_REQUIRE(OutOfDomain, mesh.u_range().contains(u, 1e-9),
                  "quantile level outside the mesh domain");
    LSFQR_REQUIRE(DataError,
                  std::abs(data.t_grid[0] - mesh.t_range().lo) <= 1e-9 &&
                      std::abs(data.t_grid[data.t_grid.size() - 1] - mesh.t_range().hi) <= 1e-9,
                  "t-grid must cover the mesh t-range");

    const auto brk = detail::integration_breakpoints(data.t_grid, mesh, u);
    const int n_loc = basis.per_triangle();
    Matrix A = Matrix::Zero(data.n(), basis.size());

    Vector x_node(data.n());
    Index g = 0;  // t-grid interval cursor (breakpoints are sorted)
    for (std::size_t s = 0; s + 1 < brk.size(); ++s) {
        const double a = brk[s], b = brk[s + 1];
        const int tri = mesh.locate({0.5 * (a + b), u}).triangle_id;
        const Index base = static_cast<Index>(tri) * n_loc;
        const double h = (b - a) / n_subdiv;
        for (int k = 0; k <= n_subdiv; ++k) {
            const double t = a + k * h;
            const double wt = (k == 0 || k == n_subdiv) ? 0.5 * h : h;
            while (g + 2 < data.t_grid.size() && data.t_grid[g + 1] <= t) ++g;
            const double t0 = data.t_grid[g], t1 = data.t_grid[g + 1];
            const double frac = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
            x_node = (1.0 - frac) * data.X.col(g) + frac * data.X.col(g + 1);
            const auto vals = basis.local_values(tri, mesh.barycentric(tri, {t, u}));
            for (int l = 0; l < n_loc; ++l)
                A.col(base + l).noalias() += (wt * vals[static_cast<std::size_t>(l)]) * x_node;
        }
    }
    return A;
}

/// b(u_r) rows for all quantile levels (n_u x n_b).
inline Matrix bspline_rows(const BSplineBasis& alpha_basis, const QuantileGrid& levels) {
    Matrix rows(levels.size(), alpha_basis.size());
    for (Index r = 0; r < levels.size(); ++r)
        rows.row(r) = alpha_basis.row(levels.levels[r]).transpose();
    return rows;
}

/// Stacks the assembled rows for a given null-space basis Q. `A_per_level`
/// holds the raw n x n_B integrals per quantile and can be reused across
/// different Q (e.g. for active-set refits).
inline DesignBundle assemble_design_from_A(const FunctionalDataset& data,
                                           const QuantileGrid& levels,
                                           const std::vector<Matrix>& A_per_level,
                                           const Matrix& b_rows, const Matrix& Q) {
    const Index n = data.n();
    const Index n_u = levels.size();
    const Index n_b = b_rows.cols();
    const Index pz = data.Z.cols();
    const Index alpha_dim = pz * n_b;
    const Index q = Q.cols();

    DesignBundle bundle;
    bundle.n = n;
    bundle.n_u = n_u;
    bundle.alpha_dim = alpha_dim;
    bundle.q = q;
    bundle.W.resize(n * n_u, alpha_dim + q);
    bundle.y.resize(n * n_u);
    bundle.u_row.resize(n * n_u);

    for (Index r = 0; r < n_u; ++r) {
        const Matrix AQ = A_per_level[static_cast<std::size_t>(r)] * Q;  // n x q
        for (Index i = 0; i < n; ++i) {
            const Index row = r * n + i;
            // alpha block: kron(z_i, b(u_r))
            for (Index k = 0; k < pz; ++k)
                bundle.W.block(row, k * n_b, 1, n_b) = data.Z(i, k) * b_rows.row(r);
            bundle.W.block(row, alpha_dim, 1, q) = AQ.row(i);
            bundle.y[row] = data.y[i];
            bundle.u_row[row] = levels.levels[r];
        }
    }
    return bundle;
}

inline DesignBundle assemble_design(const FunctionalDataset& data, const QuantileGrid& levels,
                                    const BernsteinBasis& basis, const Matrix& Q,
                                    const BSplineBasis& alpha_basis, int n_subdiv = 4) {
    std::vector<Matrix> A;
    A.reserve(static_cast<std::size_t>(levels.size()));
    for (Index r = 0; r < levels.size(); ++r)
        A.push_back(assemble_A(data, basis, levels.levels[r], n_subdiv));
    return assemble_design_from_A(data, levels, A, bspline_rows(alpha_basis, levels), Q);
}

}  // namespace lsfqr
