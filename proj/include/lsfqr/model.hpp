#pragma once

#include "lsfqr/penalties.hpp"
#include "lsfqr/solver.hpp"

#include <iostream>
#include <optional>
#include <utility>
#include <vector>

namespace lsfqr {

/// Basis / penalty / design state shared by every fit on one dataset. Built
/// once, then reused across tuning candidates and folds (the raw integrals
/// A_i(u_r) do not depend on the null-space basis).
struct ModelContext {
    FunctionalDataset data;
    QuantileGrid levels;
    BernsteinBasis basis;
    ConstraintSystem cs;
    PenaltyPack penalties;
    BSplineBasis alpha_basis;
    std::vector<Matrix> A;  // per quantile level, n x n_B
    Matrix b_rows;          // n_u x n_b
    GroupStructure groups;
};

struct ModelSettings {
    int n_t = 10;
    int n_u_cells = 4;
    int degree = 3;
    int smoothness = 1;
    int n_b = 8;
    int order = 4;
    int quad_subdiv = 4;
};

inline ModelContext build_model_context(FunctionalDataset data, QuantileGrid levels,
                                        const ModelSettings& ms) {
    LSFQR_REQUIRE(ConfigError, ms.degree >= ms.smoothness + 1,
                  "spline degree must be at least smoothness + 1");
    const Interval t_range{data.t_grid[0], data.t_grid[data.t_grid.size() - 1]};
    Interval u_range = levels.range;
    LSFQR_REQUIRE(ConfigError, u_range.hi > u_range.lo,
                  "quantile range must have positive length to carry the mesh");
    Triangulation tri = build_rect_triangulation(t_range, u_range, ms.n_t, ms.n_u_cells);
    BernsteinBasis basis(std::move(tri), ms.degree, ms.smoothness);
    ConstraintSystem cs = make_constraint_system(basis);
    PenaltyPack penalties = make_penalties(basis, cs.Q);
    BSplineBasis alpha_basis(u_range, ms.n_b, ms.order);

    std::vector<Matrix> A;
    A.reserve(static_cast<std::size_t>(levels.size()));
    for (Index r = 0; r < levels.size(); ++r)
        A.push_back(assemble_A(data, basis, levels.levels[r], ms.quad_subdiv));
    Matrix b_rows_m = bspline_rows(alpha_basis, levels);

    GroupStructure groups{basis.per_triangle(), basis.mesh().triangle_count()};
    return ModelContext{std::move(data), std::move(levels),           std::move(basis),
                        std::move(cs),   std::move(penalties),        std::move(alpha_basis),
                        std::move(A),    std::move(b_rows_m),         groups};
}

/// Problem under the unconstrained-smoothness parameterization gamma = Q theta.
inline Problem make_full_problem(const ModelContext& ctx) {
    DesignBundle bundle =
        assemble_design_from_A(ctx.data, ctx.levels, ctx.A, ctx.b_rows, ctx.cs.Q);
    return make_problem(std::move(bundle), ctx.cs.Q, ctx.penalties.G_reduced, ctx.groups);
}

/// Rows of `pb` restricted to a subject subset (all quantile levels kept;
/// rows are r-major).
inline Problem slice_problem(const Problem& pb, const std::vector<Index>& subjects) {
    Problem out;
    const Index ns = static_cast<Index>(subjects.size());
    out.W.resize(ns * pb.n_u, pb.dim());
    out.y.resize(ns * pb.n_u);
    out.u_row.resize(ns * pb.n_u);
    for (Index r = 0; r < pb.n_u; ++r) {
        for (Index s = 0; s < ns; ++s) {
            const Index src = r * pb.n + subjects[static_cast<std::size_t>(s)];
            const Index dst = r * ns + s;
            out.W.row(dst) = pb.W.row(src);
            out.y[dst] = pb.y[src];
            out.u_row[dst] = pb.u_row[src];
        }
    }
    out.n = ns;
    out.n_u = pb.n_u;
    out.alpha_dim = pb.alpha_dim;
    out.Q = pb.Q;
    out.G_reduced = pb.G_reduced;
    out.groups = pb.groups;
    return out;
}

/// Mean check loss of coefficients `x` over the rows of a subject subset.
inline double validation_loss(const Problem& pb, const std::vector<Index>& subjects,
                              const Vector& x) {
    double loss = 0.0;
    Index count = 0;
    for (Index r = 0; r < pb.n_u; ++r) {
        for (Index s : subjects) {
            const Index row = r * pb.n + s;
            loss += check_loss(pb.y[row] - pb.W.row(row).dot(x), pb.u_row[row]);
            ++count;
        }
    }
    return loss / static_cast<double>(count);
}

inline Vector stack_coefficients(const FitResult& fit) {
    Vector x(fit.eta_hat.size() + fit.theta_hat.size());
    x << fit.eta_hat, fit.theta_hat;
    return x;
}

/// Null-space basis with the inactive triangles' coefficients pinned to
/// zero: rows of H augmented with unit selectors for every coefficient of
/// every triangle outside the active set.
inline Matrix active_set_null_space(const ModelContext& ctx, const std::vector<int>& active) {
    std::vector<char> is_active(static_cast<std::size_t>(ctx.groups.n_blocks), 0);
    for (int j : active) is_active[static_cast<std::size_t>(j)] = 1;
    const Matrix H(ctx.cs.H);
    std::vector<Index> pinned;
    for (Index j = 0; j < ctx.groups.n_blocks; ++j)
        if (!is_active[static_cast<std::size_t>(j)])
            for (Index l = 0; l < ctx.groups.block_size; ++l)
                pinned.push_back(j * ctx.groups.block_size + l);
    Matrix HD(H.rows() + static_cast<Index>(pinned.size()), ctx.basis.size());
    HD.topRows(H.rows()) = H;
    HD.bottomRows(static_cast<Index>(pinned.size())).setZero();
    for (std::size_t r = 0; r < pinned.size(); ++r)
        HD(H.rows() + static_cast<Index>(r), pinned[r]) = 1.0;
    return null_space(HD);
}

/// Everything needed to fit repeatedly under one active set.
struct RestrictedModel {
    Matrix Q;  // null space of [H; selector rows]
    Matrix G_reduced;
    Problem problem;
    std::vector<int> zero_set;
};

inline RestrictedModel make_restricted_model(const ModelContext& ctx,
                                             const std::vector<int>& active) {
    RestrictedModel rm;
    rm.Q = active_set_null_space(ctx, active);
    rm.G_reduced = reduce(ctx.penalties.G, rm.Q);
    DesignBundle bundle =
        assemble_design_from_A(ctx.data, ctx.levels, ctx.A, ctx.b_rows, rm.Q);
    rm.problem = make_problem(std::move(bundle), rm.Q, rm.G_reduced, ctx.groups);
    std::vector<char> is_active(static_cast<std::size_t>(ctx.groups.n_blocks), 0);
    for (int j : active) is_active[static_cast<std::size_t>(j)] = 1;
    for (Index j = 0; j < ctx.groups.n_blocks; ++j)
        if (!is_active[static_cast<std::size_t>(j)]) rm.zero_set.push_back(static_cast<int>(j));
    return rm;
}

/// Refit of the initial-form objective with the inactive triangles pinned to
/// zero (no group penalty). An empty active set degrades to the alpha-only
/// quantile fit.
inline FitResult refit_active(const ModelContext& ctx, double lambda1,
                              const std::vector<int>& active, const SolveOptions& opts = {}) {
    if (active.empty())
        std::cerr << "lsfqr: warning: empty active set, refitting the alpha-only model\n";
    RestrictedModel rm = make_restricted_model(ctx, active);
    FitResult fit = fit_initial(rm.problem, lambda1, opts);
    fit.zero_set = rm.zero_set;
    return fit;
}

}  // namespace lsfqr
