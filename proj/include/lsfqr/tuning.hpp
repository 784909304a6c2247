#pragma once

#include "lsfqr/model.hpp"
#include "lsfqr/rng.hpp"
#include "lsfqr/threading.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace lsfqr {

/// Cross-validation protocol settings. The sparse stage identifies each
/// candidate's active set on the full data, then scores folds by refitting
/// within that active set without the group penalty.
struct TuningPlan {
    std::vector<double> lambda_grid;
    std::vector<double> lambda1_grid;
    std::vector<double> lambda2_grid;
    int folds = 10;
    std::uint64_t seed = 0;
    PenaltyOption option = PenaltyOption::Option1;
    double a_w = 1.0;
    int workers = 1;
    SolveOptions solve;
};

struct CandidateTrace {
    double lambda = 0.0;   // initial stage
    double lambda1 = 0.0;  // sparse stage
    double lambda2 = 0.0;
    std::vector<double> fold_losses;
    double mean_loss = std::numeric_limits<double>::quiet_NaN();
    int active_size = -1;
    bool valid = true;
    bool selected = false;
};

struct TuningTrace {
    std::vector<CandidateTrace> initial_stage;
    std::vector<CandidateTrace> sparse_stage;
    double lambda_star = 0.0;
    double lambda1_star = 0.0;
    double lambda2_star = 0.0;
};

/// Deterministic fold assignment from a seeded permutation; fold sizes
/// differ by at most one.
inline std::vector<int> kfold_split(Index n, int k, std::uint64_t seed) {
    LSFQR_REQUIRE(InvalidArgument, k >= 2 && k <= n, "need 2 <= k <= n folds");
    Rng rng(seed);
    const auto perm = rng.permutation(static_cast<int>(n));
    std::vector<int> fold(static_cast<std::size_t>(n));
    for (Index pos = 0; pos < n; ++pos)
        fold[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos)])] =
            static_cast<int>(pos % k);
    return fold;
}

namespace detail {

struct FoldSets {
    std::vector<std::vector<Index>> train, held;
};

inline FoldSets make_fold_sets(Index n, int k, std::uint64_t seed) {
    const auto fold = kfold_split(n, k, seed);
    FoldSets fs;
    fs.train.resize(static_cast<std::size_t>(k));
    fs.held.resize(static_cast<std::size_t>(k));
    for (Index i = 0; i < n; ++i) {
        for (int f = 0; f < k; ++f) {
            if (fold[static_cast<std::size_t>(i)] == f)
                fs.held[static_cast<std::size_t>(f)].push_back(i);
            else
                fs.train[static_cast<std::size_t>(f)].push_back(i);
        }
    }
    return fs;
}

// ties break toward the later candidate in grid order (larger penalty)
inline Index select_candidate(const std::vector<CandidateTrace>& cands) {
    Index best = -1;
    double best_loss = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cands.size(); ++c) {
        if (!cands[c].valid) continue;
        if (cands[c].mean_loss <= best_loss) {
            best_loss = cands[c].mean_loss;
            best = static_cast<Index>(c);
        }
    }
    LSFQR_REQUIRE(SolverError, best >= 0, "every tuning candidate failed to converge");
    return best;
}

inline void finalize_mean(CandidateTrace& c) {
    if (!c.valid) return;
    double sum = 0.0;
    for (double l : c.fold_losses) sum += l;
    c.mean_loss = sum / static_cast<double>(c.fold_losses.size());
}

}  // namespace detail

/// Stage 1: 10-fold CV over the roughness weight of the initial estimator.
inline TuningTrace cv_initial(const Problem& full, const TuningPlan& plan) {
    LSFQR_REQUIRE(ConfigError, !plan.lambda_grid.empty(), "empty lambda grid");
    for (std::size_t i = 1; i < plan.lambda_grid.size(); ++i)
        LSFQR_REQUIRE(ConfigError, plan.lambda_grid[i] >= plan.lambda_grid[i - 1],
                      "lambda grid must be sorted ascending");
    const auto fs = detail::make_fold_sets(full.n, plan.folds, plan.seed);
    const int k = plan.folds;
    const int n_cand = static_cast<int>(plan.lambda_grid.size());

    TuningTrace trace;
    trace.initial_stage.resize(static_cast<std::size_t>(n_cand));
    for (int c = 0; c < n_cand; ++c) {
        trace.initial_stage[static_cast<std::size_t>(c)].lambda = plan.lambda_grid[c];
        trace.initial_stage[static_cast<std::size_t>(c)].fold_losses.assign(
            static_cast<std::size_t>(k), std::numeric_limits<double>::quiet_NaN());
    }

    std::vector<Problem> train_problems;
    train_problems.reserve(static_cast<std::size_t>(k));
    for (int f = 0; f < k; ++f)
        train_problems.push_back(slice_problem(full, fs.train[static_cast<std::size_t>(f)]));

    parallel_for(n_cand * k, plan.workers, [&](int job) {
        const int c = job / k, f = job % k;
        auto& cand = trace.initial_stage[static_cast<std::size_t>(c)];
        try {
            const FitResult fit = fit_initial(train_problems[static_cast<std::size_t>(f)],
                                              plan.lambda_grid[c], plan.solve);
            cand.fold_losses[static_cast<std::size_t>(f)] = validation_loss(
                full, fs.held[static_cast<std::size_t>(f)], stack_coefficients(fit));
        } catch (const SolverError&) {
            cand.valid = false;
        }
    });

    for (auto& cand : trace.initial_stage) detail::finalize_mean(cand);
    const Index best = detail::select_candidate(trace.initial_stage);
    trace.initial_stage[static_cast<std::size_t>(best)].selected = true;
    trace.lambda_star = plan.lambda_grid[best];
    return trace;
}

/// Stage 2: full-data active-set identification per (lambda1, lambda2)
/// candidate, then fold scoring by active-set refits at that lambda1.
inline void cv_sparse(const ModelContext& ctx, const Problem& full, const Vector& weights,
                      const TuningPlan& plan, TuningTrace& trace) {
    LSFQR_REQUIRE(ConfigError, !plan.lambda1_grid.empty() && !plan.lambda2_grid.empty(),
                  "empty lambda1/lambda2 grid");
    const auto fs = detail::make_fold_sets(full.n, plan.folds, plan.seed);
    const int k = plan.folds;
    const int n1 = static_cast<int>(plan.lambda1_grid.size());
    const int n2 = static_cast<int>(plan.lambda2_grid.size());
    const int n_cand = n1 * n2;

    trace.sparse_stage.resize(static_cast<std::size_t>(n_cand));
    for (int c = 0; c < n_cand; ++c) {
        auto& cand = trace.sparse_stage[static_cast<std::size_t>(c)];
        cand.lambda1 = plan.lambda1_grid[c / n2];
        cand.lambda2 = plan.lambda2_grid[c % n2];
        cand.fold_losses.assign(static_cast<std::size_t>(k),
                                std::numeric_limits<double>::quiet_NaN());
    }

    // Phase 1: full-data sparse fits -> per-candidate active sets and
    // restricted problems (shared across that candidate's folds).
    std::vector<RestrictedModel> restricted(static_cast<std::size_t>(n_cand));
    parallel_for(n_cand, plan.workers, [&](int c) {
        auto& cand = trace.sparse_stage[static_cast<std::size_t>(c)];
        try {
            const FitResult sparse =
                fit_sparse(full, cand.lambda1, cand.lambda2, weights, plan.option,
                           &ctx.penalties.grams, plan.solve);
            cand.active_size = static_cast<int>(sparse.active_set.size());
            restricted[static_cast<std::size_t>(c)] =
                make_restricted_model(ctx, sparse.active_set);
        } catch (const SolverError&) {
            cand.valid = false;
        }
    });

    // Phase 2: fold refits within each candidate's active set, no group
    // penalty, scored on the held-out subjects.
    parallel_for(n_cand * k, plan.workers, [&](int job) {
        const int c = job / k, f = job % k;
        auto& cand = trace.sparse_stage[static_cast<std::size_t>(c)];
        if (!cand.valid) return;
        const auto& rm = restricted[static_cast<std::size_t>(c)];
        try {
            const Problem train =
                slice_problem(rm.problem, fs.train[static_cast<std::size_t>(f)]);
            const FitResult fit = fit_initial(train, cand.lambda1, plan.solve);
            cand.fold_losses[static_cast<std::size_t>(f)] = validation_loss(
                rm.problem, fs.held[static_cast<std::size_t>(f)], stack_coefficients(fit));
        } catch (const SolverError&) {
            cand.valid = false;
        }
    });

    for (auto& cand : trace.sparse_stage) detail::finalize_mean(cand);
    const Index best = detail::select_candidate(trace.sparse_stage);
    trace.sparse_stage[static_cast<std::size_t>(best)].selected = true;
    trace.lambda1_star = trace.sparse_stage[static_cast<std::size_t>(best)].lambda1;
    trace.lambda2_star = trace.sparse_stage[static_cast<std::size_t>(best)].lambda2;
}

/// Full tuned pipeline result.
struct TunedFit {
    TuningTrace trace;
    FitResult initial;
    Vector weights;
    FitResult sparse;
    FitResult refit;
};

/// The complete protocol: CV the initial roughness weight, compute adaptive
/// weights, CV (lambda1, lambda2) with refit scoring, then produce the
/// final full-data sparse fit and its active-set refit.
inline TunedFit run_tuned_fit(const ModelContext& ctx, const TuningPlan& plan) {
    const Problem full = make_full_problem(ctx);
    TunedFit out;
    out.trace = cv_initial(full, plan);
    out.initial = fit_initial(full, out.trace.lambda_star, plan.solve);
    out.weights = adaptive_weights(out.initial, plan.option, plan.a_w, ctx.groups,
                                   &ctx.penalties.grams);
    cv_sparse(ctx, full, out.weights, plan, out.trace);
    out.sparse = fit_sparse(full, out.trace.lambda1_star, out.trace.lambda2_star, out.weights,
                            plan.option, &ctx.penalties.grams, plan.solve);
    out.refit = refit_active(ctx, out.trace.lambda1_star, out.sparse.active_set, plan.solve);
    return out;
}

}  // namespace lsfqr
