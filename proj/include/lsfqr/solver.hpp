#pragma once

#include "lsfqr/design.hpp"
#include "lsfqr/prox.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace lsfqr {

enum class PenaltyOption { Initial, Option1, Option2 };

/// Triangle-level grouping of the spline coefficients gamma: uniform blocks
/// of `block_size`, one per triangle.
struct GroupStructure {
    Index block_size = 0;
    Index n_blocks = 0;
    Index total() const { return block_size * n_blocks; }
};

/// Everything the solver needs: stacked rows, responses, per-row quantile
/// levels, the null-space map gamma = Q theta and the reduced roughness
/// matrix. Fits for different penalties reuse one Problem.
struct Problem {
    Matrix W;          // N x (alpha_dim + q)
    Vector y;          // N
    Vector u_row;      // N quantile levels
    Index n = 0;       // subjects
    Index n_u = 0;     // quantile levels
    Index alpha_dim = 0;
    Matrix Q;          // n_B x q
    Matrix G_reduced;  // q x q
    GroupStructure groups;

    Index rows() const { return W.rows(); }
    Index dim() const { return W.cols(); }
    Index q() const { return Q.cols(); }
};

inline Problem make_problem(DesignBundle bundle, Matrix Q, Matrix G_reduced,
                            GroupStructure groups) {
    LSFQR_REQUIRE(InvalidArgument, groups.total() == Q.rows(),
                  "group structure does not cover the gamma dimension");
    LSFQR_REQUIRE(InvalidArgument, Q.cols() == bundle.q && G_reduced.rows() == bundle.q,
                  "reduced dimensions disagree");
    Problem pb;
    pb.W = std::move(bundle.W);
    pb.y = std::move(bundle.y);
    pb.u_row = std::move(bundle.u_row);
    pb.n = bundle.n;
    pb.n_u = bundle.n_u;
    pb.alpha_dim = bundle.alpha_dim;
    pb.Q = std::move(Q);
    pb.G_reduced = std::move(G_reduced);
    pb.groups = groups;
    return pb;
}

/// Sparsity penalty settings: lambda2 * sum_j w_j * ||gamma_[j]|| with the
/// Euclidean norm (Option 1) or the L2(triangle) norm induced by the Gram
/// matrices (Option 2).
struct PenaltySpec {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    Vector weights;  // per group; empty means all ones
    PenaltyOption option = PenaltyOption::Initial;
    const std::vector<Matrix>* grams = nullptr;  // required for Option 2
};

struct SolveOptions {
    double tol = 1e-6;       // relative primal/dual residual target
    int max_iter = 20000;
    double over_relax = 1.5;
    int check_every = 25;
    // Residual balancing is confined to a bounded window around the initial
    // rho: with the check loss the prox resolution scales like 1/rho, and
    // unbounded growth stalls rows that sit on a kink at the optimum.
    bool adapt_rho = true;
    bool throw_on_max_iter = true;
};

struct Diagnostics {
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double stationarity_residual = 0.0;
    bool converged = false;
};

struct FitResult {
    Vector eta_hat;
    Vector theta_hat;
    Vector gamma_hat;  // Q * theta_hat
    double objective_value = 0.0;
    Diagnostics diagnostics;
    std::vector<int> active_set;  // groups with ||gamma_[j]|| > eps_zero
    std::vector<int> zero_set;    // groups structurally forced to zero (refits)
};

inline double group_norm(const Vector& gamma_block, PenaltyOption option, const Matrix* gram) {
    if (option == PenaltyOption::Option2 && gram)
        return std::sqrt(std::max(0.0, gamma_block.dot(*gram * gamma_block)));
    return gamma_block.norm();
}

/// Full objective at (eta, theta): mean check loss + lambda1 * theta'G theta
/// + lambda2 * sum_j w_j ||gamma_[j]||.
inline double objective_value(const Problem& pb, const PenaltySpec& pen, const Vector& x) {
    const Vector resid = pb.y - pb.W * x;
    double loss = 0.0;
    for (Index k = 0; k < resid.size(); ++k) loss += check_loss(resid[k], pb.u_row[k]);
    loss /= static_cast<double>(pb.rows());
    const Vector theta = x.tail(pb.q());
    double value = loss + pen.lambda1 * theta.dot(pb.G_reduced * theta);
    if (pen.lambda2 > 0.0) {
        const Vector gamma = pb.Q * theta;
        for (Index j = 0; j < pb.groups.n_blocks; ++j) {
            const Vector block = gamma.segment(j * pb.groups.block_size, pb.groups.block_size);
            const double w = pen.weights.size() ? pen.weights[j] : 1.0;
            const Matrix* gram = pen.grams ? &(*pen.grams)[static_cast<std::size_t>(j)] : nullptr;
            value += pen.lambda2 * w * group_norm(block, pen.option, gram);
        }
    }
    return value;
}

/// Active set from the fitted gamma: groups whose Euclidean norm exceeds
/// eps_zero = 1e-6 * max group norm. The absolute floor keeps numerically
/// tiny (but nonzero) coefficients of a fully shrunk fit from counting as
/// active; pass the response scale so the floor tracks the problem.
inline std::vector<int> extract_active_set(const Vector& gamma, GroupStructure groups,
                                           double rel_tol = 1e-6, double abs_floor = 1e-8) {
    std::vector<double> norms(static_cast<std::size_t>(groups.n_blocks));
    double max_norm = 0.0;
    for (Index j = 0; j < groups.n_blocks; ++j) {
        norms[static_cast<std::size_t>(j)] =
            gamma.segment(j * groups.block_size, groups.block_size).norm();
        max_norm = std::max(max_norm, norms[static_cast<std::size_t>(j)]);
    }
    std::vector<int> active;
    const double eps_zero = std::max(rel_tol * max_norm, abs_floor);
    for (Index j = 0; j < groups.n_blocks; ++j)
        if (norms[static_cast<std::size_t>(j)] > eps_zero) active.push_back(static_cast<int>(j));
    return active;
}

namespace detail {

struct AdmmWork {
    // scaled splitting state
    Vector x, s, alpha, g, beta;
    double rho_s = 1.0, rho_g = 1.0;
};

/// Operator-splitting solve of
///   (1/N) sum_k rho_{u_k}(y_k - W_k x) + lambda1 theta'G theta
///   + lambda2 sum_j w_j ||(Q theta)_[j]||  (Option 2: Gram-metric norms)
/// via ADMM with residual variables s = y - Wx and, when lambda2 > 0,
/// consensus variables g = Q theta carrying the blockwise prox (run in the
/// Gram metric for Option 2, so the subproblem stays a pure scaling).
class AdmmSolver {
public:
    AdmmSolver(const Problem& pb, const PenaltySpec& pen, const SolveOptions& opts)
        : pb_(pb), pen_(pen), opts_(opts) {
        N_ = pb.rows();
        D_ = pb.dim();
        q_ = pb.q();
        nB_ = pb.Q.rows();
        use_groups_ = pen.lambda2 > 0.0;
        if (use_groups_) {
            LSFQR_REQUIRE(InvalidArgument,
                          pen.weights.size() == pb.groups.n_blocks || pen.weights.size() == 0,
                          "one weight per group required");
            LSFQR_REQUIRE(InvalidArgument,
                          pen.option != PenaltyOption::Option2 || pen.grams != nullptr,
                          "Option 2 requires the triangle Gram matrices");
            for (Index j = 0; use_groups_ && pen.grams && j < pb.groups.n_blocks; ++j) {
                Eigen::LLT<Matrix> llt((*pen.grams)[static_cast<std::size_t>(j)]);
                LSFQR_REQUIRE(InvalidArgument, llt.info() == Eigen::Success,
                              "group metric is not positive definite");
                chol_.push_back(std::move(llt));
            }
        }
        WtW_ = pb.W.transpose() * pb.W;
        grad_floor_ = std::sqrt(WtW_.trace()) / static_cast<double>(N_);
        if (use_groups_) {
            if (metric_active()) {
                Matrix MQ(nB_, q_);
                for (Index j = 0; j < pb.groups.n_blocks; ++j)
                    MQ.middleRows(j * pb.groups.block_size, pb.groups.block_size) =
                        (*pen.grams)[static_cast<std::size_t>(j)] *
                        pb.Q.middleRows(j * pb.groups.block_size, pb.groups.block_size);
                K_ = pb.Q.transpose() * MQ;
                K_ = 0.5 * (K_ + K_.transpose()).eval();
            } else {
                K_ = pb.Q.transpose() * pb.Q;
            }
        }
    }

    FitResult run() {
        AdmmWork w;
        w.x = Vector::Zero(D_);
        w.s = pb_.y;  // residuals at x = 0
        w.alpha = Vector::Zero(N_);
        w.g = Vector::Zero(nB_);
        w.beta = Vector::Zero(nB_);
        w.rho_s = rho_s0_ = 1.0 / static_cast<double>(N_);
        w.rho_g = rho_g0_ = 1.0;
        refactor(w);

        Diagnostics diag;
        Vector s_prev = w.s, g_prev = w.g;
        const double y_norm = pb_.y.norm();
        int it = 0;
        bool converged = false;
        for (it = 1; it <= opts_.max_iter; ++it) {
            // x-update: proximal-regularized quadratic solve
            Vector rhs = w.rho_s * (pb_.W.transpose() * (pb_.y - w.s - w.alpha));
            if (use_groups_) {
                Vector mg = apply_metric(w.g - w.beta);
                rhs.tail(q_).noalias() += w.rho_g * (pb_.Q.transpose() * mg);
            }
            rhs.noalias() += delta_ * w.x;
            const Vector x = ldlt_.solve(rhs);

            const Vector Wx = pb_.W * x;
            s_prev.swap(w.s);
            const double nu = opts_.over_relax;
            // s-update against the relaxed W x
            const Vector Wx_hat = nu * Wx + (1.0 - nu) * (pb_.y - s_prev);
            Vector v = pb_.y - Wx_hat - w.alpha;
            const double tau = 1.0 / (static_cast<double>(N_) * w.rho_s);
            for (Index k = 0; k < N_; ++k) w.s[k] = prox_check(v[k], pb_.u_row[k], tau);
            w.alpha += Wx_hat + w.s - pb_.y;

            Vector Ex;
            if (use_groups_) {
                Ex = pb_.Q * x.tail(q_);
                g_prev.swap(w.g);
                const Vector Ex_hat = nu * Ex + (1.0 - nu) * g_prev;
                const Vector vg = Ex_hat + w.beta;
                for (Index j = 0; j < pb_.groups.n_blocks; ++j) {
                    const Index off = j * pb_.groups.block_size;
                    const double wj = pen_.weights.size() ? pen_.weights[j] : 1.0;
                    const double kappa = pen_.lambda2 * wj / w.rho_g;
                    const Vector block = vg.segment(off, pb_.groups.block_size);
                    const Matrix* gram = metric_active()
                                             ? &(*pen_.grams)[static_cast<std::size_t>(j)]
                                             : nullptr;
                    w.g.segment(off, pb_.groups.block_size) = prox_group(block, kappa, gram);
                }
                w.beta += Ex_hat - w.g;
            }
            w.x = x;

            if (it % opts_.check_every == 0 || it == opts_.max_iter) {
                // residuals (Boyd-style scaling)
                const Vector r1 = Wx + w.s - pb_.y;
                const Vector d1 = w.rho_s * (pb_.W.transpose() * (w.s - s_prev));
                double pri = r1.norm();
                double pri_scale = std::max({Wx.norm(), w.s.norm(), y_norm});
                double dua = d1.norm();
                double dua_scale = w.rho_s * (pb_.W.transpose() * w.alpha).norm();
                double pri2 = 0.0, pri2_scale = 0.0, dua2 = 0.0, dua2_scale = 0.0;
                if (use_groups_) {
                    const Vector r2 = Ex - w.g;
                    const Vector d2 =
                        w.rho_g * (pb_.Q.transpose() * apply_metric(w.g - g_prev));
                    pri2 = r2.norm();
                    pri2_scale = std::max(Ex.norm(), w.g.norm());
                    dua2 = d2.norm();
                    dua2_scale = w.rho_g * (pb_.Q.transpose() * apply_metric(w.beta)).norm();
                }
                // ||W^T alpha|| vanishes at stationarity, so the dual
                // tolerance keeps a gradient-scale floor
                const double eps_abs = 1e-14;
                const bool pri_ok =
                    pri <= std::sqrt(static_cast<double>(N_)) * eps_abs +
                               opts_.tol * std::max(pri_scale, 1e-12) &&
                    pri2 <= std::sqrt(static_cast<double>(std::max<Index>(nB_, 1))) * eps_abs +
                                opts_.tol * std::max(pri2_scale, 1e-12);
                const bool dua_ok =
                    dua <= std::sqrt(static_cast<double>(D_)) * eps_abs +
                               opts_.tol * std::max(dua_scale, grad_floor_) &&
                    dua2 <= std::sqrt(static_cast<double>(D_)) * eps_abs +
                                opts_.tol * std::max(dua2_scale, grad_floor_);

                diag.primal_residual = std::max(pri, pri2);
                diag.dual_residual = std::max(dua, dua2);
                if (pri_ok && dua_ok) {
                    converged = true;
                    break;
                }
                if (opts_.adapt_rho && it >= 50 && it <= 4000) {
                    bool changed = false;
                    if (pri_scale > 0.0 && dua_scale > 0.0 && dua > 1e-10 * dua_scale)
                        changed |= balance(w.rho_s, w.alpha, pri / pri_scale, dua / dua_scale,
                                           rho_s0_);
                    if (use_groups_ && pri2_scale > 0.0 && dua2_scale > 0.0 &&
                        dua2 > 1e-10 * dua2_scale)
                        changed |= balance(w.rho_g, w.beta, pri2 / pri2_scale,
                                           dua2 / dua2_scale, rho_g0_);
                    if (changed) refactor(w);
                }
            }
        }

        diag.iterations = std::min(it, opts_.max_iter);
        diag.converged = converged;
        diag.stationarity_residual = stationarity(w);
        if (!converged && opts_.throw_on_max_iter)
            LSFQR_THROW(SolverError,
                        "no convergence after " + std::to_string(opts_.max_iter) +
                            " iterations (primal " + std::to_string(diag.primal_residual) +
                            ", dual " + std::to_string(diag.dual_residual) + ")");

        FitResult fit;
        fit.eta_hat = w.x.head(pb_.alpha_dim);
        fit.theta_hat = w.x.tail(q_);
        fit.gamma_hat = pb_.Q * fit.theta_hat;
        fit.objective_value = objective_value(pb_, pen_, w.x);
        fit.diagnostics = diag;
        const double y_scale = 1.0 + pb_.y.cwiseAbs().maxCoeff();
        fit.active_set =
            extract_active_set(fit.gamma_hat, pb_.groups, 1e-6, 100.0 * opts_.tol * y_scale);
        return fit;
    }

private:
    bool metric_active() const {
        return pen_.option == PenaltyOption::Option2 && pen_.grams != nullptr;
    }

    Vector apply_metric(const Vector& v) const {
        if (!metric_active()) return v;
        Vector out(v.size());
        for (Index j = 0; j < pb_.groups.n_blocks; ++j) {
            const Index off = j * pb_.groups.block_size;
            out.segment(off, pb_.groups.block_size) =
                (*pen_.grams)[static_cast<std::size_t>(j)] *
                v.segment(off, pb_.groups.block_size);
        }
        return out;
    }

    void refactor(const AdmmWork& w) {
        Matrix Hmat = w.rho_s * WtW_;
        if (use_groups_) Hmat.bottomRightCorner(q_, q_).noalias() += w.rho_g * K_;
        Hmat.bottomRightCorner(q_, q_).noalias() += 2.0 * pen_.lambda1 * pb_.G_reduced;
        if (delta_ == 0.0) delta_ = 1e-9 * (1.0 + Hmat.trace() / static_cast<double>(D_));
        Hmat.diagonal().array() += delta_;
        ldlt_.compute(Hmat);
        LSFQR_REQUIRE(SolverError, ldlt_.info() == Eigen::Success,
                      "x-update system factorization failed");
    }

    // rho doubling/halving when primal and dual progress diverge; the
    // scaled dual must be rescaled in step. Bounded to a window around the
    // initial value.
    static bool balance(double& rho, Vector& dual, double pri_rel, double dua_rel, double rho0) {
        if (pri_rel > 10.0 * dua_rel && rho < 1e3 * rho0) {
            rho *= 2.0;
            dual *= 0.5;
            return true;
        }
        if (dua_rel > 10.0 * pri_rel && rho > 1e-3 * rho0) {
            rho *= 0.5;
            dual *= 2.0;
            return true;
        }
        return false;
    }

    /// Certified optimality gap surrogate: distance of the dual-implied
    /// subgradients from the subdifferentials plus the Lagrangian
    /// stationarity residual. Approaches 0 at the optimum.
    double stationarity(const AdmmWork& w) const {
        const Vector lambda = w.rho_s * w.alpha;  // -lambda in d h(s)
        Vector grad = Vector::Zero(D_);
        grad.tail(q_) = 2.0 * pen_.lambda1 * (pb_.G_reduced * w.x.tail(q_));
        grad.noalias() += pb_.W.transpose() * lambda;
        double dist_h = 0.0;
        const Vector resid = pb_.y - pb_.W * w.x;
        // rows within solver accuracy of the kink count as kink rows
        const double kink_tol = 10.0 * opts_.tol * (1.0 + pb_.y.cwiseAbs().maxCoeff());
        const double invN = 1.0 / static_cast<double>(N_);
        for (Index k = 0; k < N_; ++k) {
            const double lo = (pb_.u_row[k] - 1.0) * invN;
            const double hi = pb_.u_row[k] * invN;
            const double z = -lambda[k];
            double d;
            if (resid[k] > kink_tol) d = std::abs(z - hi);
            else if (resid[k] < -kink_tol) d = std::abs(z - lo);
            else d = std::max({lo - z, z - hi, 0.0});
            dist_h += d * d;
        }
        double dist_p = 0.0;
        if (use_groups_) {
            const Vector mu = w.rho_g * apply_metric(w.beta);  // mu in d P(g)
            grad.tail(q_).noalias() += pb_.Q.transpose() * mu;
            const Vector gamma = pb_.Q * w.x.tail(q_);
            for (Index j = 0; j < pb_.groups.n_blocks; ++j) {
                const Index off = j * pb_.groups.block_size;
                const Vector block = gamma.segment(off, pb_.groups.block_size);
                const Vector mu_j = mu.segment(off, pb_.groups.block_size);
                const double wj = pen_.weights.size() ? pen_.weights[j] : 1.0;
                const double radius = pen_.lambda2 * wj;
                const Matrix* gram =
                    metric_active() ? &(*pen_.grams)[static_cast<std::size_t>(j)] : nullptr;
                const double norm = group_norm(block, pen_.option, gram);
                double d;
                if (norm > 1e-10 * (1.0 + gamma.norm())) {
                    Vector sub;
                    if (gram) sub = radius * (*gram * block) / norm;
                    else sub = radius * block / norm;
                    d = (mu_j - sub).norm();
                } else {
                    // dual norm of mu_j: Euclidean, or M^{-1}-weighted
                    double dual_norm;
                    if (gram) {
                        const Vector solved =
                            chol_[static_cast<std::size_t>(j)].solve(mu_j);
                        dual_norm = std::sqrt(std::max(0.0, mu_j.dot(solved)));
                    } else {
                        dual_norm = mu_j.norm();
                    }
                    d = std::max(0.0, dual_norm - radius);
                }
                dist_p += d * d;
            }
        }
        return grad.norm() + std::sqrt(dist_h) + std::sqrt(dist_p);
    }

    const Problem& pb_;
    const PenaltySpec& pen_;
    const SolveOptions& opts_;
    Index N_ = 0, D_ = 0, q_ = 0, nB_ = 0;
    bool use_groups_ = false;
    Matrix WtW_, K_;
    std::vector<Eigen::LLT<Matrix>> chol_;
    Eigen::LDLT<Matrix> ldlt_;
    double delta_ = 0.0;
    double rho_s0_ = 1.0, rho_g0_ = 1.0;
    double grad_floor_ = 1.0;
};

}  // namespace detail

/// Initial (non-sparse) estimator: mean check loss + lambda * theta'G theta.
inline FitResult fit_initial(const Problem& pb, double lambda,
                             const SolveOptions& opts = {}) {
    LSFQR_REQUIRE(InvalidArgument, lambda >= 0.0, "roughness weight must be nonnegative");
    PenaltySpec pen;
    pen.lambda1 = lambda;
    pen.option = PenaltyOption::Initial;
    return detail::AdmmSolver(pb, pen, opts).run();
}

/// Adaptive group-LASSO weights from an initial fit. Option 1 uses the
/// Euclidean norm of the coefficient block, Option 2 the L2 norm of the
/// fitted surface restricted to the triangle. Near-zero blocks are capped
/// at w_max so the objective stays finite.
inline Vector adaptive_weights(const FitResult& initial, PenaltyOption option, double a_w,
                               GroupStructure groups,
                               const std::vector<Matrix>* grams = nullptr,
                               double eps_floor = 1e-8, double w_max = 1e8) {
    LSFQR_REQUIRE(InvalidArgument, a_w > 0.0, "adaptivity exponent must be positive");
    LSFQR_REQUIRE(InvalidArgument, option != PenaltyOption::Option2 || grams,
                  "Option 2 weights need the triangle Gram matrices");
    Vector w(groups.n_blocks);
    for (Index j = 0; j < groups.n_blocks; ++j) {
        const Vector block =
            initial.gamma_hat.segment(j * groups.block_size, groups.block_size);
        const Matrix* gram =
            option == PenaltyOption::Option2 ? &(*grams)[static_cast<std::size_t>(j)] : nullptr;
        const double norm = group_norm(block, option, gram);
        w[j] = norm < eps_floor ? w_max : std::min(std::pow(norm, -a_w), w_max);
    }
    return w;
}

/// Adaptive group-LASSO estimator (Options 1 and 2).
inline FitResult fit_sparse(const Problem& pb, double lambda1, double lambda2,
                            const Vector& weights, PenaltyOption option,
                            const std::vector<Matrix>* grams = nullptr,
                            const SolveOptions& opts = {}) {
    LSFQR_REQUIRE(InvalidArgument, lambda1 >= 0.0 && lambda2 >= 0.0,
                  "penalty weights must be nonnegative");
    LSFQR_REQUIRE(InvalidArgument, weights.size() == 0 || weights.minCoeff() > 0.0,
                  "group weights must be positive");
    PenaltySpec pen;
    pen.lambda1 = lambda1;
    pen.lambda2 = lambda2;
    pen.weights = weights;
    pen.option = lambda2 > 0.0 ? option : PenaltyOption::Initial;
    pen.grams = grams;
    return detail::AdmmSolver(pb, pen, opts).run();
}

}  // namespace lsfqr
