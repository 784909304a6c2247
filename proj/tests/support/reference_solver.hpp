#pragma once

// Slow proximal-subgradient reference solver, written against the plain
// objective definition and sharing no code with the library's ADMM path.
// Groups must be coordinate blocks of the trailing q variables (Q = I).
//
// Steps follow a stage-wise geometric decay (halved every `stage` sweeps),
// which converges on these sharp piecewise-linear + quadratic objectives;
// the best visited point is returned.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace lsfqr::testing {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct RefProblem {
    MatrixXd W;
    VectorXd y;
    VectorXd u_row;
    Index alpha_dim = 0;
    MatrixXd G;       // q x q roughness on the trailing block
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    VectorXd weights;           // per group (may be empty -> ones)
    Index block_size = 1;
    Index n_blocks = 0;
    std::vector<MatrixXd> grams;  // optional metric per group (Option 2)
    bool metric_norm = false;
};

inline double ref_group_norm(const RefProblem& pb, const VectorXd& block, Index j) {
    if (pb.metric_norm) return std::sqrt(block.dot(pb.grams[static_cast<std::size_t>(j)] * block));
    return block.norm();
}

inline double ref_objective(const RefProblem& pb, const VectorXd& x) {
    const VectorXd r = pb.y - pb.W * x;
    double loss = 0.0;
    for (Index k = 0; k < r.size(); ++k) {
        const double u = pb.u_row[k];
        loss += r[k] * (u - (r[k] < 0.0 ? 1.0 : 0.0));
    }
    loss /= static_cast<double>(r.size());
    const Index q = pb.G.rows();
    const VectorXd theta = x.tail(q);
    double value = loss + pb.lambda1 * theta.dot(pb.G * theta);
    for (Index j = 0; j < pb.n_blocks; ++j) {
        const VectorXd block =
            x.segment(pb.alpha_dim + j * pb.block_size, pb.block_size);
        const double w = pb.weights.size() ? pb.weights[j] : 1.0;
        value += pb.lambda2 * w * ref_group_norm(pb, block, j);
    }
    return value;
}

struct RefSolution {
    VectorXd x;
    double objective = 0.0;
};

inline RefSolution reference_solve(const RefProblem& pb, int total_iters = 400000,
                                   int stage = 20000, double t0 = -1.0) {
    const Index D = pb.W.cols();
    const Index N = pb.W.rows();
    const Index q = pb.G.rows();
    if (t0 <= 0.0) {
        const double wnorm = pb.W.operatorNorm();
        t0 = 1.0 / (wnorm * wnorm / static_cast<double>(N) + 2.0 * pb.lambda1 * pb.G.norm() +
                    1.0);
    }

    VectorXd x = VectorXd::Zero(D);
    VectorXd best_x = x;
    double best_f = ref_objective(pb, x);

    const bool proxable = pb.lambda2 > 0.0 && !pb.metric_norm;
    for (int it = 0; it < total_iters; ++it) {
        const double t = t0 * std::pow(0.5, it / stage);
        // subgradient of the check-loss term
        const VectorXd r = pb.y - pb.W * x;
        VectorXd c(N);
        for (Index k = 0; k < N; ++k)
            c[k] = r[k] > 0.0 ? pb.u_row[k] : (r[k] < 0.0 ? pb.u_row[k] - 1.0 : 0.0);
        VectorXd grad = -(pb.W.transpose() * c) / static_cast<double>(N);
        grad.tail(q) += 2.0 * pb.lambda1 * (pb.G * x.tail(q));
        if (pb.lambda2 > 0.0 && pb.metric_norm) {
            // Option 2 norms are handled by subgradient too
            for (Index j = 0; j < pb.n_blocks; ++j) {
                const Index off = pb.alpha_dim + j * pb.block_size;
                const VectorXd block = x.segment(off, pb.block_size);
                const double nrm = ref_group_norm(pb, block, j);
                if (nrm > 1e-14) {
                    const double w = pb.weights.size() ? pb.weights[j] : 1.0;
                    grad.segment(off, pb.block_size) +=
                        pb.lambda2 * w *
                        (pb.grams[static_cast<std::size_t>(j)] * block) / nrm;
                }
            }
        }
        x -= t * grad;
        if (proxable) {
            for (Index j = 0; j < pb.n_blocks; ++j) {
                const Index off = pb.alpha_dim + j * pb.block_size;
                const double w = pb.weights.size() ? pb.weights[j] : 1.0;
                const double thr = t * pb.lambda2 * w;
                const double nrm = x.segment(off, pb.block_size).norm();
                if (nrm <= thr) x.segment(off, pb.block_size).setZero();
                else x.segment(off, pb.block_size) *= 1.0 - thr / nrm;
            }
        }
        const double f = ref_objective(pb, x);
        if (f < best_f) {
            best_f = f;
            best_x = x;
        }
    }
    return {best_x, best_f};
}

}  // namespace lsfqr::testing
