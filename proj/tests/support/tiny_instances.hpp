#pragma once

// Shared generator of small random solver instances with unconstrained
// coefficients (Q = identity), so coordinate blocks are the gamma groups and
// the reference solver's prox applies exactly.

#include "lsfqr/rng.hpp"
#include "lsfqr/solver.hpp"

#include "reference_solver.hpp"

namespace lsfqr::testing {

struct TinyInstance {
    Problem pb;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    Vector weights;
    std::vector<Matrix> grams;
};

inline TinyInstance make_tiny_instance(std::uint64_t seed, bool with_metric = false) {
    Rng rng(seed);
    TinyInstance inst;
    const Index n = 6 + static_cast<Index>(rng.below(5));        // <= 10 subjects
    const Index n_u = 1 + static_cast<Index>(rng.below(3));      // <= 3 levels
    const Index alpha_dim = 1 + static_cast<Index>(rng.below(2));
    const Index block_size = 2 + static_cast<Index>(rng.below(2));
    const Index n_blocks = 2 + static_cast<Index>(rng.below(2));
    const Index q = block_size * n_blocks;  // <= 12

    Problem& pb = inst.pb;
    pb.n = n;
    pb.n_u = n_u;
    pb.alpha_dim = alpha_dim;
    pb.Q = Matrix::Identity(q, q);
    pb.groups = {block_size, n_blocks};

    const Index N = n * n_u;
    const Index D = alpha_dim + q;
    pb.W.resize(N, D);
    for (Index i = 0; i < N; ++i)
        for (Index j = 0; j < D; ++j) pb.W(i, j) = rng.normal();

    Matrix B(q, q);
    for (Index i = 0; i < q; ++i)
        for (Index j = 0; j < q; ++j) B(i, j) = rng.normal();
    pb.G_reduced = B.transpose() * B / static_cast<double>(q);

    // sparse-ish ground truth: half the blocks active
    Vector x_true = Vector::Zero(D);
    for (Index j = 0; j < alpha_dim; ++j) x_true[j] = rng.normal();
    for (Index b = 0; b < n_blocks; b += 2)
        for (Index l = 0; l < block_size; ++l)
            x_true[alpha_dim + b * block_size + l] = 2.0 * rng.normal();

    pb.u_row.resize(N);
    pb.y.resize(N);
    for (Index r = 0; r < n_u; ++r) {
        const double u = (r + 1.0) / (n_u + 1.0);
        for (Index i = 0; i < n; ++i) {
            pb.u_row[r * n + i] = u;
            pb.y[r * n + i] = pb.W.row(r * n + i).dot(x_true) + 0.3 * rng.normal();
        }
    }

    inst.lambda1 = 1e-3 * (1.0 + rng.uniform());
    inst.lambda2 = 0.02 + 0.04 * rng.uniform();
    inst.weights = Vector::Ones(n_blocks);
    for (Index j = 0; j < n_blocks; ++j) inst.weights[j] = 0.5 + rng.uniform();

    if (with_metric) {
        for (Index j = 0; j < n_blocks; ++j) {
            Matrix C(block_size, block_size);
            for (Index a = 0; a < block_size; ++a)
                for (Index b = 0; b < block_size; ++b) C(a, b) = rng.normal();
            inst.grams.push_back(C.transpose() * C +
                                 0.5 * Matrix::Identity(block_size, block_size));
        }
    }
    return inst;
}

inline RefProblem to_ref(const TinyInstance& inst, double lambda2_override = -1.0) {
    RefProblem ref;
    ref.W = inst.pb.W;
    ref.y = inst.pb.y;
    ref.u_row = inst.pb.u_row;
    ref.alpha_dim = inst.pb.alpha_dim;
    ref.G = inst.pb.G_reduced;
    ref.lambda1 = inst.lambda1;
    ref.lambda2 = lambda2_override >= 0.0 ? lambda2_override : inst.lambda2;
    ref.weights = inst.weights;
    ref.block_size = inst.pb.groups.block_size;
    ref.n_blocks = inst.pb.groups.n_blocks;
    if (!inst.grams.empty()) {
        ref.grams = inst.grams;
        ref.metric_norm = true;
    }
    return ref;
}

}  // namespace lsfqr::testing
