#pragma once

#include "lsfqr/bernstein.hpp"
#include "lsfqr/quadrature.hpp"

#include <algorithm>
#include <iostream>
#include <vector>

namespace lsfqr {

/// Roughness matrix G and per-triangle Gram matrices M_j.
/// gamma' G gamma = sum over triangles of the integral of
/// s_tt^2 + 2 s_tu^2 + s_uu^2 (binomial weights (1,2,1));
/// (M_j)_{ab} = integral over triangle j of B_a B_b.
struct PenaltyPack {
    SparseMatrix G;
    Matrix G_reduced;
    std::vector<Matrix> grams;
    bool roughness_degenerate = false;  // set when d < 2 forces G = 0
};

/// Integrals of pairwise second-derivative products on each triangle,
/// assembled with a symmetric rule exact for degree >= 2d (covers both the
/// degree-2(d-2) integrands here and the grams).
inline SparseMatrix roughness_matrix(const BernsteinBasis& basis, int quadrature_degree = -1) {
    const int n_loc = basis.per_triangle();
    const int M = basis.mesh().triangle_count();
    SparseMatrix G(basis.size(), basis.size());
    if (basis.degree() < 2) {
        std::cerr << "lsfqr: warning: degree < 2, second derivatives vanish; "
                     "roughness matrix is identically zero\n";
        return G;
    }
    const int degree =
        quadrature_degree > 0 ? quadrature_degree : std::max(1, 2 * basis.degree());
    const TriangleRule rule = triangle_rule(std::clamp(degree, 1, 20));
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(M) * n_loc * n_loc);
    for (int m = 0; m < M; ++m) {
        const double area = basis.mesh().triangle_area(m);
        Matrix local = Matrix::Zero(n_loc, n_loc);
        for (std::size_t p = 0; p < rule.points.size(); ++p) {
            const auto tt = basis.local_values(m, rule.points[p], 2, 0);
            const auto tu = basis.local_values(m, rule.points[p], 1, 1);
            const auto uu = basis.local_values(m, rule.points[p], 0, 2);
            const double w = rule.weights[p] * area;
            for (int a = 0; a < n_loc; ++a)
                for (int b = 0; b <= a; ++b)
                    local(a, b) += w * (tt[a] * tt[b] + 2.0 * tu[a] * tu[b] + uu[a] * uu[b]);
        }
        const Index base = static_cast<Index>(m) * n_loc;
        for (int a = 0; a < n_loc; ++a) {
            for (int b = 0; b <= a; ++b) {
                trips.emplace_back(base + a, base + b, local(a, b));
                if (a != b) trips.emplace_back(base + b, base + a, local(a, b));
            }
        }
    }
    G.setFromTriplets(trips.begin(), trips.end());
    return G;
}

/// Gram of triangle j's own basis functions, quadrature exact for degree 2d.
inline Matrix triangle_gram(const BernsteinBasis& basis, int triangle,
                            int quadrature_degree = -1) {
    const int n_loc = basis.per_triangle();
    const int degree =
        quadrature_degree > 0 ? quadrature_degree : std::max(1, 2 * basis.degree());
    const TriangleRule rule = triangle_rule(std::clamp(degree, 1, 20));
    const double area = basis.mesh().triangle_area(triangle);
    Matrix gram = Matrix::Zero(n_loc, n_loc);
    for (std::size_t p = 0; p < rule.points.size(); ++p) {
        const auto vals = basis.local_values(triangle, rule.points[p], 0, 0);
        const double w = rule.weights[p] * area;
        for (int a = 0; a < n_loc; ++a)
            for (int b = 0; b <= a; ++b) gram(a, b) += w * vals[a] * vals[b];
    }
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    return gram;
}

/// Q^T G Q, symmetrized.
inline Matrix reduce(const SparseMatrix& G, const Matrix& Q) {
    LSFQR_REQUIRE(InvalidArgument, G.rows() == G.cols() && G.cols() == Q.rows(),
                  "dimension mismatch between G and Q");
    const Matrix GQ = G * Q;
    Matrix out = Q.transpose() * GQ;
    out = 0.5 * (out + out.transpose()).eval();
    return out;
}

inline PenaltyPack make_penalties(const BernsteinBasis& basis, const Matrix& Q) {
    PenaltyPack pack;
    pack.roughness_degenerate = basis.degree() < 2;
    pack.G = roughness_matrix(basis);
    pack.G_reduced = reduce(pack.G, Q);
    pack.grams.reserve(basis.mesh().triangle_count());
    for (int m = 0; m < basis.mesh().triangle_count(); ++m)
        pack.grams.push_back(triangle_gram(basis, m));
    return pack;
}

}  // namespace lsfqr
