#pragma once

#include "lsfqr/common.hpp"

namespace lsfqr {

/// Check (quantile) loss rho_u(x) = x * (u - 1{x < 0}).
inline double check_loss(double x, double u) {
    LSFQR_REQUIRE(InvalidArgument, u > 0.0 && u < 1.0, "quantile level must be in (0,1)");
    return x * (u - (x < 0.0 ? 1.0 : 0.0));
}

/// Proximal operator of tau * rho_u: the asymmetric soft threshold.
inline double prox_check(double v, double u, double tau) {
    if (v > tau * u) return v - tau * u;
    if (v < -tau * (1.0 - u)) return v + tau * (1.0 - u);
    return 0.0;
}

/// Block soft threshold in the geometry of an SPD metric M:
/// argmin_z kappa*||z||_M + 1/2*||z - v||_M^2 = v * max(0, 1 - kappa/||v||_M).
/// Null metric means the Euclidean one.
inline Vector prox_group(const Vector& v, double kappa, const Matrix* metric = nullptr) {
    LSFQR_REQUIRE(InvalidArgument, kappa >= 0.0, "threshold must be nonnegative");
    double sq;
    if (metric) {
        LSFQR_REQUIRE(InvalidArgument, metric->rows() == v.size() && metric->cols() == v.size(),
                      "metric dimension mismatch");
        sq = v.dot(*metric * v);
        LSFQR_REQUIRE(InvalidArgument, sq >= 0.0, "metric is not positive definite");
    } else {
        sq = v.squaredNorm();
    }
    const double norm = std::sqrt(sq);
    if (norm <= kappa) return Vector::Zero(v.size());
    return v * (1.0 - kappa / norm);
}

}  // namespace lsfqr
