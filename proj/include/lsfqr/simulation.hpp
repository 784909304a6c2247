#pragma once

#include "lsfqr/dataset.hpp"
#include "lsfqr/rng.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <functional>
#include <vector>

namespace lsfqr {

using SurfaceFn = std::function<double(double, double)>;

/// Quartic bump a * (1 - ((t-c)/h)^2)^2 on |t-c| < h, zero elsewhere; the
/// support boundary is exact, which is what makes the null region exact.
struct Bump {
    double center = 0.5;
    double halfwidth = 0.0;  // zero disables the bump
    double amplitude = 0.0;
    double operator()(double t) const {
        if (halfwidth <= 0.0 || amplitude == 0.0) return 0.0;
        const double z = (t - center) / halfwidth;
        if (std::abs(z) >= 1.0) return 0.0;
        const double s = 1.0 - z * z;
        return amplitude * s * s;
    }
};

enum class ErrorDist { Normal, StudentT };

/// Synthetic data generator with a known locally sparse slope surface,
/// built from the location-scale form
///   Y = z'a + int beta_loc X + (1 + int beta_scale X) * eps,
/// whose conditional u-quantile slope is beta_loc(t) + beta_scale(t) F^{-1}(u).
struct Scenario {
    Index n = 200;
    Index m = 101;
    int K = 6;  // Karhunen-Loeve truncation
    double T = 1.0;
    Bump beta_loc{0.3, 0.2, 3.0};
    Bump beta_scale{0.6, 0.1, 1.0};
    Vector alpha_star;  // (p+1): intercept + scalar-covariate slopes
    ErrorDist error = ErrorDist::Normal;
    int t_df = 3;
    std::uint64_t seed = 1;
    double positivity_floor = 0.05;
    int resample_budget = 100;
};

inline double error_quantile(const Scenario& sc, double u) {
    if (sc.error == ErrorDist::StudentT)
        return boost::math::quantile(boost::math::students_t_distribution<double>(sc.t_df), u);
    return boost::math::quantile(boost::math::normal_distribution<double>(), u);
}

/// True slope surface and its exact null classification.
struct TrueBeta {
    Bump loc, scale;
    const Scenario* sc = nullptr;
    double operator()(double t, double u) const {
        return loc(t) + scale(t) * error_quantile(*sc, u);
    }
};

inline Vector kl_coefficients(const Scenario& sc, Rng& rng) {
    Vector xi(sc.K);
    for (int k = 1; k <= sc.K; ++k) xi[k - 1] = rng.normal() / static_cast<double>(k);
    return xi;
}

/// Orthonormal cosines sqrt(2/T) cos(k pi t / T), k = 1..K, on the t-grid.
inline Matrix cosine_basis(const Scenario& sc, const Vector& t_grid) {
    Matrix phi(sc.K, t_grid.size());
    const double pi = 3.14159265358979323846;
    for (int k = 1; k <= sc.K; ++k)
        for (Index j = 0; j < t_grid.size(); ++j)
            phi(k - 1, j) = std::sqrt(2.0 / sc.T) * std::cos(k * pi * t_grid[j] / sc.T);
    return phi;
}

inline Vector trapezoid_weights(const Vector& t_grid) {
    Vector w = Vector::Zero(t_grid.size());
    for (Index j = 0; j + 1 < t_grid.size(); ++j) {
        const double h = t_grid[j + 1] - t_grid[j];
        w[j] += 0.5 * h;
        w[j + 1] += 0.5 * h;
    }
    return w;
}

/// Curves only (deterministic under the scenario seed).
inline Matrix gen_curves(const Scenario& sc) {
    LSFQR_REQUIRE(InvalidArgument, sc.K >= 1, "need at least one KL component");
    Rng rng(sc.seed);
    Vector t_grid(sc.m);
    for (Index j = 0; j < sc.m; ++j) t_grid[j] = sc.T * j / (sc.m - 1);
    const Matrix phi = cosine_basis(sc, t_grid);
    Matrix X(sc.n, sc.m);
    for (Index i = 0; i < sc.n; ++i) X.row(i) = kl_coefficients(sc, rng).transpose() * phi;
    return X;
}

struct SimulatedData {
    FunctionalDataset dataset;
    TrueBeta truth;
    int resampled = 0;
};

/// Full dataset plus the closed-form true slope surface. Curves violating
/// the scale-positivity floor are redrawn (counted); exceeding the budget is
/// an error.
inline SimulatedData gen_response(const Scenario& sc) {
    Rng rng(sc.seed);
    SimulatedData out;
    out.truth = TrueBeta{sc.beta_loc, sc.beta_scale, &sc};

    FunctionalDataset& ds = out.dataset;
    ds.t_grid.resize(sc.m);
    for (Index j = 0; j < sc.m; ++j) ds.t_grid[j] = sc.T * j / (sc.m - 1);
    const Matrix phi = cosine_basis(sc, ds.t_grid);
    const Vector w = trapezoid_weights(ds.t_grid);

    Vector loc_curve(sc.m), scale_curve(sc.m);
    for (Index j = 0; j < sc.m; ++j) {
        loc_curve[j] = sc.beta_loc(ds.t_grid[j]);
        scale_curve[j] = sc.beta_scale(ds.t_grid[j]);
    }

    const Index p = sc.alpha_star.size() > 0 ? sc.alpha_star.size() - 1 : 0;
    ds.X.resize(sc.n, sc.m);
    ds.Z.resize(sc.n, p + 1);
    ds.Z.col(0).setOnes();
    ds.y.resize(sc.n);

    for (Index i = 0; i < sc.n; ++i) {
        Vector xi;
        double scale_factor = 0.0;
        int tries = 0;
        Vector curve;
        do {
            LSFQR_REQUIRE(DataError, tries <= sc.resample_budget,
                          "scale positivity could not be met within the resample budget");
            xi = kl_coefficients(sc, rng);
            curve = phi.transpose() * xi;
            scale_factor = 1.0 + curve.dot(w.cwiseProduct(scale_curve));
            ++tries;
        } while (scale_factor <= sc.positivity_floor);
        out.resampled += tries - 1;
        ds.X.row(i) = curve.transpose();

        for (Index k = 1; k <= p; ++k) ds.Z(i, k) = rng.normal();
        const double eps =
            sc.error == ErrorDist::StudentT ? rng.student_t(sc.t_df) : rng.normal();
        const double loc_part = curve.dot(w.cwiseProduct(loc_curve));
        double zpart = 0.0;
        for (Index k = 0; k <= p; ++k)
            zpart += (sc.alpha_star.size() ? sc.alpha_star[k] : 0.0) * ds.Z(i, k);
        ds.y[i] = zpart + loc_part + scale_factor * eps;
    }
    return out;
}

/// Tensor-grid trapezoid of (a - b)^2 over [t_range] x [u_range].
inline double ise(const SurfaceFn& a, const SurfaceFn& b, Interval t_range, Interval u_range,
                  int n_t_nodes = 101, int n_u_nodes = 41) {
    LSFQR_REQUIRE(InvalidArgument, n_t_nodes >= 2 && n_u_nodes >= 2, "need at least 2 nodes");
    Vector tw(n_t_nodes), uw(n_u_nodes);
    auto fill = [](Vector& w, Interval r, int nn) {
        const double h = r.length() / (nn - 1);
        w.setConstant(h);
        w[0] = w[nn - 1] = 0.5 * h;
    };
    fill(tw, t_range, n_t_nodes);
    fill(uw, u_range, n_u_nodes);
    double total = 0.0;
    for (int it = 0; it < n_t_nodes; ++it) {
        const double t = t_range.lo + it * t_range.length() / (n_t_nodes - 1);
        for (int iu = 0; iu < n_u_nodes; ++iu) {
            const double u = u_range.lo + iu * u_range.length() / (n_u_nodes - 1);
            const double d = a(t, u) - b(t, u);
            total += tw[it] * uw[iu] * d * d;
        }
    }
    return total;
}

/// 1-D slice version of the same metric at a fixed quantile level.
inline double ise_slice(const SurfaceFn& a, const SurfaceFn& b, Interval t_range, double u,
                        int n_t_nodes = 201) {
    Vector tw(n_t_nodes);
    const double h = t_range.length() / (n_t_nodes - 1);
    tw.setConstant(h);
    tw[0] = tw[n_t_nodes - 1] = 0.5 * h;
    double total = 0.0;
    for (int it = 0; it < n_t_nodes; ++it) {
        const double t = t_range.lo + it * h;
        const double d = a(t, u) - b(t, u);
        total += tw[it] * d * d;
    }
    return total;
}

/// Null-region confusion at grid nodes: TPR = share of true-null nodes
/// estimated null, FPR = share of true-non-null nodes estimated null.
struct Confusion {
    double tpr = 0.0;
    double fpr = 0.0;
};

inline Confusion sparsity_confusion(const SurfaceFn& beta_hat, const SurfaceFn& beta_true,
                                    Interval t_range, Interval u_range, double tol = -1.0,
                                    int n_t_nodes = 101, int n_u_nodes = 41) {
    double max_true = 0.0;
    std::vector<double> hat(static_cast<std::size_t>(n_t_nodes) * n_u_nodes);
    std::vector<double> tru(hat.size());
    std::size_t idx = 0;
    for (int it = 0; it < n_t_nodes; ++it) {
        const double t = t_range.lo + it * t_range.length() / (n_t_nodes - 1);
        for (int iu = 0; iu < n_u_nodes; ++iu, ++idx) {
            const double u = u_range.lo + iu * u_range.length() / (n_u_nodes - 1);
            hat[idx] = beta_hat(t, u);
            tru[idx] = beta_true(t, u);
            max_true = std::max(max_true, std::abs(tru[idx]));
        }
    }
    if (tol <= 0.0) tol = 1e-3 * max_true;
    LSFQR_REQUIRE(InvalidArgument, tol > 0.0, "need a positive null tolerance");
    long null_null = 0, null_total = 0, notnull_null = 0, notnull_total = 0;
    for (std::size_t i = 0; i < hat.size(); ++i) {
        const bool est_null = std::abs(hat[i]) <= tol;
        if (std::abs(tru[i]) <= tol) {
            ++null_total;
            if (est_null) ++null_null;
        } else {
            ++notnull_total;
            if (est_null) ++notnull_null;
        }
    }
    Confusion c;
    c.tpr = null_total ? static_cast<double>(null_null) / null_total : 1.0;
    c.fpr = notnull_total ? static_cast<double>(notnull_null) / notnull_total : 0.0;
    return c;
}

/// Per-replicate recovery metrics.
struct RecoveryReport {
    std::uint64_t seed = 0;
    double ise = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
    Vector per_quantile_ise;
    int resampled = 0;
    int active_triangles = -1;
};

}  // namespace lsfqr
