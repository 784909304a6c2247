#include "lsfqr/prox.hpp"
#include "lsfqr/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

using namespace lsfqr;

namespace {

// 1-D numeric prox oracle: coarse grid then golden-section refinement of
// tau*rho_u(x) + (x - v)^2 / 2
double prox_check_oracle(double v, double u, double tau) {
    auto f = [&](double x) { return tau * check_loss(x, u) + 0.5 * (x - v) * (x - v); };
    double lo = -std::abs(v) - 2.0 * tau - 1.0, hi = std::abs(v) + 2.0 * tau + 1.0;
    double best = lo, bestf = f(lo);
    for (int i = 0; i <= 4000; ++i) {
        const double x = lo + (hi - lo) * i / 4000.0;
        if (f(x) < bestf) {
            bestf = f(x);
            best = x;
        }
    }
    double a = best - (hi - lo) / 4000.0, b = best + (hi - lo) / 4000.0;
    for (int it = 0; it < 200; ++it) {
        const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        if (f(m1) < f(m2)) b = m2;
        else a = m1;
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("check loss closed forms") {
    REQUIRE(check_loss(-2.0, 0.5) == 1.0);
    REQUIRE(check_loss(0.0, 0.5) == 0.0);
    REQUIRE(check_loss(3.0, 0.5) == 1.5);
    REQUIRE_THAT(check_loss(-1.0, 0.9), Catch::Matchers::WithinAbs(0.1, 1e-15));
    REQUIRE_THAT(check_loss(1.0, 0.9), Catch::Matchers::WithinAbs(0.9, 1e-15));
    REQUIRE_THROWS_AS(check_loss(1.0, 0.0), InvalidArgument);
    REQUIRE_THROWS_AS(check_loss(1.0, 1.0), InvalidArgument);
}

TEST_CASE("check loss is nonnegative and convex") {
    Rng rng(1);
    for (int rep = 0; rep < 200; ++rep) {
        const double u = rng.uniform(0.05, 0.95);
        const double a = 4.0 * rng.normal(), b = 4.0 * rng.normal();
        REQUIRE(check_loss(a, u) >= 0.0);
        const double mid = check_loss(0.5 * (a + b), u);
        REQUIRE(mid <= 0.5 * (check_loss(a, u) + check_loss(b, u)) + 1e-12);
    }
}

TEST_CASE("minimizing the summed check loss recovers the sample quantile") {
    Rng rng(77);
    for (double u : {0.25, 0.5, 0.9}) {
        std::vector<double> ys(51);
        for (auto& v : ys) v = rng.normal();
        auto total = [&](double c) {
            double s = 0.0;
            for (double v : ys) s += check_loss(v - c, u);
            return s;
        };
        // grid-search oracle over a fine range
        double best = 0.0, bestf = total(0.0);
        for (int i = 0; i <= 20000; ++i) {
            const double c = -4.0 + 8.0 * i / 20000.0;
            if (total(c) < bestf) {
                bestf = total(c);
                best = c;
            }
        }
        // sample u-quantile: k-th order statistic, k = ceil(n u)
        std::vector<double> sorted = ys;
        std::sort(sorted.begin(), sorted.end());
        const double quant = sorted[static_cast<std::size_t>(std::ceil(51 * u)) - 1];
        REQUIRE_THAT(best, Catch::Matchers::WithinAbs(quant, 1e-3));
    }
}

TEST_CASE("prox_check closed forms") {
    REQUIRE(prox_check(0.0, 0.3, 1.0) == 0.0);
    REQUIRE(prox_check(0.0, 0.9, 5.0) == 0.0);
    REQUIRE_THAT(prox_check(3.0, 0.5, 2.0), Catch::Matchers::WithinAbs(2.0, 1e-15));
    REQUIRE(prox_check(-0.05, 0.9, 1.0) == 0.0);  // inside the kink interval
}

TEST_CASE("prox_check agrees with the numeric oracle") {
    Rng rng(12345);
    for (int rep = 0; rep < 300; ++rep) {
        const double v = 6.0 * rng.normal();
        const double u = rng.uniform(0.02, 0.98);
        const double tau = std::exp(rng.uniform(-3.0, 1.5));
        const double got = prox_check(v, u, tau);
        const double want = prox_check_oracle(v, u, tau);
        REQUIRE_THAT(got, Catch::Matchers::WithinAbs(want, 1e-6));
    }
}

TEST_CASE("prox_group closed forms") {
    Vector v(2);
    v << 3.0, 4.0;
    SECTION("zero threshold is the identity") {
        REQUIRE((prox_group(v, 0.0) - v).norm() == 0.0);
    }
    SECTION("small vectors collapse to zero") {
        REQUIRE(prox_group(v, 5.0).norm() == 0.0);
        REQUIRE(prox_group(v, 5.5).norm() == 0.0);
    }
    SECTION("euclidean shrinkage") {
        Vector got = prox_group(v, 2.5);
        REQUIRE_THAT(got[0], Catch::Matchers::WithinAbs(1.5, 1e-14));
        REQUIRE_THAT(got[1], Catch::Matchers::WithinAbs(2.0, 1e-14));
    }
    SECTION("negative threshold rejected") {
        REQUIRE_THROWS_AS(prox_group(v, -1.0), InvalidArgument);
    }
    SECTION("non-positive metric rejected") {
        Matrix M(2, 2);
        M << 1.0, 0.0, 0.0, -1.0;
        Vector w(2);
        w << 0.0, 1.0;
        REQUIRE_THROWS_AS(prox_group(w, 1.0, &M), InvalidArgument);
    }
}

TEST_CASE("metric prox_group agrees with a 2-D numeric oracle") {
    Rng rng(999);
    for (int rep = 0; rep < 60; ++rep) {
        Matrix C(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) C(i, j) = rng.normal();
        Matrix M = C.transpose() * C + 0.3 * Matrix::Identity(2, 2);
        Vector v(2);
        v << 3.0 * rng.normal(), 3.0 * rng.normal();
        const double kappa = std::exp(rng.uniform(-2.0, 1.0));

        auto f = [&](double z0, double z1) {
            Vector z(2);
            z << z0, z1;
            Vector d = z - v;
            return kappa * std::sqrt(z.dot(M * z)) + 0.5 * d.dot(M * d);
        };
        // coarse grid then two refinements around the best cell
        double cx = 0.0, cy = 0.0, span = std::abs(v[0]) + std::abs(v[1]) + 1.0;
        double bx = 0, by = 0, bf = f(0, 0);
        for (int refine = 0; refine < 5; ++refine) {
            for (int i = -60; i <= 60; ++i) {
                for (int j = -60; j <= 60; ++j) {
                    const double x = cx + span * i / 60.0, y = cy + span * j / 60.0;
                    if (f(x, y) < bf) {
                        bf = f(x, y);
                        bx = x;
                        by = y;
                    }
                }
            }
            cx = bx;
            cy = by;
            span /= 30.0;
        }
        Vector got = prox_group(v, kappa, &M);
        REQUIRE_THAT(got[0], Catch::Matchers::WithinAbs(bx, 1e-6));
        REQUIRE_THAT(got[1], Catch::Matchers::WithinAbs(by, 1e-6));
    }
}
