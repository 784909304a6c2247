#include "lsfqr/quadrature.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace lsfqr;

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// integral of b1^i b2^j b3^k over a triangle of unit area:
// 2 * i! j! k! / (i+j+k+2)!
double monomial_integral(int i, int j, int k) {
    return 2.0 * factorial(i) * factorial(j) * factorial(k) / factorial(i + j + k + 2);
}

}  // namespace

TEST_CASE("weights sum to one for every tabulated degree") {
    for (int deg = 1; deg <= 20; ++deg) {
        const auto rule = triangle_rule(deg);
        double sum = 0.0;
        for (double w : rule.weights) sum += w;
        INFO("degree " << deg);
        REQUIRE_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("rules integrate barycentric monomials exactly up to their degree") {
    for (int deg = 1; deg <= 20; ++deg) {
        const auto rule = triangle_rule(deg);
        for (int total = 0; total <= deg; ++total) {
            for (int i = total; i >= 0; --i) {
                for (int j = total - i; j >= 0; --j) {
                    const int k = total - i - j;
                    double approx = 0.0;
                    for (std::size_t p = 0; p < rule.points.size(); ++p) {
                        const auto& b = rule.points[p];
                        approx += rule.weights[p] * std::pow(b[0], i) * std::pow(b[1], j) *
                                  std::pow(b[2], k);
                    }
                    INFO("degree " << deg << " monomial (" << i << "," << j << "," << k << ")");
                    REQUIRE_THAT(approx,
                                 Catch::Matchers::WithinAbs(monomial_integral(i, j, k), 1e-12));
                }
            }
        }
    }
}

TEST_CASE("unsupported degrees are rejected") {
    REQUIRE_THROWS_AS(triangle_rule(21), InvalidArgument);
    REQUIRE_THROWS_AS(triangle_rule(-1), InvalidArgument);
}
