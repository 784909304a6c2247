#include "lsfqr/design.hpp"
#include "lsfqr/rng.hpp"
#include "support/bspline_oracle.hpp"
#include "support/spline_fit.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace lsfqr;

namespace {

FunctionalDataset make_dataset(int n, int m, Rng& rng, double T = 1.0) {
    FunctionalDataset ds;
    ds.t_grid.resize(m);
    for (int j = 0; j < m; ++j) ds.t_grid[j] = T * j / (m - 1);
    ds.X.resize(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) ds.X(i, j) = rng.normal();
    ds.Z.resize(n, 2);
    ds.Z.col(0).setOnes();
    for (int i = 0; i < n; ++i) ds.Z(i, 1) = rng.normal();
    ds.y.resize(n);
    for (int i = 0; i < n; ++i) ds.y[i] = rng.normal();
    return ds;
}

std::string write_temp(const std::string& name, const std::string& content) {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "lsfqr_design_test";
    fs::create_directories(dir);
    const auto path = (dir / name).string();
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("quantile grid construction") {
    auto grid = make_quantile_grid(19, {0.05, 0.95});
    REQUIRE(grid.size() == 19);
    REQUIRE_THAT(grid.levels[0], Catch::Matchers::WithinAbs(0.05, 1e-15));
    REQUIRE_THAT(grid.levels[18], Catch::Matchers::WithinAbs(0.95, 1e-15));
    REQUIRE_THAT(grid.levels[1] - grid.levels[0], Catch::Matchers::WithinAbs(0.05, 1e-12));
    for (Index r = 1; r < grid.size(); ++r) REQUIRE(grid.levels[r] > grid.levels[r - 1]);

    auto single = make_quantile_grid(1, {0.5, 0.5});
    REQUIRE_THAT(single.levels[0], Catch::Matchers::WithinAbs(0.5, 1e-15));

    REQUIRE_THROWS_AS(make_quantile_grid(0, {0.1, 0.9}), InvalidArgument);
    REQUIRE_THROWS_AS(make_quantile_grid(5, {0.0, 0.9}), InvalidArgument);
    REQUIRE_THROWS_AS(make_quantile_grid(5, {0.2, 1.0}), InvalidArgument);
}

TEST_CASE("load_dataset shapes and validation") {
    const auto curves =
        write_temp("curves.csv", "0,0.25,0.5,0.75,1\n1,2,3,4,5\n0,0,0,0,0\n-1,1,-1,1,-1\n");
    const auto scalars = write_temp("scalars.csv", "0.3\n-0.7\n2.2\n");
    const auto resp = write_temp("resp.csv", "1\n2\n3\n");

    auto ds = load_dataset(curves, scalars, resp);
    REQUIRE(ds.X.rows() == 3);
    REQUIRE(ds.X.cols() == 5);
    REQUIRE(ds.Z.rows() == 3);
    REQUIRE(ds.Z.cols() == 2);
    REQUIRE(ds.Z(1, 0) == 1.0);
    REQUIRE(ds.Z(1, 1) == -0.7);
    REQUIRE(ds.p() == 1);

    SECTION("intercept-only when scalars path is empty") {
        auto d2 = load_dataset(curves, "", resp);
        REQUIRE(d2.Z.cols() == 1);
        REQUIRE(d2.Z.col(0).isOnes());
    }
    SECTION("row-count mismatch") {
        const auto bad = write_temp("resp4.csv", "1\n2\n3\n4\n");
        REQUIRE_THROWS_AS(load_dataset(curves, scalars, bad), DataError);
    }
    SECTION("non-increasing t-grid") {
        const auto bad = write_temp("curves_bad.csv", "0,0.5,0.4\n1,2,3\n");
        REQUIRE_THROWS_AS(load_dataset(bad, "", write_temp("r1.csv", "1\n")), DataError);
    }
    SECTION("ragged rows") {
        const auto bad = write_temp("curves_ragged.csv", "0,0.5,1\n1,2\n");
        REQUIRE_THROWS_AS(load_dataset(bad, "", write_temp("r1.csv", "1\n")), DataError);
    }
    SECTION("non-numeric cells") {
        const auto bad = write_temp("curves_nan.csv", "0,0.5,1\n1,x,3\n");
        REQUIRE_THROWS_AS(load_dataset(bad, "", write_temp("r1.csv", "1\n")), DataError);
    }
}

TEST_CASE("dataset round-trips through save/load") {
    Rng rng(404);
    auto ds = make_dataset(5, 7, rng);
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "lsfqr_design_test";
    fs::create_directories(dir);
    const auto c = (dir / "rt_curves.csv").string();
    const auto s = (dir / "rt_scalars.csv").string();
    const auto r = (dir / "rt_resp.csv").string();
    save_dataset(ds, c, s, r);
    auto back = load_dataset(c, s, r);
    REQUIRE((back.X - ds.X).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((back.Z - ds.Z).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((back.y - ds.y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("piecewise-constant B-splines are span indicators") {
    BSplineBasis b({0.0, 1.0}, 4, 1);
    Vector v = b.row(0.3);  // 2nd knot span [0.25, 0.5)
    REQUIRE(v.size() == 4);
    REQUIRE(v[0] == 0.0);
    REQUIRE(v[1] == 1.0);
    REQUIRE(v[2] == 0.0);
    REQUIRE(v[3] == 0.0);
}

TEST_CASE("B-spline partition of unity and nonnegativity") {
    BSplineBasis b({0.05, 0.95}, 8, 4);
    Rng rng(17);
    for (int rep = 0; rep < 200; ++rep) {
        const double u = rng.uniform(0.05, 0.95);
        Vector v = b.row(u);
        REQUIRE(v.minCoeff() >= 0.0);
        REQUIRE_THAT(v.sum(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
    REQUIRE_THAT(b.row(0.05).sum(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(b.row(0.95).sum(), Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("B-spline values match the naive recursion oracle") {
    for (int order : {1, 2, 3, 4}) {
        BSplineBasis b({0.1, 0.9}, 8, order);
        Rng rng(1000 + order);
        for (int rep = 0; rep < 500; ++rep) {
            const double u = rng.uniform(0.1, 0.9);
            Vector v = b.row(u);
            for (int i = 0; i < b.size(); ++i) {
                const double oracle = testing::cox_de_boor(b.knots(), i, order, u, 0.9);
                REQUIRE_THAT(v[i], Catch::Matchers::WithinAbs(oracle, 1e-12));
            }
        }
        // right endpoint
        Vector v = b.row(0.9);
        for (int i = 0; i < b.size(); ++i)
            REQUIRE_THAT(v[i], Catch::Matchers::WithinAbs(
                                   testing::cox_de_boor(b.knots(), i, order, 0.9, 0.9), 1e-12));
    }
}

TEST_CASE("B-spline configuration errors") {
    REQUIRE_THROWS_AS(BSplineBasis({0.0, 1.0}, 3, 4), InvalidArgument);
    REQUIRE_THROWS_AS(BSplineBasis({1.0, 0.0}, 4, 2), InvalidArgument);
}

TEST_CASE("assemble_A: partition of unity under the integral") {
    Rng rng(2);
    auto ds = make_dataset(4, 21, rng);
    ds.X.setOnes();
    auto tri = build_rect_triangulation({0.0, 1.0}, {0.05, 0.95}, 3, 2);
    BernsteinBasis basis(tri, 3, 1);
    for (double u : {0.05, 0.3, 0.5, 0.95}) {
        Matrix A = assemble_A(ds, basis, u);
        Vector sums = A * Vector::Ones(basis.size());
        for (Index i = 0; i < sums.size(); ++i)
            REQUIRE_THAT(sums[i], Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("assemble_A: zero curve gives a zero row") {
    Rng rng(3);
    auto ds = make_dataset(3, 11, rng);
    ds.X.row(1).setZero();
    auto tri = build_rect_triangulation({0.0, 1.0}, {0.1, 0.9}, 2, 2);
    BernsteinBasis basis(tri, 2, 1);
    Matrix A = assemble_A(ds, basis, 0.4);
    REQUIRE(A.row(1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("assemble_A: x = t against s = t integrates to 1/3") {
    Rng rng(4);
    auto ds = make_dataset(1, 101, rng);
    for (Index j = 0; j < ds.t_grid.size(); ++j) ds.X(0, j) = ds.t_grid[j];
    auto tri = build_rect_triangulation({0.0, 1.0}, {0.05, 0.95}, 4, 2);
    BernsteinBasis basis(tri, 3, 1);
    Vector gamma = testing::interpolate_coeffs(basis, [](double t, double) { return t; });
    Matrix A = assemble_A(ds, basis, 0.37, 8);
    REQUIRE_THAT(A.row(0).dot(gamma), Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-6));
}

TEST_CASE("assemble_A: structural sparsity") {
    Rng rng(5);
    auto ds = make_dataset(2, 31, rng);
    auto tri = build_rect_triangulation({0.0, 1.0}, {0.0, 1.0}, 4, 4);
    BernsteinBasis basis(tri, 2, 1);
    const double u = 0.6;  // strictly inside cell row 2
    Matrix A = assemble_A(ds, basis, u);
    int nonzero_cols = 0;
    for (Index j = 0; j < A.cols(); ++j)
        if (A.col(j).cwiseAbs().maxCoeff() > 0.0) ++nonzero_cols;
    // the line crosses 2 triangles per cell column
    REQUIRE(nonzero_cols <= basis.per_triangle() * 2 * tri.n_t());
}

TEST_CASE("assemble_A: refinement converges at second order") {
    Rng rng(6);
    auto ds = make_dataset(1, 41, rng);
    for (Index j = 0; j < ds.t_grid.size(); ++j)
        ds.X(0, j) = std::sin(6.28318530717958648 * ds.t_grid[j]);
    auto tri = build_rect_triangulation({0.0, 1.0}, {0.1, 0.9}, 3, 2);
    BernsteinBasis basis(tri, 3, 1);
    Matrix A1 = assemble_A(ds, basis, 0.47, 2);
    Matrix A2 = assemble_A(ds, basis, 0.47, 4);
    Matrix A3 = assemble_A(ds, basis, 0.47, 8);
    const double e12 = (A1 - A2).cwiseAbs().maxCoeff();
    const double e23 = (A2 - A3).cwiseAbs().maxCoeff();
    const double order = std::log2(e12 / e23);
    REQUIRE(order > 1.7);
    REQUIRE(order < 2.3);
}

TEST_CASE("assemble_A: out-of-range quantile is rejected") {
    Rng rng(7);
    auto ds = make_dataset(2, 11, rng);
    auto tri = build_rect_triangulation({0.0, 1.0}, {0.2, 0.8}, 2, 2);
    BernsteinBasis basis(tri, 2, 1);
    REQUIRE_THROWS_AS(assemble_A(ds, basis, 0.95), OutOfDomain);
}

TEST_CASE("assemble_design row structure") {
    Rng rng(8);
    auto ds = make_dataset(5, 21, rng);
    auto tri = build_rect_triangulation({0.0, 1.0}, {0.05, 0.95}, 2, 2);
    BernsteinBasis basis(tri, 2, 1);
    auto cs = make_constraint_system(basis);
    auto levels = make_quantile_grid(3, {0.05, 0.95});

    SECTION("scalar alpha block reduces to z_i") {
        // p = 1 covariate, n_b = 1, order 1: alpha block is exactly z_i
        BSplineBasis ab({0.05, 0.95}, 1, 1);
        auto bundle = assemble_design(ds, levels, basis, cs.Q, ab);
        REQUIRE(bundle.alpha_dim == 2);
        for (Index r = 0; r < 3; ++r)
            for (Index i = 0; i < 5; ++i) {
                REQUIRE(bundle.W(r * 5 + i, 0) == ds.Z(i, 0));
                REQUIRE(bundle.W(r * 5 + i, 1) == ds.Z(i, 1));
            }
    }
    SECTION("identity Q exposes raw A rows") {
        Matrix I = Matrix::Identity(basis.size(), basis.size());
        BSplineBasis ab({0.05, 0.95}, 4, 2);
        auto bundle = assemble_design(ds, levels, basis, I, ab);
        Matrix A0 = assemble_A(ds, basis, levels.levels[0]);
        REQUIRE((bundle.W.block(0, bundle.alpha_dim, 5, basis.size()) - A0)
                    .cwiseAbs()
                    .maxCoeff() < 1e-14);
    }
    SECTION("rows reproduce the componentwise inner product") {
        BSplineBasis ab({0.05, 0.95}, 4, 3);
        auto bundle = assemble_design(ds, levels, basis, cs.Q, ab);
        REQUIRE(bundle.W.cols() == bundle.alpha_dim + cs.Q.cols());
        Vector eta(bundle.alpha_dim), theta(cs.Q.cols());
        for (Index i = 0; i < eta.size(); ++i) eta[i] = rng.normal();
        for (Index i = 0; i < theta.size(); ++i) theta[i] = rng.normal();
        Vector coef(bundle.W.cols());
        coef << eta, theta;

        for (Index r = 0; r < 3; ++r) {
            Matrix A = assemble_A(ds, basis, levels.levels[r]);
            Vector b = ab.row(levels.levels[r]);
            for (Index i = 0; i < 5; ++i) {
                double direct = 0.0;
                for (Index k = 0; k < ds.Z.cols(); ++k)
                    direct += ds.Z(i, k) * b.dot(eta.segment(k * ab.size(), ab.size()));
                direct += (A.row(i) * cs.Q).dot(theta);
                REQUIRE_THAT(bundle.W.row(r * 5 + i).dot(coef),
                             Catch::Matchers::WithinAbs(direct, 1e-12));
            }
        }
        // responses and levels replicate r-major
        for (Index r = 0; r < 3; ++r)
            for (Index i = 0; i < 5; ++i) {
                REQUIRE(bundle.y[r * 5 + i] == ds.y[i]);
                REQUIRE(bundle.u_row[r * 5 + i] == levels.levels[r]);
            }
    }
}
