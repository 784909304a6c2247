#pragma once

#include "lsfqr/common.hpp"
#include "lsfqr/csv.hpp"

#include <string>
#include <vector>

namespace lsfqr {

/// n curves sampled on a shared strictly-increasing t-grid, a scalar design
/// with a leading intercept column, and the responses.
struct FunctionalDataset {
    Vector t_grid;  // m sampling times
    Matrix X;       // n x m curve samples
    Matrix Z;       // n x (p+1), column 0 is the intercept
    Vector y;       // n responses

    Index n() const { return X.rows(); }
    Index m() const { return X.cols(); }
    Index p() const { return Z.cols() - 1; }
};

/// Uniformly spaced quantile levels inside (0,1).
struct QuantileGrid {
    Vector levels;
    Interval range;
    Index size() const { return levels.size(); }
};

inline QuantileGrid make_quantile_grid(int count, Interval u_range) {
    LSFQR_REQUIRE(InvalidArgument, count >= 1, "need at least one quantile level");
    LSFQR_REQUIRE(InvalidArgument,
                  u_range.lo > 0.0 && u_range.hi < 1.0 && u_range.hi >= u_range.lo,
                  "quantile range must lie inside (0,1)");
    QuantileGrid grid;
    grid.range = u_range;
    grid.levels.resize(count);
    if (count == 1) {
        grid.levels[0] = 0.5 * (u_range.lo + u_range.hi);
    } else {
        LSFQR_REQUIRE(InvalidArgument, u_range.hi > u_range.lo,
                      "degenerate range needs count == 1");
        for (int r = 0; r < count; ++r)
            grid.levels[r] = u_range.lo + r * (u_range.hi - u_range.lo) / (count - 1);
    }
    return grid;
}

/// Loads the three CSV inputs. Curves: header row of t-grid values then one
/// row per subject. Scalars: one row per subject (empty path -> intercept
/// only). Response: one column.
inline FunctionalDataset load_dataset(const std::string& curves_path,
                                      const std::string& scalars_path,
                                      const std::string& response_path) {
    FunctionalDataset ds;

    const auto curves = csv::read_table(curves_path);
    LSFQR_REQUIRE(DataError, curves.size() >= 2,
                  curves_path + ": need a t-grid header row and at least one curve row");
    const std::size_t m = curves.front().size();
    LSFQR_REQUIRE(DataError, m >= 2, curves_path + ": need at least two grid points");
    ds.t_grid.resize(static_cast<Index>(m));
    for (std::size_t j = 0; j < m; ++j) ds.t_grid[static_cast<Index>(j)] = curves[0][j];
    for (std::size_t j = 1; j < m; ++j)
        LSFQR_REQUIRE(DataError, curves[0][j] > curves[0][j - 1],
                      curves_path + ": t-grid must be strictly increasing");
    const std::size_t n = curves.size() - 1;
    ds.X.resize(static_cast<Index>(n), static_cast<Index>(m));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            ds.X(static_cast<Index>(i), static_cast<Index>(j)) = curves[i + 1][j];

    std::size_t p = 0;
    std::vector<std::vector<double>> scalars;
    if (!scalars_path.empty()) {
        scalars = csv::read_table(scalars_path);
        LSFQR_REQUIRE(DataError, scalars.size() == n,
                      scalars_path + ": " + std::to_string(scalars.size()) +
                          " rows do not match " + std::to_string(n) + " curves");
        p = scalars.front().size();
    }
    ds.Z.resize(static_cast<Index>(n), static_cast<Index>(p + 1));
    ds.Z.col(0).setOnes();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < p; ++k)
            ds.Z(static_cast<Index>(i), static_cast<Index>(k + 1)) = scalars[i][k];

    const auto resp = csv::read_table(response_path);
    LSFQR_REQUIRE(DataError, resp.size() == n,
                  response_path + ": " + std::to_string(resp.size()) +
                      " rows do not match " + std::to_string(n) + " curves");
    LSFQR_REQUIRE(DataError, resp.front().size() == 1,
                  response_path + ": expected a single column");
    ds.y.resize(static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i) ds.y[static_cast<Index>(i)] = resp[i][0];

    return ds;
}

/// Writes a dataset back out in load_dataset's schema.
inline void save_dataset(const FunctionalDataset& ds, const std::string& curves_path,
                         const std::string& scalars_path, const std::string& response_path) {
    {
        csv::Writer w(curves_path);
        std::string line;
        for (Index j = 0; j < ds.t_grid.size(); ++j) {
            if (j) line += ",";
            line += csv::format(ds.t_grid[j]);
        }
        w.raw_row(line);
        for (Index i = 0; i < ds.X.rows(); ++i) {
            line.clear();
            for (Index j = 0; j < ds.X.cols(); ++j) {
                if (j) line += ",";
                line += csv::format(ds.X(i, j));
            }
            w.raw_row(line);
        }
    }
    if (!scalars_path.empty() && ds.Z.cols() > 1)
        csv::write_matrix(scalars_path, ds.Z.rightCols(ds.Z.cols() - 1));
    csv::write_vector(response_path, ds.y);
}

}  // namespace lsfqr
