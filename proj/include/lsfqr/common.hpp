#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lsfqr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using RowSparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;
using Index = Eigen::Index;

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double length() const { return hi - lo; }
    bool contains(double x, double tol = 0.0) const {
        return x >= lo - tol && x <= hi + tol;
    }
};

// Error hierarchy mapped to CLI exit codes: config=2, data=3, solver=4.
class Error : public std::runtime_error {
public:
    Error(std::string msg, const char* file, int line)
        : std::runtime_error(std::string(file) + ":" + std::to_string(line) + ": " + msg) {}
};

class ConfigError : public Error {
    using Error::Error;
};
class DataError : public Error {
    using Error::Error;
};
class SolverError : public Error {
    using Error::Error;
};
class InvalidArgument : public Error {
    using Error::Error;
};
class OutOfDomain : public Error {
    using Error::Error;
};

#define LSFQR_THROW(kind, msg) throw ::lsfqr::kind((msg), __FILE__, __LINE__)
#define LSFQR_REQUIRE(kind, cond, msg) \
    do {                               \
        if (!(cond)) LSFQR_THROW(kind, msg); \
    } while (0)

}  // namespace lsfqr
