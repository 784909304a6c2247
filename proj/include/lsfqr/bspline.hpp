#pragma once

#include "lsfqr/common.hpp"

#include <algorithm>
#include <vector>

namespace lsfqr {

/// Univariate B-spline basis of a given order (degree + 1) on [lo, hi] with
/// uniform interior knots and order-fold boundary knots. Nonnegative,
/// partition of unity; evaluation by the de Boor triangular scheme.
class BSplineBasis {
public:
    BSplineBasis(Interval range, int n_basis, int order)
        : range_(range), n_basis_(n_basis), order_(order) {
        LSFQR_REQUIRE(InvalidArgument, order >= 1, "order must be >= 1");
        LSFQR_REQUIRE(InvalidArgument, n_basis >= order,
                      "need at least `order` basis functions");
        LSFQR_REQUIRE(InvalidArgument, range.length() > 0.0, "empty range");
        const int n_interior = n_basis - order;
        knots_.reserve(n_basis + order);
        for (int i = 0; i < order; ++i) knots_.push_back(range.lo);
        for (int j = 1; j <= n_interior; ++j)
            knots_.push_back(range.lo + j * range.length() / (n_interior + 1));
        for (int i = 0; i < order; ++i) knots_.push_back(range.hi);
    }

    int size() const { return n_basis_; }
    int order() const { return order_; }
    Interval range() const { return range_; }
    const std::vector<double>& knots() const { return knots_; }

    /// Dense row of all n_basis values at u.
    Vector row(double u) const {
        LSFQR_REQUIRE(InvalidArgument, range_.contains(u, 1e-12),
                      "evaluation point outside the basis range");
        Vector out = Vector::Zero(n_basis_);
        const int span = find_span(u);
        const auto local = local_values(span, u);
        for (int r = 0; r < order_; ++r) out[span - order_ + 1 + r] = local[r];
        return out;
    }

private:
    // knot index i with knots[i] <= u < knots[i+1]; the hi endpoint maps to
    // the last nonempty span so the basis is right-continuous at hi.
    int find_span(double u) const {
        if (u >= range_.hi) return n_basis_ - 1;
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
        int span = static_cast<int>(it - knots_.begin()) - 1;
        return std::clamp(span, order_ - 1, n_basis_ - 1);
    }

    // the order nonzero values N_{span-order+1..span} at u
    std::vector<double> local_values(int span, double u) const {
        std::vector<double> vals(order_, 0.0);
        std::vector<double> left(order_, 0.0), right(order_, 0.0);
        vals[0] = 1.0;
        for (int j = 1; j < order_; ++j) {
            left[j] = u - knots_[span + 1 - j];
            right[j] = knots_[span + j] - u;
            double saved = 0.0;
            for (int r = 0; r < j; ++r) {
                const double tmp = vals[r] / (right[r + 1] + left[j - r]);
                vals[r] = saved + right[r + 1] * tmp;
                saved = left[j - r] * tmp;
            }
            vals[j] = saved;
        }
        return vals;
    }

    Interval range_;
    int n_basis_;
    int order_;
    std::vector<double> knots_;
};

}  // namespace lsfqr
