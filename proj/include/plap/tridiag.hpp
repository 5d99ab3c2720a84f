#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace plap {

/// Square tridiagonal matrix over the interior unknowns. Row r couples to
/// r-1 through sub[r] and to r+1 through sup[r]; sub[0] and sup[m-1] are
/// stored but ignored.
struct TridiagonalOperator {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> sup;

    TridiagonalOperator() = default;
    explicit TridiagonalOperator(std::size_t m) : sub(m, 0.0), diag(m, 0.0), sup(m, 0.0) {}

    std::size_t size() const noexcept { return diag.size(); }

    /// y = A x
    std::vector<double> apply(std::span<const double> x) const;

    /// LAPACK dgtsv (partial pivoting); stable for the indefinite Jacobians
    /// met near the logistic solution. Throws DegenerateJacobian on an exactly
    /// singular pivot.
    std::vector<double> solve(std::span<const double> rhs) const;

    /// True when every row satisfies |diag| >= |sub| + |sup|.
    bool diagonally_dominant() const;
};

}  // namespace plap
