#include "plap/tridiag.hpp"

#include "plap/errors.hpp"

#include <cmath>
#include <string>

extern "C" void dgtsv_(const int* n, const int* nrhs, double* dl, double* d, double* du, double* b,
                       const int* ldb, int* info);

namespace plap {

std::vector<double> TridiagonalOperator::apply(std::span<const double> x) const {
    const std::size_t m = size();
    std::vector<double> y(m);
    for (std::size_t r = 0; r < m; ++r) {
        double acc = diag[r] * x[r];
        if (r > 0) acc += sub[r] * x[r - 1];
        if (r + 1 < m) acc += sup[r] * x[r + 1];
        y[r] = acc;
    }
    return y;
}

std::vector<double> TridiagonalOperator::solve(std::span<const double> rhs) const {
    const std::size_t m = size();
    std::vector<double> b(rhs.begin(), rhs.end());
    if (m == 0) return b;
    std::vector<double> d(diag);
    std::vector<double> du(sup.begin(), sup.end() - 1);
    std::vector<double> dl(sub.begin() + 1, sub.end());
    int n = static_cast<int>(m), nrhs = 1, ldb = n, info = 0;
    dgtsv_(&n, &nrhs, dl.data(), d.data(), du.data(), b.data(), &ldb, &info);
    if (info != 0) throw DegenerateJacobian("singular tridiagonal system (pivot " + std::to_string(info) + ")");
    for (double v : b)
        if (!std::isfinite(v)) throw DegenerateJacobian("non-finite solution of tridiagonal system");
    return b;
}

bool TridiagonalOperator::diagonally_dominant() const {
    const std::size_t m = size();
    for (std::size_t r = 0; r < m; ++r) {
        double off = 0.0;
        if (r > 0) off += std::abs(sub[r]);
        if (r + 1 < m) off += std::abs(sup[r]);
        if (std::abs(diag[r]) < off) return false;
    }
    return true;
}

}  // namespace plap
