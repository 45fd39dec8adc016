#pragma once

// Test-only eigenvalue oracle, independent of the library's solver. It
// locates characteristic-polynomial roots by bisection on the classical
// Sturm count: the pivot signs of Gaussian elimination on M - shift*I are
// the sign variations of the leading principal minors, i.e. of the
// characteristic polynomials of the nested submatrices, so the number of
// negative pivots equals the number of roots below the shift. This stays
// accurate for repeated roots, where direct polynomial evaluation loses
// half the digits per multiplicity.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

// Number of eigenvalues of the symmetric matrix M strictly below `shift`.
// Tiny pivots are floored in magnitude with their sign kept (the usual
// bisection-eigensolver safeguard): the count then belongs to a matrix
// perturbed by ~1e-10, which is far below the bisection tolerance.
inline int count_below(const Eigen::MatrixXd& M, double shift) {
    const int n = static_cast<int>(M.rows());
    Eigen::MatrixXd T = M - shift * Eigen::MatrixXd::Identity(n, n);
    int negs = 0;
    for (int k = 0; k < n; ++k) {
        double pivot = T(k, k);
        if (std::abs(pivot) < 1e-10) pivot = pivot < 0.0 ? -1e-10 : 1e-10;
        if (pivot < 0.0) ++negs;
        for (int i = k + 1; i < n; ++i) {
            double f = T(i, k) / pivot;
            for (int j = k; j < n; ++j) T(i, j) -= f * T(k, j);
        }
    }
    return negs;
}

inline std::pair<double, double> gershgorin_bounds(const Eigen::MatrixXd& M) {
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < M.rows(); ++i) {
        double radius = 0.0;
        for (int j = 0; j < M.cols(); ++j)
            if (j != i) radius += std::abs(M(i, j));
        lo = std::min(lo, M(i, i) - radius);
        hi = std::max(hi, M(i, i) + radius);
    }
    return {lo - 1.0, hi + 1.0};
}

// k-th smallest eigenvalue (0-based): the infimum of shifts with at least
// k+1 roots below.
inline double kth_eigenvalue(const Eigen::MatrixXd& M, int k) {
    auto [lo, hi] = gershgorin_bounds(M);
    for (int it = 0; it < 120; ++it) {
        double mid = 0.5 * (lo + hi);
        if (count_below(M, mid) >= k + 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Full ascending spectrum, multiplicities included.
inline std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& M) {
    std::vector<double> out;
    for (int k = 0; k < M.rows(); ++k) out.push_back(kth_eigenvalue(M, k));
    return out;
}

inline double smallest_eigenvalue(const Eigen::MatrixXd& M) { return kth_eigenvalue(M, 0); }

}  // namespace oracle
