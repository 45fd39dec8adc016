#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "gcons/graph.hpp"

namespace gcons {

/// Absolute tolerance for eigenvalue comparisons; Laplacian entries live in
/// [-1, 1] so an absolute scale is adequate.
inline constexpr double kEigTolerance = 1e-9;

/// L = I - A with the random-walk weights (row sums of A equal 1).
/// Requires every degree >= 1.
Eigen::MatrixXd random_walk_laplacian(const Graph& g);

/// L_sym = D^{1/2} L D^{-1/2} = I - D^{-1/2} A_unw D^{-1/2}; similar to L,
/// hence the same spectrum, but symmetric.
Eigen::MatrixXd symmetric_laplacian(const Graph& g);

/// Ascending eigenvalues of a symmetric matrix. Throws std::invalid_argument
/// if M deviates from symmetry by more than 1e-10.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& M);

struct EigenDecomposition {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns match values
};
EigenDecomposition symmetric_eigen(const Eigen::MatrixXd& M);

struct SpectralSummary {
    Eigen::VectorXd eigenvalues;  // ascending
    double lambda2 = 0.0;         // algebraic connectivity
    double lambdaN = 0.0;         // spectral radius
    double eigenratio = 0.0;      // lambda2 / lambdaN
    bool disconnected = false;

    bool meets(double c_prime) const { return lambda2 >= c_prime; }
};
SpectralSummary spectral_summary(const Graph& g);

/// Spectrum of the grounded Laplacian: rows/columns of the grounded set
/// removed from L_sym. All eigenvalues are strictly positive for a connected
/// graph.
struct GroundedSpectrum {
    std::vector<int> grounded;    // sorted node ids
    std::vector<int> kept;        // row index -> node id
    Eigen::VectorXd eigenvalues;  // ascending, size N - m

    double lambda1() const { return eigenvalues(0); }
    double radius() const { return eigenvalues(eigenvalues.size() - 1); }
    double eigenratio() const { return lambda1() / radius(); }
};
GroundedSpectrum grounded_laplacian(const Graph& g, std::vector<int> grounded);

/// The grounded symmetric Laplacian matrix itself (no eigensolve).
Eigen::MatrixXd grounded_symmetric_laplacian(const Graph& g, const std::vector<int>& grounded);

/// Zeroing row/column j of L_bar introduces a structural zero eigenvalue; the
/// remaining spectrum equals that of L_bar with row/column j removed.
struct DoubleGroundedSpectrum {
    int first = 0;
    int second = 0;
    Eigen::VectorXd eigenvalues;  // ascending, {0} followed by the nonzero part

    double lambda1() const { return eigenvalues(1); }  // smallest nonzero
    double radius() const { return eigenvalues(eigenvalues.size() - 1); }
    double eigenratio() const { return lambda1() / radius(); }
};
DoubleGroundedSpectrum double_grounded_laplacian(const Graph& g, int first, int j);

/// Upper bound m*d_max / ((n-m)*d_min) on the grounded algebraic
/// connectivity; with m == 1 and the grounded node's degree known, the
/// stricter d_1 / ((n-1)*d_min).
double grounded_connectivity_bound(int n, int d_max, int d_min, int m,
                                   std::optional<int> d_grounded = std::nullopt);

struct ThresholdSizes {
    double n_bar;    // above this size, lambda2 > grounded lambda1
    double n_tilde;  // above this size, eigenratio > grounded eigenratio
};
ThresholdSizes threshold_sizes(double c_prime, int d_max, int d_min);

}  // namespace gcons
