#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

namespace gcons {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DesignError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Single-input discrete-time agent model x(k+1) = A x(k) + B u(k).
/// Controllability of (A, B) is checked at construction.
class AgentDynamics {
public:
    AgentDynamics(Eigen::MatrixXd A, Eigen::VectorXd B);

    const Eigen::MatrixXd& A() const { return a_; }
    const Eigen::VectorXd& B() const { return b_; }
    int order() const { return static_cast<int>(a_.rows()); }

    /// Reciprocal product of the unstable eigenvalue magnitudes (sigma tilde).
    double sigma_tilde() const { return sigma_tilde_; }

private:
    Eigen::MatrixXd a_;
    Eigen::VectorXd b_;
    double sigma_tilde_;
};

/// sigma_tilde = 1 / prod |lambda| over eigenvalues with |lambda| > 1, or 1
/// when A is (marginally) stable. Eigenvalues on the unit circle do not count
/// as unstable.
double unstable_product(const Eigen::MatrixXd& A);

/// margin = sigma_tilde - (1 - rho) / (1 + rho); consensusable iff positive.
double consensusability_margin(double sigma_tilde, double rho);

struct MareOptions {
    double q = 0.1;          // identity shift defining the equality iterated on
    double tol = 1e-10;      // max-abs change between iterates
    int max_iterations = 100000;
};

struct MareSolution {
    Eigen::MatrixXd P;
    double margin = 0.0;    // smallest eigenvalue of the inequality left side
    int iterations = 0;
    double residual = 0.0;  // max-abs iterate change at the accepted P
};

/// Solves P = A'PA - (1 - sigma^2) A'PBB'PA / (B'PB + R) + qI by fixed-point
/// iteration from P = I. For unstable A with R > 0 the equality may have no
/// fixed point; the iteration then plateaus at an inequality witness before
/// slowly escaping, so the best iterate is kept and the returned P is always
/// verified to satisfy the strict inequality. Throws SolverError when no
/// positive-definite witness is found, std::invalid_argument when
/// sigma >= sigma_tilde.
MareSolution solve_mare(const AgentDynamics& dyn, double sigma, double R,
                        const MareOptions& options = {});

struct GainDesign {
    Eigen::RowVectorXd K;
    Eigen::MatrixXd P;
    double R = 0.0;
    double sigma = 0.0;
    double epsilon = 0.0;
    double c_prime = 0.0;
    double sigma_tilde = 1.0;
    double mari_margin = 0.0;
};

/// Scalable gain K = eps B'PA / (B'PB + R), valid for every graph whose
/// Laplacian eigenvalues lie in [c', 2]. Defaults: sigma at the lower quarter
/// of its window, eps at the midpoint of its window. The returned design is
/// verified Schur on a 1000-point grid of [c', 2].
GainDesign design_gain(const AgentDynamics& dyn, double c_prime, double R,
                       std::optional<double> sigma = std::nullopt,
                       std::optional<double> epsilon = std::nullopt);

/// Graph-specific baseline gain K = 2/(lambda2 + lambdaN) B'PA / (B'PB) that
/// needs the exact spectrum; used for comparison against design_gain.
GainDesign design_gain_eigen(const AgentDynamics& dyn, double lambda2, double lambdaN);

double spectral_radius(const Eigen::MatrixXd& M);
inline bool is_schur(const Eigen::MatrixXd& M) { return spectral_radius(M) < 1.0 - 1e-12; }

/// max over the supplied Laplacian eigenvalues of the spectral radius of
/// A - lambda B K. Pass exclude_zero = true for nongrounded consensus (the
/// zero eigenvalue rides the consensus subspace); false for grounded spectra.
double closed_loop_radius(const AgentDynamics& dyn, const Eigen::RowVectorXd& K,
                          const Eigen::VectorXd& laplacian_eigs, bool exclude_zero);

}  // namespace gcons
