#include "gcons/control.hpp"

#include <cmath>
#include <sstream>

namespace gcons {

namespace {

// Eigenvalues of a defective matrix carry O(sqrt(machine eps)) noise, so the
// unit-circle test needs more slack than usual.
constexpr double kUnstableTol = 1e-6;

Eigen::MatrixXd mari_left_side(const Eigen::MatrixXd& A, const Eigen::VectorXd& B,
                               const Eigen::MatrixXd& P, double sigma, double R) {
    Eigen::VectorXd PB = P * B;
    double denom = B.dot(PB) + R;
    Eigen::RowVectorXd BPA = PB.transpose() * A;
    return P - A.transpose() * P * A +
           (1.0 - sigma * sigma) * (BPA.transpose() * BPA) / denom;
}

}  // namespace

AgentDynamics::AgentDynamics(Eigen::MatrixXd A, Eigen::VectorXd B)
    : a_(std::move(A)), b_(std::move(B)) {
    if (a_.rows() != a_.cols()) throw std::invalid_argument("A must be square");
    if (b_.size() != a_.rows()) throw std::invalid_argument("B must be n x 1");
    const int n = static_cast<int>(a_.rows());
    Eigen::MatrixXd ctrb(n, n);
    Eigen::VectorXd col = b_;
    for (int k = 0; k < n; ++k) {
        ctrb.col(k) = col;
        col = a_ * col;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(ctrb);
    lu.setThreshold(1e-10);
    if (lu.rank() < n) throw std::invalid_argument("(A, B) is not controllable");
    sigma_tilde_ = unstable_product(a_);
}

double unstable_product(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("A must be square");
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    double prod = 1.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        double mag = std::abs(es.eigenvalues()(i));
        if (mag > 1.0 + kUnstableTol) prod *= mag;
    }
    return 1.0 / prod;
}

double consensusability_margin(double sigma_tilde, double rho) {
    if (rho <= 0.0 || rho > 1.0) throw std::invalid_argument("rho must lie in (0, 1]");
    if (sigma_tilde <= 0.0 || sigma_tilde > 1.0)
        throw std::invalid_argument("sigma_tilde must lie in (0, 1]");
    return sigma_tilde - (1.0 - rho) / (1.0 + rho);
}

MareSolution solve_mare(const AgentDynamics& dyn, double sigma, double R,
                        const MareOptions& options) {
    if (sigma < 0.0 || sigma >= dyn.sigma_tilde()) {
        std::ostringstream msg;
        msg << "sigma = " << sigma << " must lie in [0, sigma_tilde = " << dyn.sigma_tilde()
            << ")";
        throw std::invalid_argument(msg.str());
    }
    if (R < 0.0) throw std::invalid_argument("R must be nonnegative");

    const Eigen::MatrixXd& A = dyn.A();
    const Eigen::VectorXd& B = dyn.B();
    const int n = dyn.order();
    const double gamma = 1.0 - sigma * sigma;

    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd best_P = P;
    double best_d = std::numeric_limits<double>::infinity();
    int best_it = 0;
    double d = 0.0;
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        Eigen::VectorXd PB = P * B;
        double denom = B.dot(PB) + R;
        if (!(denom > 0.0)) break;  // P lost definiteness along B; rely on best iterate
        Eigen::RowVectorXd BPA = PB.transpose() * A;
        Eigen::MatrixXd next = A.transpose() * P * A - gamma * (BPA.transpose() * BPA) / denom +
                               options.q * Eigen::MatrixXd::Identity(n, n);
        if (!next.allFinite()) break;
        d = (next - P).cwiseAbs().maxCoeff();
        P = next;
        if (d < best_d) {
            best_d = d;
            best_P = P;
            best_it = it + 1;
        }
        if (d < options.tol) break;
        // Once the iterate departs a deep plateau the fixed point does not
        // exist; the plateau value is the inequality witness.
        if (it > 50 && d > 1e4 * std::max(best_d, 1e-300)) break;
    }

    best_P = ((best_P + best_P.transpose()) / 2.0).eval();
    MareSolution sol;
    sol.P = best_P;
    sol.iterations = best_it;
    sol.residual = best_d;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> margin_solver(
        mari_left_side(A, B, best_P, sigma, R));
    sol.margin = margin_solver.eigenvalues().minCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> p_solver(best_P);
    double p_min = p_solver.eigenvalues().minCoeff();
    if (!(sol.margin > 0.0) || !(p_min > 0.0)) {
        std::ostringstream msg;
        msg << "no positive-definite inequality witness found (sigma = " << sigma
            << ", R = " << R << ", margin = " << sol.margin << ", residual = " << best_d << ")";
        throw SolverError(msg.str());
    }
    return sol;
}

GainDesign design_gain(const AgentDynamics& dyn, double c_prime, double R,
                       std::optional<double> sigma, std::optional<double> epsilon) {
    const double sigma_tilde = dyn.sigma_tilde();
    const double c_low = 2.0 * (1.0 - sigma_tilde) / (1.0 + sigma_tilde);
    if (!(c_prime > c_low) || !(c_prime < 2.0)) {
        std::ostringstream msg;
        msg << "c' = " << c_prime << " violates the feasibility window (" << c_low << ", 2)";
        throw DesignError(msg.str());
    }

    const double sigma_low = (2.0 - c_prime) / (2.0 + c_prime);
    if (!(sigma_low < sigma_tilde))
        throw DesignError("empty sigma window: (2-c')/(2+c') >= sigma_tilde");
    // Default sits in the lower quarter of the window: close to sigma_tilde
    // the Riccati iteration loses its plateau.
    double sig = sigma ? *sigma : sigma_low + 0.25 * (sigma_tilde - sigma_low);
    if (sig < sigma_low - 1e-12 || sig >= sigma_tilde) {
        std::ostringstream msg;
        msg << "sigma = " << sig << " outside [" << sigma_low << ", " << sigma_tilde << ")";
        throw DesignError(msg.str());
    }

    const double eps_low = (1.0 - sig) / c_prime;
    const double eps_high = (1.0 + sig) / 2.0;
    double eps = epsilon ? *epsilon : 0.5 * (eps_low + eps_high);
    if (eps < eps_low - 1e-12 || eps > eps_high + 1e-12) {
        std::ostringstream msg;
        msg << "epsilon = " << eps << " outside [" << eps_low << ", " << eps_high << "]";
        throw DesignError(msg.str());
    }

    MareSolution mare = solve_mare(dyn, sig, R);
    const Eigen::MatrixXd& A = dyn.A();
    const Eigen::VectorXd& B = dyn.B();
    Eigen::VectorXd PB = mare.P * B;
    Eigen::RowVectorXd K = eps * (PB.transpose() * A) / (B.dot(PB) + R);

    GainDesign design{K, mare.P, R, sig, eps, c_prime, sigma_tilde, mare.margin};
    for (int i = 0; i < 1000; ++i) {
        double lam = c_prime + (2.0 - c_prime) * i / 999.0;
        if (!is_schur(A - lam * B * K)) {
            std::ostringstream msg;
            msg << "designed gain fails the Schur check at lambda = " << lam;
            throw DesignError(msg.str());
        }
    }
    return design;
}

GainDesign design_gain_eigen(const AgentDynamics& dyn, double lambda2, double lambdaN) {
    if (!(lambda2 > 0.0) || !(lambdaN >= lambda2))
        throw std::invalid_argument("need 0 < lambda2 <= lambdaN");
    const double rho = lambda2 / lambdaN;
    const double sigma_tilde = dyn.sigma_tilde();
    const double sigma_low = (1.0 - rho) / (1.0 + rho);
    if (!(consensusability_margin(sigma_tilde, rho) > 0.0)) {
        std::ostringstream msg;
        msg << "consensusability violated: (1-rho)/(1+rho) = " << sigma_low
            << " >= sigma_tilde = " << sigma_tilde;
        throw DesignError(msg.str());
    }
    double sig = sigma_low + 0.25 * (sigma_tilde - sigma_low);
    MareSolution mare = solve_mare(dyn, sig, 0.0);
    const Eigen::MatrixXd& A = dyn.A();
    const Eigen::VectorXd& B = dyn.B();
    Eigen::VectorXd PB = mare.P * B;
    Eigen::RowVectorXd K = (2.0 / (lambda2 + lambdaN)) * (PB.transpose() * A) / B.dot(PB);

    GainDesign design{K, mare.P, 0.0, sig, 2.0 / (lambda2 + lambdaN), lambda2, sigma_tilde,
                      mare.margin};
    for (int i = 0; i < 1000; ++i) {
        double lam = lambda2 + (lambdaN - lambda2) * i / 999.0;
        if (!is_schur(A - lam * B * K)) {
            std::ostringstream msg;
            msg << "eigenratio design fails the Schur check at lambda = " << lam;
            throw DesignError(msg.str());
        }
    }
    return design;
}

double spectral_radius(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols()) throw std::invalid_argument("matrix must be square");
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    double r = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        r = std::max(r, std::abs(es.eigenvalues()(i)));
    return r;
}

double closed_loop_radius(const AgentDynamics& dyn, const Eigen::RowVectorXd& K,
                          const Eigen::VectorXd& laplacian_eigs, bool exclude_zero) {
    if (laplacian_eigs.size() == 0) throw std::invalid_argument("empty eigenvalue list");
    const Eigen::MatrixXd& A = dyn.A();
    const Eigen::MatrixXd BK = dyn.B() * K;
    double r = 0.0;
    bool any = false;
    for (int i = 0; i < laplacian_eigs.size(); ++i) {
        double lam = laplacian_eigs(i);
        if (exclude_zero && std::abs(lam) <= 1e-9) continue;
        r = std::max(r, spectral_radius(A - lam * BK));
        any = true;
    }
    if (!any) throw std::invalid_argument("all eigenvalues excluded");
    return r;
}

}  // namespace gcons
