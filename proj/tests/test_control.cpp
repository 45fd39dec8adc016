#include <doctest.h>

#include <cmath>
#include <random>

#include "gcons/control.hpp"

using namespace gcons;

namespace {

AgentDynamics double_integrator() {
    Eigen::MatrixXd A(2, 2);
    A << 1, 1, 0, 1;
    Eigen::VectorXd B(2);
    B << 0, 1;
    return AgentDynamics(A, B);
}

AgentDynamics unstable_107() {
    Eigen::MatrixXd A(2, 2);
    A << 1.07, 1, 0, 1;
    Eigen::VectorXd B(2);
    B << 0, 1;
    return AgentDynamics(A, B);
}

AgentDynamics stable_second_order() {
    Eigen::MatrixXd A(2, 2);
    A << 0.5, 1, 0, 0.4;
    Eigen::VectorXd B(2);
    B << 0, 1;
    return AgentDynamics(A, B);
}

}  // namespace

TEST_CASE("AgentDynamics rejects uncontrollable pairs") {
    Eigen::MatrixXd A = 0.5 * Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd B(2);
    B << 0, 1;
    CHECK_THROWS_AS(AgentDynamics(A, B), std::invalid_argument);
    CHECK_NOTHROW(double_integrator());
}

TEST_CASE("unstable product") {
    CHECK(unstable_107().sigma_tilde() == doctest::Approx(1.0 / 1.07));
    // eigenvalues on the unit circle are not unstable
    CHECK(double_integrator().sigma_tilde() == doctest::Approx(1.0));
    CHECK(unstable_product(0.5 * Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(1.0));
    Eigen::MatrixXd two(2, 2);
    two << 2, 0, 0, -1.5;
    CHECK(unstable_product(two) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("consensusability margin reproduces the grounding loss inequality chain") {
    double sigma_tilde = 1.0 / 1.07;
    // nongrounded: (1-rho)/(1+rho) = 1/1.6935 < 1/1.07  -> consensusable
    double rho = (1.6935 - 1.0) / (1.6935 + 1.0);
    CHECK(consensusability_margin(sigma_tilde, rho) > 0.0);
    // grounded: (1-rho)/(1+rho) = 1/1.0596 > 1/1.07 -> unconsensusable
    double rho_bar = (1.0596 - 1.0) / (1.0596 + 1.0);
    CHECK(consensusability_margin(sigma_tilde, rho_bar) < 0.0);
    // stable dynamics are always consensusable
    CHECK(consensusability_margin(1.0, 0.01) > 0.0);
    // monotone in rho
    double prev = -1.0;
    for (double r = 0.05; r <= 1.0; r += 0.05) {
        double m = consensusability_margin(sigma_tilde, r);
        CHECK(m > prev);
        prev = m;
    }
}

TEST_CASE("solve_mare matches the scalar fixed-point oracle") {
    Eigen::MatrixXd A(1, 1);
    A << 0.5;
    Eigen::VectorXd B(1);
    B << 1.0;
    AgentDynamics dyn(A, B);
    MareSolution sol = solve_mare(dyn, 0.0, 0.0);
    // literal scalar recursion p <- a^2 p - (1-s^2) (a p b)^2/(b^2 p + R) + q
    const double a = 0.5, b = 1.0, q = 0.1, R = 0.0, s = 0.0;
    double p = 1.0;
    for (int i = 0; i < 200; ++i)
        p = a * a * p - (1.0 - s * s) * (a * p * b) * (b * p * a) / (b * b * p + R) + q;
    CHECK(sol.P(0, 0) == doctest::Approx(p).epsilon(1e-9));
    // scalar inequality (6): p - a^2 p + (a p b)^2/(b^2 p) = p > 0
    CHECK(sol.margin == doctest::Approx(sol.P(0, 0)).epsilon(1e-9));
    CHECK(sol.margin > 0.0);
}

TEST_CASE("solve_mare rejects sigma at or above sigma_tilde") {
    CHECK_THROWS_AS(solve_mare(unstable_107(), 1.0 / 1.07, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_mare(unstable_107(), 0.95, 1.0), std::invalid_argument);
}

TEST_CASE("solve_mare returns a strict inequality witness for the unstable plant") {
    AgentDynamics dyn = unstable_107();
    MareSolution sol = solve_mare(dyn, 0.8, 1.0);
    CHECK(sol.margin > 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sol.P);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("design_gain reproduces the reference gains") {
    GainDesign di = design_gain(double_integrator(), 0.3, 1.0, 0.8, 0.85);
    CHECK(std::abs(di.K(0) - 0.1424) < 5e-3);
    CHECK(std::abs(di.K(1) - 0.9065) < 5e-3);

    GainDesign u = design_gain(unstable_107(), 0.3, 1.0, 0.8, 0.85);
    CHECK(std::abs(u.K(0) - 0.1777) < 5e-3);
    CHECK(std::abs(u.K(1) - 0.9649) < 5e-3);
}

TEST_CASE("design_gain is deterministic and graph independent") {
    GainDesign a = design_gain(double_integrator(), 0.3, 1.0, 0.8, 0.85);
    GainDesign b = design_gain(double_integrator(), 0.3, 1.0, 0.8, 0.85);
    CHECK(a.K(0) == b.K(0));  // bit-equal
    CHECK(a.K(1) == b.K(1));
}

TEST_CASE("design_gain validates its windows") {
    // c' below the feasibility bound 2(1-st)/(1+st) = 0.06763 for 1/1.07
    CHECK_THROWS_AS(design_gain(unstable_107(), 0.05, 1.0), DesignError);
    CHECK_THROWS_AS(design_gain(double_integrator(), 2.0, 1.0), DesignError);
    // sigma outside [ (2-c')/(2+c'), sigma_tilde )
    CHECK_THROWS_AS(design_gain(double_integrator(), 0.3, 1.0, 0.5), DesignError);
    // epsilon outside its window for sigma = 0.8, c' = 0.3: [2/3, 0.9]
    CHECK_THROWS_AS(design_gain(double_integrator(), 0.3, 1.0, 0.8, 0.95), DesignError);
    CHECK_THROWS_AS(design_gain(double_integrator(), 0.3, 1.0, 0.8, 0.5), DesignError);
}

TEST_CASE("stable dynamics admit designs across the whole c' range") {
    GainDesign d = design_gain(stable_second_order(), 1.999, 0.0);
    CHECK(d.sigma_tilde == doctest::Approx(1.0));
    CHECK(d.mari_margin > 0.0);
    GainDesign low = design_gain(stable_second_order(), 0.05, 1.0);
    CHECK(low.mari_margin > 0.0);
}

TEST_CASE("designed gains are Schur across [c', 2]") {
    for (auto&& [dyn, cp] : {std::pair{double_integrator(), 0.3},
                             std::pair{unstable_107(), 0.3},
                             std::pair{stable_second_order(), 0.7}}) {
        GainDesign d = design_gain(dyn, cp, 1.0);
        const Eigen::MatrixXd BK = dyn.B() * d.K;
        for (int i = 0; i < 1000; ++i) {
            double lam = cp + (2.0 - cp) * i / 999.0;
            CHECK(spectral_radius(dyn.A() - lam * BK) < 1.0);
        }
    }
}

TEST_CASE("sigma window nonempty iff c' above the feasibility bound") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 200; ++rep) {
        double sigma_tilde = 0.05 + 0.95 * ((rng() >> 11) * (1.0 / 9007199254740992.0));
        double c = 0.01 + 1.98 * ((rng() >> 11) * (1.0 / 9007199254740992.0));
        bool window_nonempty = (2.0 - c) / (2.0 + c) < sigma_tilde;
        bool c_feasible = c > 2.0 * (1.0 - sigma_tilde) / (1.0 + sigma_tilde);
        CHECK(window_nonempty == c_feasible);
    }
}

TEST_CASE("design_gain_eigen baseline") {
    AgentDynamics stable = stable_second_order();
    GainDesign d = design_gain_eigen(stable, 0.5, 1.5);
    CHECK(d.K.size() == 2);

    // section 7.2 values: rho = 0.2575 is fine for 1/1.07
    AgentDynamics u = unstable_107();
    double rho = (1.6935 - 1.0) / (1.6935 + 1.0);
    GainDesign ok = design_gain_eigen(u, rho, 1.0);
    CHECK(ok.mari_margin > 0.0);

    // grounded ratio with (1-rho)/(1+rho) = 1/1.0596 violates Eq. (4)
    double rho_bar = (1.0596 - 1.0) / (1.0596 + 1.0);
    CHECK_THROWS_AS(design_gain_eigen(u, rho_bar, 1.0), DesignError);
}

TEST_CASE("spectral radius and Schur checks") {
    CHECK(spectral_radius(Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(1.0));
    CHECK_FALSE(is_schur(Eigen::MatrixXd::Identity(2, 2)));
    CHECK(is_schur(0.5 * Eigen::MatrixXd::Identity(2, 2)));
    Eigen::MatrixXd rot(2, 2);
    rot << 0, -0.9, 0.9, 0;
    CHECK(spectral_radius(rot) == doctest::Approx(0.9));
}

TEST_CASE("closed_loop_radius excludes the consensus eigenvalue on request") {
    AgentDynamics dyn = double_integrator();
    GainDesign d = design_gain(dyn, 0.3, 1.0, 0.8, 0.85);
    Eigen::VectorXd eigs(4);
    eigs << 0.0, 0.4, 1.1, 1.9;
    CHECK(closed_loop_radius(dyn, d.K, eigs, true) < 1.0);
    // with the zero included, A - 0 BK = A has radius 1 (double integrator)
    CHECK(closed_loop_radius(dyn, d.K, eigs, false) == doctest::Approx(1.0));
    // stable A with K = 0 keeps its own radius regardless of the graph
    AgentDynamics s = stable_second_order();
    Eigen::RowVectorXd zero = Eigen::RowVectorXd::Zero(2);
    CHECK(closed_loop_radius(s, zero, eigs, false) == doctest::Approx(0.5));
}
