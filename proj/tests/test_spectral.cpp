#include <doctest.h>

#include <cmath>
#include <random>

#include "gcons/graph.hpp"
#include "gcons/spectral.hpp"
#include "poly_oracle.hpp"

using namespace gcons;

namespace {

Graph cycle(int n) {
    std::vector<Graph::Edge> edges;
    for (int i = 1; i < n; ++i) edges.push_back({i, i + 1});
    edges.push_back({1, n});
    return Graph::from_edges(n, edges, 2);
}

Graph complete(int n) {
    std::vector<Graph::Edge> edges;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) edges.push_back({i, j});
    return Graph::from_edges(n, edges, n - 1);
}

Graph path2() { return Graph::from_edges(2, {{1, 2}}, 1); }

Graph random_irregular(int n, std::mt19937_64& rng) {
    for (;;) {
        std::vector<int> degrees(n);
        long long sum = 0;
        for (int& d : degrees) {
            d = 3 + static_cast<int>(rng() % 5);  // degrees in 3..7
            sum += d;
        }
        if (sum % 2 != 0) degrees[0] += 1;
        try {
            Graph g = generate_with_degrees(degrees, rng());
            if (!g.regular()) return g;
        } catch (const GenerationError&) {
        }
    }
}

}  // namespace

TEST_CASE("random walk Laplacian of C3 and a 2-path") {
    Eigen::MatrixXd L = random_walk_laplacian(cycle(3));
    Eigen::MatrixXd expected(3, 3);
    expected << 1, -0.5, -0.5, -0.5, 1, -0.5, -0.5, -0.5, 1;
    CHECK((L - expected).cwiseAbs().maxCoeff() < 1e-15);

    Eigen::MatrixXd P = random_walk_laplacian(path2());
    CHECK(P(0, 0) == 1.0);
    CHECK(P(0, 1) == -1.0);
    CHECK(P(1, 0) == -1.0);

    Eigen::MatrixXd K = random_walk_laplacian(complete(4));
    CHECK((K * Eigen::VectorXd::Ones(4)).cwiseAbs().maxCoeff() < 1e-15);  // L 1 = 0
}

TEST_CASE("symmetric Laplacian equals L for regular graphs") {
    Graph g = generate_regular(12, 4, 21);
    CHECK((symmetric_laplacian(g) - random_walk_laplacian(g)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("symmetric Laplacian of the 4-star has -1/sqrt(3) couplings") {
    Graph g = Graph::from_edges(4, {{1, 2}, {1, 3}, {1, 4}});
    Eigen::MatrixXd L = symmetric_laplacian(g);
    for (int leaf = 1; leaf < 4; ++leaf) {
        CHECK(L(0, leaf) == doctest::Approx(-1.0 / std::sqrt(3.0)));
        CHECK(L(leaf, 0) == doctest::Approx(-1.0 / std::sqrt(3.0)));
    }
}

TEST_CASE("L and L_sym share their spectrum on irregular graphs") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 4; ++rep) {
        Graph g = random_irregular(14, rng);
        Eigen::MatrixXd L = random_walk_laplacian(g);
        // L is not symmetric; compare sorted eigenvalues through the similarity
        Eigen::EigenSolver<Eigen::MatrixXd> es(L);
        Eigen::VectorXd from_l = es.eigenvalues().real();
        std::sort(from_l.begin(), from_l.end());
        Eigen::VectorXd from_sym = symmetric_eigenvalues(symmetric_laplacian(g));
        CHECK((from_l - from_sym).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("symmetric_eigenvalues contract") {
    CHECK(symmetric_eigenvalues(Eigen::MatrixXd::Identity(3, 3)).isApproxToConstant(1.0));

    Eigen::MatrixXd M(2, 2);
    M << 1, -0.5, -0.5, 1;
    Eigen::VectorXd ev = symmetric_eigenvalues(M);
    CHECK(ev(0) == doctest::Approx(0.5));
    CHECK(ev(1) == doctest::Approx(1.5));

    Eigen::MatrixXd bad(2, 2);
    bad << 1, 2, 0, 1;
    CHECK_THROWS_AS(symmetric_eigenvalues(bad), std::invalid_argument);

    // reconstruction contract
    std::mt19937_64 rng(3);
    Eigen::MatrixXd R = Eigen::MatrixXd::NullaryExpr(
        6, 6, [&]() { return (rng() >> 11) * (1.0 / 9007199254740992.0) - 0.5; });
    Eigen::MatrixXd S = (R + R.transpose()) / 2.0;
    EigenDecomposition d = symmetric_eigen(S);
    Eigen::MatrixXd rebuilt = d.vectors * d.values.asDiagonal() * d.vectors.transpose();
    CHECK((S - rebuilt).norm() <= 1e-8 * S.norm());
}

TEST_CASE("cycle spectrum: L_sym(C4) is {0,1,1,2}") {
    Eigen::VectorXd ev = symmetric_eigenvalues(symmetric_laplacian(cycle(4)));
    CHECK(ev(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ev(1) == doctest::Approx(1.0));
    CHECK(ev(2) == doctest::Approx(1.0));
    CHECK(ev(3) == doctest::Approx(2.0));
}

TEST_CASE("spectral summary of K4 and C4") {
    SpectralSummary k4 = spectral_summary(complete(4));
    CHECK(k4.lambda2 == doctest::Approx(4.0 / 3.0));
    CHECK(k4.lambdaN == doctest::Approx(4.0 / 3.0));
    CHECK(k4.eigenratio == doctest::Approx(1.0));
    CHECK(k4.meets(1.0));
    CHECK_FALSE(k4.disconnected);

    SpectralSummary c4 = spectral_summary(cycle(4));
    CHECK(c4.lambda2 == doctest::Approx(1.0));
    CHECK(c4.lambdaN == doctest::Approx(2.0));
    CHECK(c4.eigenratio == doctest::Approx(0.5));

    // disconnected graphs report near-zero lambda2 and the flag
    Graph two = Graph::from_edges(4, {{1, 2}, {3, 4}});
    SpectralSummary d = spectral_summary(two);
    CHECK(d.disconnected);
    CHECK(std::abs(d.lambda2) < 1e-9);
}

TEST_CASE("lambda1 = 0 and lambdaN <= 2 for generated graphs") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 6; ++rep) {
        Graph g = rep % 2 ? generate_regular(20, 4, rng()) : random_irregular(20, rng);
        SpectralSummary s = spectral_summary(g);
        CHECK(std::abs(s.eigenvalues(0)) < 1e-9);
        CHECK(s.lambdaN <= 2.0 + 1e-9);
        CHECK(s.eigenratio > 0.0);
        CHECK(s.eigenratio <= 1.0);
    }
}

TEST_CASE("grounded Laplacian closed forms") {
    GroundedSpectrum c3 = grounded_laplacian(cycle(3), {1});
    CHECK(c3.lambda1() == doctest::Approx(0.5));
    CHECK(c3.radius() == doctest::Approx(1.5));

    GroundedSpectrum k4 = grounded_laplacian(complete(4), {1});
    CHECK(k4.lambda1() == doctest::Approx(1.0 / 3.0));
    CHECK(k4.eigenvalues(1) == doctest::Approx(4.0 / 3.0));
    CHECK(k4.eigenvalues(2) == doctest::Approx(4.0 / 3.0));

    GroundedSpectrum k4b = grounded_laplacian(complete(4), {1, 2});
    CHECK(k4b.eigenvalues(0) == doctest::Approx(2.0 / 3.0));
    CHECK(k4b.eigenvalues(1) == doctest::Approx(4.0 / 3.0));
    // Monotone in the grounded set: lambda1 up, radius down
    CHECK(k4b.lambda1() >= k4.lambda1());
    CHECK(k4b.radius() <= k4.radius() + 1e-12);

    CHECK_THROWS_AS(grounded_laplacian(cycle(3), {1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(grounded_laplacian(cycle(3), {}), std::invalid_argument);
}

TEST_CASE("grounded spectra are positive and interlace") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 8; ++rep) {
        Graph g = rep % 2 ? generate_regular(16, 4, rng()) : random_irregular(16, rng);
        Eigen::VectorXd full = spectral_summary(g).eigenvalues;
        int v = 1 + static_cast<int>(rng() % g.node_count());
        GroundedSpectrum gs = grounded_laplacian(g, {v});
        CHECK(gs.lambda1() > 1e-9);
        CHECK(gs.eigenratio() > 0.0);
        CHECK(gs.eigenratio() <= 1.0);
        for (int k = 0; k < gs.eigenvalues.size(); ++k) {
            CHECK(gs.eigenvalues(k) >= full(k) - 1e-9);
            CHECK(gs.eigenvalues(k) <= full(k + 1) + 1e-9);
        }
    }
}

TEST_CASE("grounded spectra agree between L and L_sym deletion") {
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 3; ++rep) {
        Graph g = random_irregular(12, rng);
        // deletion of the random-walk Laplacian, then similarity comparison
        Eigen::MatrixXd L = random_walk_laplacian(g);
        int v = 1 + static_cast<int>(rng() % g.node_count());
        std::vector<int> kept;
        for (int u = 1; u <= g.node_count(); ++u)
            if (u != v) kept.push_back(u);
        Eigen::MatrixXd Lbar(kept.size(), kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i)
            for (std::size_t j = 0; j < kept.size(); ++j)
                Lbar(i, j) = L(kept[i] - 1, kept[j] - 1);
        Eigen::EigenSolver<Eigen::MatrixXd> es(Lbar);
        Eigen::VectorXd from_l = es.eigenvalues().real();
        std::sort(from_l.begin(), from_l.end());
        Eigen::VectorXd from_sym = grounded_laplacian(g, {v}).eigenvalues;
        CHECK((from_l - from_sym).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("double grounded Laplacian closed forms on C5 and K4") {
    DoubleGroundedSpectrum far = double_grounded_laplacian(cycle(5), 1, 3);
    CHECK(far.eigenvalues(0) == 0.0);  // structural zero
    CHECK(far.lambda1() == doctest::Approx(0.5));
    CHECK(far.radius() == doctest::Approx(1.5));
    CHECK(far.eigenratio() == doctest::Approx(1.0 / 3.0));

    DoubleGroundedSpectrum near = double_grounded_laplacian(cycle(5), 1, 2);
    CHECK(near.lambda1() == doctest::Approx(1.0 - std::sqrt(2.0) / 2.0));

    DoubleGroundedSpectrum k4 = double_grounded_laplacian(complete(4), 1, 2);
    CHECK(k4.lambda1() == doctest::Approx(2.0 / 3.0));

    CHECK_THROWS_AS(double_grounded_laplacian(cycle(5), 2, 2), std::invalid_argument);
}

TEST_CASE("grounded connectivity bound formula and tightness") {
    CHECK(grounded_connectivity_bound(3, 2, 2, 1) == doctest::Approx(0.5));
    CHECK(grounded_connectivity_bound(4, 3, 3, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(grounded_connectivity_bound(4, 3, 3, 2) == doctest::Approx(1.0));
    CHECK(grounded_connectivity_bound(10, 6, 4, 1, 5) == doctest::Approx(5.0 / 36.0));
    // attained: C3 grounding meets its bound exactly
    CHECK(grounded_laplacian(cycle(3), {1}).lambda1() ==
          doctest::Approx(grounded_connectivity_bound(3, 2, 2, 1)));
    CHECK_THROWS_AS(grounded_connectivity_bound(4, 3, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(grounded_connectivity_bound(4, 3, 3, 4), std::invalid_argument);
}

TEST_CASE("bound holds with the stricter d1 variant on random graphs") {
    std::mt19937_64 rng(53);
    for (int rep = 0; rep < 30; ++rep) {
        Graph g = rep % 2 ? generate_regular(18, 6, rng()) : random_irregular(18, rng);
        int v = 1 + static_cast<int>(rng() % g.node_count());
        double lam1 = grounded_laplacian(g, {v}).lambda1();
        double strict = grounded_connectivity_bound(g.node_count(), g.max_degree(),
                                                    g.min_degree(), 1, g.degree(v));
        double loose =
            grounded_connectivity_bound(g.node_count(), g.max_degree(), g.min_degree(), 1);
        CHECK(lam1 <= strict + 1e-9);
        CHECK(strict <= loose + 1e-12);
    }
}

TEST_CASE("threshold sizes") {
    ThresholdSizes t = threshold_sizes(0.3, 6, 6);
    CHECK(t.n_bar == doctest::Approx(1.0 + 1.0 / 0.3));
    CHECK(t.n_tilde == doctest::Approx(1.0 + 2.0 / 0.09));

    ThresholdSizes unit = threshold_sizes(1.0, 4, 4);
    CHECK(unit.n_bar == doctest::Approx(2.0));
    CHECK(unit.n_tilde == doctest::Approx(3.0));

    ThresholdSizes mixed = threshold_sizes(0.3, 8, 4);
    CHECK(mixed.n_bar == doctest::Approx(1.0 + 2.0 / 0.3));
    CHECK(mixed.n_tilde == doctest::Approx(1.0 + 4.0 / 0.09));

    CHECK_THROWS_AS(threshold_sizes(2.5, 4, 4), std::invalid_argument);
}

TEST_CASE("eigen kernel matches the characteristic-polynomial oracle on small graphs") {
    std::mt19937_64 rng(67);
    int compared = 0;
    for (int rep = 0; rep < 40; ++rep) {
        int n = 4 + static_cast<int>(rng() % 5);  // 4..8
        Graph g = [&] {
            for (;;) {
                std::vector<Graph::Edge> edges;
                for (int i = 1; i <= n; ++i)
                    for (int j = i + 1; j <= n; ++j)
                        if (rng() % 2) edges.push_back({i, j});
                Graph cand = Graph::from_edges(n, edges);
                if (cand.connected() && cand.min_degree() >= 1) return cand;
            }
        }();
        Eigen::MatrixXd L = symmetric_laplacian(g);
        Eigen::VectorXd ev = symmetric_eigenvalues(L);
        auto roots = oracle::symmetric_eigenvalues(L);
        REQUIRE(static_cast<int>(roots.size()) == ev.size());
        for (int i = 0; i < ev.size(); ++i) CHECK(std::abs(ev(i) - roots[i]) < 1e-7);
        CHECK(std::abs(oracle::smallest_eigenvalue(L) - ev(0)) < 1e-7);
        ++compared;
    }
    CHECK(compared == 40);
}
