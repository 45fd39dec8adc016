#include "gcons/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace gcons {

namespace {

void require_positive_degrees(const Graph& g) {
    if (g.min_degree() < 1)
        throw std::invalid_argument("Laplacian needs every degree >= 1");
}

}  // namespace

Eigen::MatrixXd random_walk_laplacian(const Graph& g) {
    require_positive_degrees(g);
    const int n = g.node_count();
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n);
    for (auto [a, b] : g.edges()) {
        L(a - 1, b - 1) = -1.0 / g.degree(a);
        L(b - 1, a - 1) = -1.0 / g.degree(b);
    }
    return L;
}

Eigen::MatrixXd symmetric_laplacian(const Graph& g) {
    require_positive_degrees(g);
    const int n = g.node_count();
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n);
    for (auto [a, b] : g.edges()) {
        double w = -1.0 / std::sqrt(static_cast<double>(g.degree(a)) * g.degree(b));
        L(a - 1, b - 1) = w;
        L(b - 1, a - 1) = w;
    }
    return L;
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& M) {
    return symmetric_eigen(M).values;
}

EigenDecomposition symmetric_eigen(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols()) throw std::invalid_argument("matrix must be square");
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("matrix is not symmetric within 1e-10");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("symmetric eigensolver failed to converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

SpectralSummary spectral_summary(const Graph& g) {
    if (g.node_count() < 2) throw std::invalid_argument("need at least 2 nodes");
    SpectralSummary s;
    s.eigenvalues = symmetric_eigenvalues(symmetric_laplacian(g));
    s.lambda2 = s.eigenvalues(1);
    s.lambdaN = s.eigenvalues(s.eigenvalues.size() - 1);
    s.eigenratio = s.lambda2 / s.lambdaN;
    s.disconnected = !g.connected();
    return s;
}

Eigen::MatrixXd grounded_symmetric_laplacian(const Graph& g, const std::vector<int>& grounded) {
    std::set<int> gset(grounded.begin(), grounded.end());
    if (gset.empty()) throw std::invalid_argument("grounded set must be nonempty");
    if (static_cast<int>(gset.size()) >= g.node_count())
        throw std::invalid_argument("grounded set must be a proper subset of the nodes");
    for (int v : gset)
        if (v < 1 || v > g.node_count())
            throw std::invalid_argument("grounded node id out of range");

    std::vector<int> kept;
    for (int v = 1; v <= g.node_count(); ++v)
        if (!gset.count(v)) kept.push_back(v);

    const int m = static_cast<int>(kept.size());
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(m, m);
    std::vector<int> row(g.node_count() + 1, -1);
    for (int i = 0; i < m; ++i) row[kept[i]] = i;
    for (auto [a, b] : g.edges()) {
        if (row[a] < 0 || row[b] < 0) continue;
        double w = -1.0 / std::sqrt(static_cast<double>(g.degree(a)) * g.degree(b));
        L(row[a], row[b]) = w;
        L(row[b], row[a]) = w;
    }
    return L;
}

GroundedSpectrum grounded_laplacian(const Graph& g, std::vector<int> grounded) {
    Eigen::MatrixXd L = grounded_symmetric_laplacian(g, grounded);
    std::sort(grounded.begin(), grounded.end());
    grounded.erase(std::unique(grounded.begin(), grounded.end()), grounded.end());
    GroundedSpectrum s;
    s.grounded = std::move(grounded);
    std::set<int> gset(s.grounded.begin(), s.grounded.end());
    for (int v = 1; v <= g.node_count(); ++v)
        if (!gset.count(v)) s.kept.push_back(v);
    s.eigenvalues = symmetric_eigenvalues(L);
    return s;
}

DoubleGroundedSpectrum double_grounded_laplacian(const Graph& g, int first, int j) {
    if (first == j) throw std::invalid_argument("the two grounded nodes must differ");
    Eigen::VectorXd nz = grounded_laplacian(g, {first, j}).eigenvalues;
    DoubleGroundedSpectrum s;
    s.first = first;
    s.second = j;
    s.eigenvalues.resize(nz.size() + 1);
    s.eigenvalues(0) = 0.0;  // structural zero from the zeroed row/column
    s.eigenvalues.tail(nz.size()) = nz;
    return s;
}

double grounded_connectivity_bound(int n, int d_max, int d_min, int m,
                                   std::optional<int> d_grounded) {
    if (m < 1 || m >= n) throw std::invalid_argument("m must satisfy 0 < m < n");
    if (d_min < 1) throw std::invalid_argument("d_min must be at least 1");
    if (m == 1 && d_grounded)
        return static_cast<double>(*d_grounded) / (static_cast<double>(n - 1) * d_min);
    return static_cast<double>(m) * d_max / (static_cast<double>(n - m) * d_min);
}

ThresholdSizes threshold_sizes(double c_prime, int d_max, int d_min) {
    if (c_prime <= 0.0 || c_prime >= 2.0)
        throw std::invalid_argument("c' must lie in (0, 2)");
    if (d_min < 1) throw std::invalid_argument("d_min must be at least 1");
    double ratio = static_cast<double>(d_max) / d_min;
    return {1.0 + ratio / c_prime, 1.0 + 2.0 * ratio / (c_prime * c_prime)};
}

}  // namespace gcons
