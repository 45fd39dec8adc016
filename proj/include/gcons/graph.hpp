#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gcons {

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
    int line_number;
};

/// Undirected simple graph with 1-based node ids. Immutable after construction.
///
/// Adjacency weights follow the random-walk convention: alpha_ij = 1/d_i for
/// every edge (i,j), so each row of the adjacency operator sums to 1.
class Graph {
public:
    using Edge = std::pair<int, int>;  // stored with first < second

    /// Builds a graph from an edge list, validating simplicity and ranges.
    /// `declared_degree` is the D field of the file format (0 = irregular).
    static Graph from_edges(int node_count, std::vector<Edge> edges, int declared_degree = 0);

    int node_count() const { return node_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }

    /// Neighbor ids of node v (1-based), ascending.
    const std::vector<int>& neighbors(int v) const;
    int degree(int v) const;
    int max_degree() const { return d_max_; }
    int min_degree() const { return d_min_; }
    int declared_degree() const { return declared_degree_; }
    bool regular() const { return d_max_ == d_min_; }
    bool connected() const { return connected_; }
    bool has_edge(int i, int j) const;

    /// Random-walk adjacency weight: 1/d_i if (i,j) is an edge, else 0.
    double weight(int i, int j) const { return has_edge(i, j) ? 1.0 / degree(i) : 0.0; }

private:
    Graph() = default;
    void check_node(int v) const;

    int node_count_ = 0;
    int declared_degree_ = 0;
    int d_max_ = 0;
    int d_min_ = 0;
    bool connected_ = false;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adjacency_;  // adjacency_[v-1]
};

/// BFS layers around a root: layers()[i] holds the nodes at distance i+1.
struct LayerDecomposition {
    int root = 0;
    std::vector<std::vector<int>> layers;

    int ell() const { return static_cast<int>(layers.size()); }
    /// Distance of v from the root (0 for the root itself).
    int layer_of(int v) const;
};

/// Samples a connected simple graph with the given degree sequence via the
/// pairing (configuration) model, repairing self-loops and duplicate edges
/// with random pair swaps. Deterministic for a fixed seed.
Graph generate_with_degrees(const std::vector<int>& degrees, std::uint64_t seed);

/// d-regular specialization of generate_with_degrees. Requires n*d even,
/// d < n, n >= 3. Retries up to 1000 attempts before failing.
Graph generate_regular(int n, int d, std::uint64_t seed);

struct ExpanderResult {
    Graph graph;
    int rejections = 0;   // regular samples discarded before success
    double lambda2 = 0.0; // algebraic connectivity of the accepted graph
};

/// Rejection-samples generate_regular until lambda2 >= c_prime.
/// Requires 0 < c_prime < 2. Throws GenerationError naming the best lambda2
/// achieved when the retry budget runs out.
ExpanderResult generate_expander(int n, int d, double c_prime, std::uint64_t seed,
                                 int max_rejections = 200);

LayerDecomposition layer_decomposition(const Graph& g, int root);

/// Distance of every node from the nearest node in `sources` (-1 if unreachable).
/// Index k holds the distance of node k+1.
std::vector<int> distances_from_set(const Graph& g, const std::vector<int>& sources);

struct IsolationResult {
    Graph graph;               // remaining nodes, relabeled 1..N-1 (ids above v shift down)
    bool disconnected = false; // remainder fell apart
};

/// Removes node v and every incident edge.
IsolationResult isolate_node(const Graph& g, int v);

/// Edge-list text format: first line "N D", then "i j" lines with i < j,
/// 1-indexed. Lines starting with '#' are comments.
Graph read_graph(const std::string& path);
void write_graph(const Graph& g, const std::string& path);

}  // namespace gcons
