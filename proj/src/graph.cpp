#include "gcons/graph.hpp"
#include "gcons/spectral.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace gcons {

namespace {

// Unbiased uniform draw from [0, bound) with explicit rejection, so results
// do not depend on the standard library's distribution implementation.
std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

template <typename T>
void shuffle_vec(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[rand_below(rng, i)]);
    }
}

bool bfs_connected(int n, const std::vector<std::vector<int>>& adj) {
    if (n == 0) return false;
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    return reached == n;
}

}  // namespace

Graph Graph::from_edges(int node_count, std::vector<Edge> edges, int declared_degree) {
    if (node_count < 1) throw std::invalid_argument("graph needs at least one node");
    Graph g;
    g.node_count_ = node_count;
    g.declared_degree_ = declared_degree;
    g.adjacency_.assign(node_count, {});
    std::set<Edge> seen;
    for (auto& e : edges) {
        if (e.first > e.second) std::swap(e.first, e.second);
        if (e.first == e.second)
            throw std::invalid_argument("self-loop on node " + std::to_string(e.first));
        if (e.first < 1 || e.second > node_count)
            throw std::invalid_argument("edge endpoint out of range: " + std::to_string(e.first) +
                                        " " + std::to_string(e.second));
        if (!seen.insert(e).second)
            throw std::invalid_argument("duplicate edge " + std::to_string(e.first) + "-" +
                                        std::to_string(e.second));
        g.adjacency_[e.first - 1].push_back(e.second);
        g.adjacency_[e.second - 1].push_back(e.first);
    }
    g.edges_.assign(seen.begin(), seen.end());
    for (auto& nbrs : g.adjacency_) std::sort(nbrs.begin(), nbrs.end());
    g.d_max_ = 0;
    g.d_min_ = node_count > 0 ? node_count : 0;
    for (const auto& nbrs : g.adjacency_) {
        int d = static_cast<int>(nbrs.size());
        g.d_max_ = std::max(g.d_max_, d);
        g.d_min_ = std::min(g.d_min_, d);
    }
    // connectivity on the 0-based adjacency
    std::vector<std::vector<int>> adj0(node_count);
    for (int v = 1; v <= node_count; ++v)
        for (int w : g.adjacency_[v - 1]) adj0[v - 1].push_back(w - 1);
    g.connected_ = bfs_connected(node_count, adj0);
    return g;
}

void Graph::check_node(int v) const {
    if (v < 1 || v > node_count_)
        throw std::invalid_argument("node id " + std::to_string(v) + " out of range 1.." +
                                    std::to_string(node_count_));
}

const std::vector<int>& Graph::neighbors(int v) const {
    check_node(v);
    return adjacency_[v - 1];
}

int Graph::degree(int v) const {
    check_node(v);
    return static_cast<int>(adjacency_[v - 1].size());
}

bool Graph::has_edge(int i, int j) const {
    check_node(i);
    check_node(j);
    const auto& nbrs = adjacency_[i - 1];
    return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

Graph generate_with_degrees(const std::vector<int>& degrees, std::uint64_t seed) {
    const int n = static_cast<int>(degrees.size());
    if (n < 3) throw std::invalid_argument("need at least 3 nodes");
    long long stub_count = 0;
    for (int i = 0; i < n; ++i) {
        if (degrees[i] < 1 || degrees[i] >= n)
            throw std::invalid_argument("degree out of range at node " + std::to_string(i + 1));
        stub_count += degrees[i];
    }
    if (stub_count % 2 != 0)
        throw std::invalid_argument("degree sum is odd; no such graph exists");

    std::mt19937_64 rng(seed);
    const int m = static_cast<int>(stub_count / 2);
    std::vector<int> stubs;
    stubs.reserve(stub_count);

    constexpr int kMaxAttempts = 1000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        stubs.clear();
        for (int v = 1; v <= n; ++v)
            for (int k = 0; k < degrees[v - 1]; ++k) stubs.push_back(v);
        shuffle_vec(stubs, rng);

        std::vector<Graph::Edge> edges(m);
        for (int k = 0; k < m; ++k) edges[k] = {stubs[2 * k], stubs[2 * k + 1]};

        // Repair self-loops / duplicates by swapping endpoints with a random
        // other pair; degrees are preserved by construction.
        bool simple = false;
        for (int pass = 0; pass < 200 * m; ++pass) {
            std::set<Graph::Edge> keys;
            int bad = -1;
            for (int k = 0; k < m; ++k) {
                auto [a, b] = edges[k];
                Graph::Edge key{std::min(a, b), std::max(a, b)};
                if (a == b || !keys.insert(key).second) {
                    bad = k;
                    break;
                }
            }
            if (bad < 0) {
                simple = true;
                break;
            }
            int other = static_cast<int>(rand_below(rng, m));
            if (other == bad) continue;
            std::swap(edges[bad].second, edges[other].second);
        }
        if (!simple) continue;

        Graph g = Graph::from_edges(n, edges,
                                    degrees.front() == degrees.back() &&
                                            std::all_of(degrees.begin(), degrees.end(),
                                                        [&](int d) { return d == degrees[0]; })
                                        ? degrees[0]
                                        : 0);
        if (g.connected()) return g;
    }
    throw GenerationError("could not generate a connected simple graph after " +
                          std::to_string(kMaxAttempts) + " attempts");
}

Graph generate_regular(int n, int d, std::uint64_t seed) {
    if (n < 3) throw std::invalid_argument("n must be at least 3");
    if (d < 1 || d >= n) throw std::invalid_argument("degree must satisfy 1 <= d < n");
    if ((static_cast<long long>(n) * d) % 2 != 0)
        throw std::invalid_argument("n*d must be even for a d-regular graph");
    return generate_with_degrees(std::vector<int>(n, d), seed);
}

ExpanderResult generate_expander(int n, int d, double c_prime, std::uint64_t seed,
                                 int max_rejections) {
    if (c_prime <= 0.0 || c_prime >= 2.0)
        throw std::invalid_argument("c' must lie in (0, 2)");
    std::mt19937_64 seeder(seed);
    double best = -1.0;
    for (int k = 0; k <= max_rejections; ++k) {
        Graph g = generate_regular(n, d, seeder());
        double lambda2 = spectral_summary(g).lambda2;
        if (lambda2 >= c_prime) return {std::move(g), k, lambda2};
        best = std::max(best, lambda2);
    }
    std::ostringstream msg;
    msg << "no " << c_prime << "-expander found in " << (max_rejections + 1)
        << " samples (best lambda2 = " << best << ")";
    throw GenerationError(msg.str());
}

LayerDecomposition layer_decomposition(const Graph& g, int root) {
    if (!g.connected()) throw std::invalid_argument("layer decomposition needs a connected graph");
    std::vector<int> dist = distances_from_set(g, {root});
    LayerDecomposition ld;
    ld.root = root;
    int ecc = *std::max_element(dist.begin(), dist.end());
    ld.layers.assign(ecc, {});
    for (int v = 1; v <= g.node_count(); ++v)
        if (dist[v - 1] > 0) ld.layers[dist[v - 1] - 1].push_back(v);
    return ld;
}

int LayerDecomposition::layer_of(int v) const {
    if (v == root) return 0;
    for (std::size_t i = 0; i < layers.size(); ++i)
        if (std::find(layers[i].begin(), layers[i].end(), v) != layers[i].end())
            return static_cast<int>(i) + 1;
    throw std::invalid_argument("node " + std::to_string(v) + " not in decomposition");
}

std::vector<int> distances_from_set(const Graph& g, const std::vector<int>& sources) {
    std::vector<int> dist(g.node_count(), -1);
    std::vector<int> frontier;
    for (int s : sources) {
        if (s < 1 || s > g.node_count())
            throw std::invalid_argument("source node out of range");
        dist[s - 1] = 0;
        frontier.push_back(s);
    }
    int level = 0;
    while (!frontier.empty()) {
        ++level;
        std::vector<int> next;
        for (int u : frontier)
            for (int w : g.neighbors(u))
                if (dist[w - 1] < 0) {
                    dist[w - 1] = level;
                    next.push_back(w);
                }
        frontier = std::move(next);
    }
    return dist;
}

IsolationResult isolate_node(const Graph& g, int v) {
    if (v < 1 || v > g.node_count()) throw std::invalid_argument("node id out of range");
    std::vector<Graph::Edge> kept;
    for (auto [a, b] : g.edges()) {
        if (a == v || b == v) continue;
        kept.push_back({a > v ? a - 1 : a, b > v ? b - 1 : b});
    }
    Graph rest = Graph::from_edges(g.node_count() - 1, std::move(kept), 0);
    return {rest, !rest.connected()};
}

Graph read_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    int lineno = 0;
    int n = -1, d = 0;
    std::vector<Graph::Edge> edges;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        if (n < 0) {
            if (!(ls >> n >> d) || n < 1) throw ParseError("expected header \"N D\"", lineno);
            continue;
        }
        int a, b;
        if (!(ls >> a >> b)) throw ParseError("expected \"i j\" edge line", lineno);
        if (a < 1 || b < 1) throw ParseError("node indices are 1-based", lineno);
        if (a == b) throw ParseError("self-loop on node " + std::to_string(a), lineno);
        if (a > b) throw ParseError("edges must satisfy i < j", lineno);
        if (b > n) throw ParseError("node index exceeds declared N", lineno);
        if (std::find(edges.begin(), edges.end(), Graph::Edge{a, b}) != edges.end())
            throw ParseError("duplicate edge " + std::to_string(a) + "-" + std::to_string(b),
                             lineno);
        edges.push_back({a, b});
    }
    if (n < 0) throw ParseError("missing header", lineno);
    try {
        return Graph::from_edges(n, std::move(edges), d);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), lineno);
    }
}

void write_graph(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << g.node_count() << " " << g.declared_degree() << "\n";
    for (auto [a, b] : g.edges()) out << a << " " << b << "\n";
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace gcons
