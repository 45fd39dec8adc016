#include "gcons/countermeasure.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace gcons {

namespace {

std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

std::vector<int> kept_nodes(const Graph& g, const std::set<int>& grounded) {
    std::vector<int> kept;
    for (int v = 1; v <= g.node_count(); ++v)
        if (!grounded.count(v)) kept.push_back(v);
    return kept;
}

bool remainder_connected(const Graph& g, const std::set<int>& grounded,
                         const std::vector<int>& kept) {
    if (kept.empty()) return false;
    std::set<int> seen{kept.front()};
    std::vector<int> stack{kept.front()};
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int w : g.neighbors(u))
            if (!grounded.count(w) && seen.insert(w).second) stack.push_back(w);
    }
    return seen.size() == kept.size();
}

bool target_met(const RecoveryTarget& target, const GroundedSpectrum& spec,
                double graph_lambda2) {
    switch (target.kind) {
        case RecoveryTarget::Kind::Connectivity:
            return spec.lambda1() >= target.value;
        case RecoveryTarget::Kind::Lambda2OfGraph:
            return spec.lambda1() >= graph_lambda2;
        case RecoveryTarget::Kind::Eq4Margin:
            return consensusability_margin(target.value, spec.eigenratio()) > 1e-12;
    }
    return false;
}

}  // namespace

ResilienceReport passive_resilience_check(const Graph& g, const AgentDynamics& dyn,
                                          const Eigen::RowVectorXd& K) {
    const int N = g.node_count();
    ResilienceReport report;
    report.resilient.assign(N, 0);
    report.grounded_eigenratio.assign(N, 0.0);
    report.worst_eigenratio = std::numeric_limits<double>::infinity();
    for (int v = 1; v <= N; ++v) {
        GroundedSpectrum spec = grounded_laplacian(g, {v});
        double radius = closed_loop_radius(dyn, K, spec.eigenvalues, false);
        report.resilient[v - 1] = radius < 1.0 - 1e-12;
        report.grounded_eigenratio[v - 1] = spec.eigenratio();
        if (spec.eigenratio() < report.worst_eigenratio) {
            report.worst_eigenratio = spec.eigenratio();
            report.worst_node = v;
        }
    }
    report.eq4_holds_at_worst =
        consensusability_margin(dyn.sigma_tilde(), report.worst_eigenratio) > 0.0;
    report.all_resilient =
        std::all_of(report.resilient.begin(), report.resilient.end(), [](char c) { return c; });
    return report;
}

GainDesign redesign_after_grounding(const Graph& g, const std::vector<int>& grounded,
                                    const AgentDynamics& dyn, double R) {
    GroundedSpectrum spec = grounded_laplacian(g, grounded);
    const double c_g = spec.lambda1();
    const double sigma_tilde = dyn.sigma_tilde();
    const double bound = 2.0 * (1.0 - sigma_tilde) / (1.0 + sigma_tilde);
    if (!(c_g > bound)) {
        std::ostringstream msg;
        msg << "grounded connectivity " << c_g << " does not exceed the consensusability bound "
            << bound << "; redesign cannot work";
        throw RedesignError(msg.str());
    }
    GainDesign design = design_gain(dyn, c_g, R);
    if (closed_loop_radius(dyn, design.K, spec.eigenvalues, false) >= 1.0 - 1e-12)
        throw RedesignError("redesigned gain fails on the grounded spectrum");
    return design;
}

IsolationOutcome isolation_countermeasure(const Graph& g, int grounded_node, double c_prime) {
    IsolationResult iso = isolate_node(g, grounded_node);
    IsolationOutcome out{iso.graph, iso.disconnected, 0.0, false};
    if (!iso.disconnected && iso.graph.min_degree() >= 1) {
        out.lambda2 = spectral_summary(iso.graph).lambda2;
        out.feasible = out.lambda2 >= c_prime;
    }
    return out;
}

BestNodeResult exhaustive_best_node(const Graph& g, const std::vector<int>& grounded) {
    std::set<int> gset(grounded.begin(), grounded.end());
    std::vector<int> cands = kept_nodes(g, gset);
    if (cands.size() < 3)
        throw std::invalid_argument("need at least 3 remaining nodes");
    BestNodeResult best;
    best.lambda1 = -1.0;
    for (int j : cands) {
        std::vector<int> extended(grounded.begin(), grounded.end());
        extended.push_back(j);
        double lam = grounded_laplacian(g, extended).lambda1();
        best.all.push_back({j, lam});
        if (lam > best.lambda1) {  // strict: ties go to the lowest id
            best.lambda1 = lam;
            best.node = j;
        }
    }
    return best;
}

LayerCandidates layer_candidates(const Graph& g, int grounded_node) {
    LayerDecomposition ld = layer_decomposition(g, grounded_node);
    LayerCandidates out;
    out.ell = ld.ell();
    out.degenerate = ld.ell() == 1;
    out.nodes = ld.layers.back();
    if (ld.ell() >= 2) {
        const auto& second = ld.layers[ld.ell() - 2];
        out.nodes.insert(out.nodes.end(), second.begin(), second.end());
    }
    std::sort(out.nodes.begin(), out.nodes.end());
    return out;
}

ScoreSelection score_selection(const Graph& g, const std::vector<int>& grounded) {
    std::set<int> gset(grounded.begin(), grounded.end());
    if (gset.empty() || static_cast<int>(gset.size()) >= g.node_count() - 1)
        throw std::invalid_argument("grounded set leaves no room to select");
    std::vector<int> kept = kept_nodes(g, gset);
    if (!remainder_connected(g, gset, kept))
        throw std::invalid_argument("remaining network is disconnected");

    std::vector<int> dist = distances_from_set(g, std::vector<int>(gset.begin(), gset.end()));
    int ell = 0;
    for (int v : kept) ell = std::max(ell, dist[v - 1]);

    const int m = static_cast<int>(kept.size());
    std::vector<int> row(g.node_count() + 1, -1);
    for (int i = 0; i < m; ++i) row[kept[i]] = i;

    // s <- Abar^ell * 1 by repeated operator application
    std::vector<double> s(m, 1.0), next(m, 0.0);
    for (int step = 0; step < ell; ++step) {
        for (int i = 0; i < m; ++i) {
            double acc = 0.0;
            double w = 1.0 / g.degree(kept[i]);
            for (int nb : g.neighbors(kept[i]))
                if (row[nb] >= 0) acc += w * s[row[nb]];
            next[i] = acc;
        }
        s.swap(next);
    }

    ScoreSelection sel;
    sel.scores.kept = kept;
    sel.scores.score = s;
    sel.scores.ell = ell;
    sel.scores.layer.resize(m);
    sel.scores.psi.resize(m);
    sel.scores.psi_tilde.resize(m);
    double s_sum = 0.0;
    for (double v : s) s_sum += v;
    for (int i = 0; i < m; ++i) {
        int v = kept[i];
        sel.scores.layer[i] = dist[v - 1];
        double row_sum = 0.0, col_sum = 0.0, weighted_col = 0.0;
        for (int nb : g.neighbors(v)) {
            if (row[nb] < 0) continue;
            row_sum += 1.0 / g.degree(v);
            col_sum += 1.0 / g.degree(nb);
            weighted_col += s[row[nb]] / (s_sum > 0 ? s_sum : 1.0) / g.degree(nb);
        }
        sel.scores.psi[i] = row_sum + col_sum;
        sel.scores.psi_tilde[i] = weighted_col * s[i] / (s_sum > 0 ? s_sum : 1.0);
    }
    int best = 0;
    for (int i = 1; i < m; ++i)
        if (s[i] > s[best]) best = i;  // strict: ties go to the lowest id
    sel.node = kept[best];
    return sel;
}

std::vector<double> psi_scores(const Graph& g, int grounded_node) {
    std::vector<double> psi(g.node_count() + 1, 0.0);
    for (int v = 1; v <= g.node_count(); ++v) {
        if (v == grounded_node) continue;
        double row_sum = 0.0, col_sum = 0.0;
        for (int nb : g.neighbors(v)) {
            if (nb == grounded_node) continue;
            row_sum += 1.0 / g.degree(v);
            col_sum += 1.0 / g.degree(nb);
        }
        psi[v] = row_sum + col_sum;
    }
    return psi;
}

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Best: return "best";
        case Strategy::Algorithm1: return "algorithm1";
        case Strategy::Algorithm2: return "algorithm2";
        case Strategy::Random: return "random";
        case Strategy::Worst: return "worst";
    }
    return "?";
}

RecoveryReport recover_by_grounding(const Graph& g, std::vector<int> initial_grounded,
                                    const RecoveryTarget& target, Strategy strategy,
                                    std::uint64_t seed) {
    std::sort(initial_grounded.begin(), initial_grounded.end());
    RecoveryReport report;
    report.strategy = strategy;
    report.initial_grounded = initial_grounded;

    double graph_lambda2 = 0.0;
    if (target.kind == RecoveryTarget::Kind::Lambda2OfGraph)
        graph_lambda2 = spectral_summary(g).lambda2;

    std::mt19937_64 rng(seed);
    std::set<int> gset(initial_grounded.begin(), initial_grounded.end());
    std::vector<int> grounded = initial_grounded;
    GroundedSpectrum spec = grounded_laplacian(g, grounded);
    report.steps.push_back({0, spec.lambda1(), spec.radius(), spec.eigenratio(), 0.0});

    while (!target_met(target, spec, graph_lambda2) &&
           g.node_count() - static_cast<int>(gset.size()) >= 2) {
        std::vector<int> cands = kept_nodes(g, gset);
        int choice = 0;
        switch (strategy) {
            case Strategy::Best:
            case Strategy::Worst: {
                double best_val = strategy == Strategy::Best
                                      ? -std::numeric_limits<double>::infinity()
                                      : std::numeric_limits<double>::infinity();
                for (int j : cands) {
                    std::vector<int> ext = grounded;
                    ext.push_back(j);
                    double lam = grounded_laplacian(g, ext).lambda1();
                    bool better = strategy == Strategy::Best ? lam > best_val : lam < best_val;
                    if (better) {
                        best_val = lam;
                        choice = j;
                    }
                }
                break;
            }
            case Strategy::Algorithm1: {
                // exhaustive search restricted to the two highest layers
                std::vector<int> dist = distances_from_set(g, grounded);
                int ell = 0;
                for (int j : cands) ell = std::max(ell, dist[j - 1]);
                double best_val = -std::numeric_limits<double>::infinity();
                for (int j : cands) {
                    if (dist[j - 1] < ell - 1) continue;
                    std::vector<int> ext = grounded;
                    ext.push_back(j);
                    double lam = grounded_laplacian(g, ext).lambda1();
                    if (lam > best_val) {
                        best_val = lam;
                        choice = j;
                    }
                }
                break;
            }
            case Strategy::Algorithm2:
                choice = score_selection(g, grounded).node;
                break;
            case Strategy::Random:
                choice = cands[rand_below(rng, cands.size())];
                break;
        }
        gset.insert(choice);
        grounded.push_back(choice);
        report.grounded_sequence.push_back(choice);
        double prev = spec.lambda1();
        spec = grounded_laplacian(g, grounded);
        report.steps.push_back({choice, spec.lambda1(), spec.radius(), spec.eigenratio(),
                                (spec.lambda1() - prev) / prev});
    }
    report.reached = target_met(target, spec, graph_lambda2);
    report.nodes_needed = report.reached ? static_cast<int>(report.grounded_sequence.size()) : -1;
    return report;
}

double ComparisonTable::mean_nodes_needed(Strategy s) const {
    double sum = 0.0;
    int count = 0;
    for (const auto& row : rows)
        if (row.strategy == s && row.reached) {
            sum += row.nodes_needed;
            ++count;
        }
    return count > 0 ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

double ComparisonTable::mean_elapsed_ms(Strategy s) const {
    double sum = 0.0;
    int count = 0;
    for (const auto& row : rows)
        if (row.strategy == s) {
            sum += row.elapsed_ms;
            ++count;
        }
    return count > 0 ? sum / count : 0.0;
}

std::vector<double> ComparisonTable::mean_incremental_ratios(Strategy s) const {
    std::vector<double> sums;
    std::vector<int> counts;
    for (const auto& row : rows) {
        if (row.strategy != s) continue;
        for (std::size_t i = 0; i < row.incremental_ratios.size(); ++i) {
            if (i >= sums.size()) {
                sums.push_back(0.0);
                counts.push_back(0);
            }
            sums[i] += row.incremental_ratios[i];
            counts[i] += 1;
        }
    }
    for (std::size_t i = 0; i < sums.size(); ++i) sums[i] /= counts[i];
    return sums;
}

ComparisonTable strategy_comparison(const ComparisonConfig& config) {
    if (config.strategies.size() < 2) throw std::invalid_argument("need at least 2 strategies");
    if (config.seeds < 1) throw std::invalid_argument("need at least 1 seed");
    ComparisonTable table;
    table.config = config;
    std::mt19937_64 seeder(config.master_seed);
    for (int s = 0; s < config.seeds; ++s) {
        std::uint64_t graph_seed = seeder();
        std::uint64_t recover_seed = seeder();
        Graph g = config.c_prime > 0.0
                      ? generate_expander(config.n, config.d, config.c_prime, graph_seed).graph
                      : generate_regular(config.n, config.d, graph_seed);
        for (Strategy strat : config.strategies) {
            auto t0 = std::chrono::steady_clock::now();
            RecoveryReport rep =
                recover_by_grounding(g, config.initial_grounded, config.target, strat,
                                     recover_seed);
            auto t1 = std::chrono::steady_clock::now();
            ComparisonRow row;
            row.seed = graph_seed;
            row.strategy = strat;
            row.nodes_needed = rep.nodes_needed;
            row.reached = rep.reached;
            row.percent = rep.reached ? 100.0 * rep.nodes_needed / config.n : 100.0;
            row.elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            for (std::size_t i = 1; i < rep.steps.size(); ++i)
                row.incremental_ratios.push_back(rep.steps[i].incremental_ratio);
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

}  // namespace gcons
