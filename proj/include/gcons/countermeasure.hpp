#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gcons/control.hpp"
#include "gcons/graph.hpp"
#include "gcons/spectral.hpp"

namespace gcons {

struct RedesignError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-node check that the pre-designed gain keeps the network stable when
/// that node is grounded.
struct ResilienceReport {
    std::vector<char> resilient;   // index v-1: grounding node v leaves the loop Schur
    std::vector<double> grounded_eigenratio;  // rho_bar per grounded node
    int worst_node = 0;            // node with the smallest grounded eigenratio
    double worst_eigenratio = 0.0;
    bool eq4_holds_at_worst = false;
    bool all_resilient = false;
};
ResilienceReport passive_resilience_check(const Graph& g, const AgentDynamics& dyn,
                                          const Eigen::RowVectorXd& K);

/// Redesigns the gain with c' replaced by the grounded algebraic
/// connectivity. Throws RedesignError when the grounded network is not
/// consensusable for these dynamics.
GainDesign redesign_after_grounding(const Graph& g, const std::vector<int>& grounded,
                                    const AgentDynamics& dyn, double R);

struct IsolationOutcome {
    Graph remainder;
    bool disconnected = false;
    double lambda2 = 0.0;  // of the remainder, when connected
    bool feasible = false; // remainder still minimum c'-algebraic connected
};
IsolationOutcome isolation_countermeasure(const Graph& g, int grounded_node, double c_prime);

struct BestNodeResult {
    int node = 0;       // arg max of the double-grounded connectivity
    double lambda1 = 0.0;
    std::vector<std::pair<int, double>> all;  // (candidate, lambda1) ascending by id
};

/// Brute-force solution of the max-min selection problem: tries every
/// non-grounded candidate and keeps the one maximizing the resulting grounded
/// connectivity (ties to the lowest id).
BestNodeResult exhaustive_best_node(const Graph& g, const std::vector<int>& grounded);

struct LayerCandidates {
    std::vector<int> nodes;  // layers ell and ell-1
    int ell = 0;
    bool degenerate = false; // ell == 1: only one layer exists
};
LayerCandidates layer_candidates(const Graph& g, int grounded_node);

struct SelectionScores {
    std::vector<int> kept;          // candidate ids, ascending
    std::vector<double> score;      // (Abar^ell 1) per kept node
    std::vector<double> psi;        // row sum + column sum of Abar per kept node
    std::vector<double> psi_tilde;  // Perron-weighted variant (v' Abar e_j) v_j,
                                    // with v the normalized score vector; analysis only
    std::vector<int> layer;         // BFS distance from the grounded set
    int ell = 0;
};

struct ScoreSelection {
    int node = 0;
    SelectionScores scores;
};

/// Power-iteration selection: applies the grounded adjacency operator ell
/// times to the ones vector and picks the largest entry (lowest id on ties).
/// Cost O(ell * |E|); the matrix power is never formed. Throws
/// std::invalid_argument when the remaining network is disconnected.
ScoreSelection score_selection(const Graph& g, const std::vector<int>& grounded);

/// psi_j = j-th row sum + j-th column sum of the grounded adjacency, indexed
/// by node id (entry 0 unused; the grounded node's entry is 0).
std::vector<double> psi_scores(const Graph& g, int grounded_node);

enum class Strategy { Best, Algorithm1, Algorithm2, Random, Worst };
std::string strategy_name(Strategy s);

struct RecoveryTarget {
    enum class Kind {
        Connectivity,   // grounded lambda1 >= value
        Lambda2OfGraph, // grounded lambda1 >= lambda2 of the intact graph
        Eq4Margin       // consensusability margin > 0 for sigma_tilde = value
    };
    Kind kind = Kind::Lambda2OfGraph;
    double value = 0.0;
};

struct RecoveryStep {
    int node = 0;  // 0 for the initial entry
    double lambda1 = 0.0;
    double radius = 0.0;
    double eigenratio = 0.0;
    double incremental_ratio = 0.0;  // (lambda1 - previous) / previous
};

struct RecoveryReport {
    Strategy strategy = Strategy::Best;
    std::vector<int> initial_grounded;
    std::vector<int> grounded_sequence;  // additionally grounded, in order
    std::vector<RecoveryStep> steps;     // steps[0] echoes the initial grounding
    int nodes_needed = -1;               // -1: target unreachable
    bool reached = false;
};

/// Grounds one node at a time, chosen by the strategy, until the target is
/// met or fewer than two nodes remain.
RecoveryReport recover_by_grounding(const Graph& g, std::vector<int> initial_grounded,
                                    const RecoveryTarget& target, Strategy strategy,
                                    std::uint64_t seed);

struct ComparisonConfig {
    int n = 50;
    int d = 6;
    double c_prime = 0.0;  // > 0: sample expanders; else plain regular graphs
    int seeds = 10;
    std::uint64_t master_seed = 1;
    RecoveryTarget target;
    std::vector<Strategy> strategies{Strategy::Best, Strategy::Algorithm2, Strategy::Random,
                                     Strategy::Worst};
    std::vector<int> initial_grounded{1};
};

struct ComparisonRow {
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::Best;
    int nodes_needed = -1;
    bool reached = false;
    double percent = 0.0;     // of the network size
    double elapsed_ms = 0.0;  // wall clock, measured only
    std::vector<double> incremental_ratios;
};

struct ComparisonTable {
    ComparisonConfig config;
    std::vector<ComparisonRow> rows;

    double mean_nodes_needed(Strategy s) const;
    double mean_elapsed_ms(Strategy s) const;
    /// Mean incremental ratio at each step index across seeds.
    std::vector<double> mean_incremental_ratios(Strategy s) const;
};

/// Runs recover_by_grounding for every (seed, strategy) pair on freshly
/// generated graphs; deterministic given the master seed (timings aside).
ComparisonTable strategy_comparison(const ComparisonConfig& config);

}  // namespace gcons
