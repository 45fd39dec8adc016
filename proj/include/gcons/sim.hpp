#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "gcons/control.hpp"
#include "gcons/graph.hpp"

namespace gcons {

enum class GroundingForm { FixState, CutInput, Takeover };

/// One grounding action applied at step `time`. FixState pins the nodes to
/// c_bar (their current state when c_bar is absent); CutInput sets u = 0 and
/// optionally swaps the dynamics to A_bar; Takeover runs u = -K1 x + c1,
/// which requires A - B K1 Schur.
struct GroundingEvent {
    int time = 0;
    std::vector<int> nodes;
    GroundingForm form = GroundingForm::FixState;
    std::optional<Eigen::VectorXd> c_bar;
    std::optional<Eigen::MatrixXd> A_bar;
    std::optional<Eigen::RowVectorXd> K1;
    double c1 = 0.0;
};

/// Additive input offset on `nodes` for steps in [begin, end).
struct DisturbanceEvent {
    int begin = 0;
    int end = 0;
    std::vector<int> nodes;
    double offset = 0.0;
};

/// Replaces the consensus gain from step `time` on (e.g. a redesign after a
/// recovery grounding).
struct GainSwitchEvent {
    int time = 0;
    Eigen::RowVectorXd K;
};

/// Independent reference system x*(k+1) = (A - B K_ref) x*(k) + B c1.
struct ReferenceSpec {
    Eigen::RowVectorXd K_ref;
    double c1 = 0.0;
    Eigen::VectorXd x0;
};

struct SimOptions {
    int log_stride = 1;  // store every log_stride-th state snapshot
    std::optional<ReferenceSpec> reference;
};

struct Trajectory {
    int node_count = 0;
    int state_dim = 0;
    int steps = 0;
    int log_stride = 1;
    std::vector<int> logged_steps;          // k for each snapshot
    std::vector<Eigen::MatrixXd> states;    // N x n per snapshot
    std::vector<Eigen::MatrixXd> inputs;    // N x 1 per snapshot (u applied at k)
    std::vector<double> deviation;          // every step: max pairwise infinity-norm gap
    std::vector<Eigen::VectorXd> reference; // per snapshot when enabled
    std::vector<GroundingEvent> groundings;
    std::vector<DisturbanceEvent> disturbances;
    std::vector<GainSwitchEvent> gain_switches;

    const Eigen::MatrixXd& final_state() const { return states.back(); }
};

/// Iterates x(k+1) = (I (x) A - L (x) BK) x(k) node-wise, honoring grounding
/// events, disturbances, and gain switches. Grounded nodes keep influencing
/// their neighbors through the original weights while following their own
/// form-specific update.
Trajectory simulate(const Graph& g, const AgentDynamics& dyn, const Eigen::RowVectorXd& K,
                    const Eigen::MatrixXd& x0, int steps,
                    const std::vector<GroundingEvent>& groundings = {},
                    const std::vector<DisturbanceEvent>& disturbances = {},
                    const std::vector<GainSwitchEvent>& gain_switches = {},
                    const SimOptions& options = {});

struct NoSteadyStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Closed-form limit of the grounded network (rows of grounded nodes hold
/// their own limit). FixState: affine fixed point of Eq-(9)-type dynamics;
/// Takeover: leader limit c0 = (I - (A - B K1))^{-1} B c1 with the followers'
/// fixed point under a constant c0 leader. Throws NoSteadyStateError when the
/// grounded closed loop is not Schur.
Eigen::MatrixXd steady_state(const Graph& g, const AgentDynamics& dyn,
                             const Eigen::RowVectorXd& K, const GroundingEvent& event);

struct ConsensusMetrics {
    std::vector<double> deviation;  // echo of the per-step series
    int settling_step = -1;         // first k after which deviation stays < tol; -1 = never
    bool diverged = false;          // deviation exceeded 1e6
    double peak_deviation = 0.0;
    double final_deviation = 0.0;
};
ConsensusMetrics consensus_metrics(const Trajectory& t, double tol = 1e-6);

}  // namespace gcons
