#include "gcons/sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gcons/spectral.hpp"

namespace gcons {

namespace {

constexpr double kDivergenceThreshold = 1e6;

double max_pairwise_deviation(const Eigen::MatrixXd& X) {
    double dev = 0.0;
    for (int c = 0; c < X.cols(); ++c)
        dev = std::max(dev, X.col(c).maxCoeff() - X.col(c).minCoeff());
    return dev;
}

struct NodeMode {
    GroundingForm form = GroundingForm::FixState;
    bool grounded = false;
    Eigen::VectorXd fixed;               // FixState
    const Eigen::MatrixXd* a_bar = nullptr;  // CutInput
    const Eigen::RowVectorXd* k1 = nullptr;  // Takeover
    double c1 = 0.0;
};

}  // namespace

Trajectory simulate(const Graph& g, const AgentDynamics& dyn, const Eigen::RowVectorXd& K,
                    const Eigen::MatrixXd& x0, int steps,
                    const std::vector<GroundingEvent>& groundings,
                    const std::vector<DisturbanceEvent>& disturbances,
                    const std::vector<GainSwitchEvent>& gain_switches,
                    const SimOptions& options) {
    const int N = g.node_count();
    const int n = dyn.order();
    if (x0.rows() != N || x0.cols() != n)
        throw std::invalid_argument("x0 must be node_count x state_dim");
    if (K.size() != n) throw std::invalid_argument("gain dimension mismatch");
    if (steps < 1) throw std::invalid_argument("steps must be positive");
    for (const auto& ev : groundings) {
        for (int v : ev.nodes)
            if (v < 1 || v > N) throw std::invalid_argument("grounding node out of range");
        if (ev.form == GroundingForm::FixState && ev.c_bar && ev.c_bar->size() != n)
            throw std::invalid_argument("c_bar dimension mismatch");
        if (ev.form == GroundingForm::Takeover) {
            if (!ev.K1) throw std::invalid_argument("Takeover needs a K1 gain");
            if (!is_schur(dyn.A() - dyn.B() * *ev.K1))
                throw std::invalid_argument("Takeover requires A - B K1 Schur");
        }
    }

    const Eigen::MatrixXd& A = dyn.A();
    const Eigen::VectorXd& B = dyn.B();

    Trajectory t;
    t.node_count = N;
    t.state_dim = n;
    t.steps = steps;
    t.log_stride = std::max(1, options.log_stride);
    t.groundings = groundings;
    t.disturbances = disturbances;
    t.gain_switches = gain_switches;

    Eigen::MatrixXd X = x0;
    Eigen::RowVectorXd gain = K;
    std::vector<NodeMode> mode(N);
    Eigen::VectorXd xref;
    if (options.reference) xref = options.reference->x0;

    auto log_state = [&](int k, const Eigen::MatrixXd& state, const Eigen::MatrixXd& u) {
        t.logged_steps.push_back(k);
        t.states.push_back(state);
        t.inputs.push_back(u);
        if (options.reference) t.reference.push_back(xref);
    };

    for (int k = 0; k <= steps; ++k) {
        for (const auto& ev : gain_switches)
            if (ev.time == k) gain = ev.K;
        for (const auto& ev : groundings) {
            if (ev.time != k) continue;
            for (int v : ev.nodes) {
                NodeMode& m = mode[v - 1];
                m.grounded = true;
                m.form = ev.form;
                if (ev.form == GroundingForm::FixState)
                    m.fixed = ev.c_bar ? *ev.c_bar : Eigen::VectorXd(X.row(v - 1));
                if (ev.form == GroundingForm::CutInput && ev.A_bar) m.a_bar = &*ev.A_bar;
                if (ev.form == GroundingForm::Takeover) {
                    m.k1 = &*ev.K1;
                    m.c1 = ev.c1;
                }
                if (ev.form == GroundingForm::FixState) X.row(v - 1) = m.fixed.transpose();
            }
        }

        t.deviation.push_back(max_pairwise_deviation(X));
        const bool last = (k == steps);
        const bool log_now = last || (k % t.log_stride == 0);

        if (last) {
            if (log_now) log_state(k, X, Eigen::MatrixXd::Zero(N, 1));
            break;
        }

        // u_i = -K (L x)_i + disturbance, for non-grounded nodes
        Eigen::MatrixXd U = Eigen::MatrixXd::Zero(N, 1);
        Eigen::MatrixXd Xn(N, n);
        for (int v = 1; v <= N; ++v) {
            const NodeMode& m = mode[v - 1];
            if (m.grounded) continue;
            Eigen::VectorXd lx = X.row(v - 1).transpose();
            double w = 1.0 / g.degree(v);
            for (int nb : g.neighbors(v)) lx -= w * X.row(nb - 1).transpose();
            double u = -gain.dot(lx);
            for (const auto& ev : disturbances)
                if (k >= ev.begin && k < ev.end &&
                    std::find(ev.nodes.begin(), ev.nodes.end(), v) != ev.nodes.end())
                    u += ev.offset;
            U(v - 1, 0) = u;
            Xn.row(v - 1) = (A * X.row(v - 1).transpose() + B * u).transpose();
        }
        for (int v = 1; v <= N; ++v) {
            const NodeMode& m = mode[v - 1];
            if (!m.grounded) continue;
            switch (m.form) {
                case GroundingForm::FixState:
                    Xn.row(v - 1) = m.fixed.transpose();
                    break;
                case GroundingForm::CutInput: {
                    const Eigen::MatrixXd& Ab = m.a_bar ? *m.a_bar : A;
                    Xn.row(v - 1) = (Ab * X.row(v - 1).transpose()).transpose();
                    break;
                }
                case GroundingForm::Takeover: {
                    double u = -m.k1->dot(X.row(v - 1)) + m.c1;
                    U(v - 1, 0) = u;
                    Xn.row(v - 1) = (A * X.row(v - 1).transpose() + B * u).transpose();
                    break;
                }
            }
        }
        if (log_now) log_state(k, X, U);
        X = std::move(Xn);
        if (options.reference) {
            const auto& ref = *options.reference;
            xref = (A - B * ref.K_ref) * xref + B * ref.c1;
        }
    }
    return t;
}

Eigen::MatrixXd steady_state(const Graph& g, const AgentDynamics& dyn,
                             const Eigen::RowVectorXd& K, const GroundingEvent& event) {
    const int N = g.node_count();
    const int n = dyn.order();
    const Eigen::MatrixXd& A = dyn.A();
    const Eigen::VectorXd& B = dyn.B();
    std::set<int> gset(event.nodes.begin(), event.nodes.end());
    if (gset.empty() || static_cast<int>(gset.size()) >= N)
        throw std::invalid_argument("grounded set must be a nonempty proper subset");

    Eigen::VectorXd leader_limit;
    switch (event.form) {
        case GroundingForm::FixState:
            if (!event.c_bar) throw std::invalid_argument("FixState steady state needs c_bar");
            leader_limit = *event.c_bar;
            break;
        case GroundingForm::Takeover: {
            if (!event.K1) throw std::invalid_argument("Takeover needs K1");
            Eigen::MatrixXd Acl = A - B * *event.K1;
            if (!is_schur(Acl)) throw NoSteadyStateError("A - B K1 is not Schur");
            leader_limit = (Eigen::MatrixXd::Identity(n, n) - Acl)
                               .colPivHouseholderQr()
                               .solve(B * event.c1);
            break;
        }
        case GroundingForm::CutInput:
            throw std::invalid_argument("CutInput has no constant steady state in general");
    }

    std::vector<int> grounded(gset.begin(), gset.end());
    GroundedSpectrum spec = grounded_laplacian(g, grounded);
    if (closed_loop_radius(dyn, K, spec.eigenvalues, false) >= 1.0 - 1e-12)
        throw NoSteadyStateError("grounded closed loop is not Schur");

    // Followers solve (I - (I (x) A - Lbar (x) BK)) y = (Lambda (x) BK)(1 (x) c)
    // with Lambda the total weight toward grounded nodes.
    const int m = static_cast<int>(spec.kept.size());
    Eigen::MatrixXd BK = B * K;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m * n, m * n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m * n);
    std::vector<int> row(N + 1, -1);
    for (int i = 0; i < m; ++i) row[spec.kept[i]] = i;
    for (int i = 0; i < m; ++i) {
        int v = spec.kept[i];
        double w = 1.0 / g.degree(v);
        double toward_grounded = 0.0;
        M.block(i * n, i * n, n, n) = A - BK;  // diagonal of Lbar is 1
        for (int nb : g.neighbors(v)) {
            if (row[nb] >= 0)
                M.block(i * n, row[nb] * n, n, n) += w * BK;
            else
                toward_grounded += w;
        }
        rhs.segment(i * n, n) = toward_grounded * BK * leader_limit;
    }
    Eigen::VectorXd y = (Eigen::MatrixXd::Identity(m * n, m * n) - M)
                            .colPivHouseholderQr()
                            .solve(rhs);

    Eigen::MatrixXd limit(N, n);
    for (int i = 0; i < m; ++i) limit.row(spec.kept[i] - 1) = y.segment(i * n, n).transpose();
    for (int v : grounded) limit.row(v - 1) = leader_limit.transpose();
    return limit;
}

ConsensusMetrics consensus_metrics(const Trajectory& t, double tol) {
    ConsensusMetrics m;
    m.deviation = t.deviation;
    for (double d : t.deviation) {
        m.peak_deviation = std::max(m.peak_deviation, d);
        if (d > kDivergenceThreshold) m.diverged = true;
    }
    if (!t.deviation.empty()) {
        m.final_deviation = t.deviation.back();
        int k = static_cast<int>(t.deviation.size());
        while (k > 0 && t.deviation[k - 1] < tol) --k;
        m.settling_step = (k == static_cast<int>(t.deviation.size())) ? -1 : k;
    }
    return m;
}

}  // namespace gcons
