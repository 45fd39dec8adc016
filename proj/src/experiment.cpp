#include "gcons/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "gcons/countermeasure.hpp"
#include "gcons/graph.hpp"
#include "gcons/sim.hpp"
#include "gcons/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gcons {

namespace {

constexpr const char* kToolVersion = "gcons 0.1.0";

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double rand_u01(std::mt19937_64& rng) {
    return (rng() >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
}

double rand_normal(std::mt19937_64& rng) {
    // Box-Muller; avoids distribution-implementation differences.
    double u1 = rand_u01(rng);
    double u2 = rand_u01(rng);
    while (u1 <= 1e-300) u1 = rand_u01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

class CsvFile {
public:
    CsvFile(const fs::path& path, const std::string& hash, std::uint64_t seed)
        : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
        out_ << "# config_hash=" << hash << " seed=" << seed << "\n";
    }
    void header(const std::vector<std::string>& cols) { row_of_strings(cols); }
    void row_of_strings(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

json default_config() {
    return json{
        {"kind", ""},
        {"out", "out"},
        {"seed", 1},
        {"graph",
         {{"n", 20}, {"d", 6}, {"c_prime", 0.0}, {"file", ""}, {"count", 1},
          {"max_rejections", 200}}},
        {"dynamics", {{"A", {{1.0, 1.0}, {0.0, 1.0}}}, {"B", {0.0, 1.0}}}},
        {"design",
         {{"R", 1.0}, {"c_prime", 0.3}, {"sigma", nullptr}, {"epsilon", nullptr},
          {"K", nullptr}}},
        {"simulate",
         {{"steps", 500},
          {"tol", 1e-6},
          {"log_stride", 1},
          {"x0", {{"mode", "random"}, {"scale", 1.0}, {"c1", 1.0}, {"values", nullptr}}},
          {"grounding", json::array()},
          {"disturbance", json::array()},
          {"gain_switch", json::array()},
          {"reference", {{"enabled", false}, {"c1", 1.0}}}}},
        {"select", {{"grounded", {1}}}},
        {"recover",
         {{"grounded", {1}},
          {"strategy", "best"},
          {"target", {{"kind", "lambda2"}, {"value", 0.0}}}}},
        {"compare",
         {{"seeds", 10},
          {"strategies", {"best", "algorithm2", "random", "worst"}},
          {"target", {{"kind", "lambda2"}, {"value", 0.0}}},
          {"grounded", {1}}}},
        {"scan", {{"n_values", {10, 20, 50, 100}}, {"graphs_per_n", 20}}},
    };
}

AgentDynamics parse_dynamics(const json& cfg) {
    const json& d = cfg.at("dynamics");
    auto rows = d.at("A").get<std::vector<std::vector<double>>>();
    int n = static_cast<int>(rows.size());
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n) throw ConfigError("dynamics.A must be square");
        for (int j = 0; j < n; ++j) A(i, j) = rows[i][j];
    }
    auto bvec = d.at("B").get<std::vector<double>>();
    if (static_cast<int>(bvec.size()) != n) throw ConfigError("dynamics.B must have n entries");
    Eigen::VectorXd B(n);
    for (int i = 0; i < n; ++i) B(i) = bvec[i];
    try {
        return AgentDynamics(A, B);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("dynamics: ") + e.what());
    }
}

Graph load_or_generate_graph(const json& cfg, std::uint64_t seed) {
    const json& gc = cfg.at("graph");
    std::string file = gc.value("file", "");
    if (!file.empty()) return read_graph(file);
    int n = gc.at("n").get<int>();
    int d = gc.at("d").get<int>();
    double cp = gc.value("c_prime", 0.0);
    if (cp > 0.0)
        return generate_expander(n, d, cp, seed, gc.value("max_rejections", 200)).graph;
    return generate_regular(n, d, seed);
}

GainDesign design_from_config(const json& cfg, const AgentDynamics& dyn) {
    const json& dc = cfg.at("design");
    std::optional<double> sigma, epsilon;
    if (!dc.at("sigma").is_null()) sigma = dc.at("sigma").get<double>();
    if (!dc.at("epsilon").is_null()) epsilon = dc.at("epsilon").get<double>();
    return design_gain(dyn, dc.at("c_prime").get<double>(), dc.at("R").get<double>(), sigma,
                       epsilon);
}

Eigen::RowVectorXd gain_from_config(const json& cfg, const AgentDynamics& dyn) {
    const json& dc = cfg.at("design");
    if (dc.contains("K") && !dc.at("K").is_null()) {
        auto kv = dc.at("K").get<std::vector<double>>();
        if (static_cast<int>(kv.size()) != dyn.order())
            throw ConfigError("design.K dimension mismatch");
        Eigen::RowVectorXd K(kv.size());
        for (std::size_t i = 0; i < kv.size(); ++i) K(i) = kv[i];
        return K;
    }
    return design_from_config(cfg, dyn).K;
}

GroundingForm parse_form(const std::string& s) {
    if (s == "fix_state") return GroundingForm::FixState;
    if (s == "cut_input") return GroundingForm::CutInput;
    if (s == "takeover") return GroundingForm::Takeover;
    throw ConfigError("unknown grounding form: " + s);
}

Strategy parse_strategy(const std::string& s) {
    if (s == "best") return Strategy::Best;
    if (s == "algorithm1") return Strategy::Algorithm1;
    if (s == "algorithm2") return Strategy::Algorithm2;
    if (s == "random") return Strategy::Random;
    if (s == "worst") return Strategy::Worst;
    throw ConfigError("unknown strategy: " + s);
}

RecoveryTarget parse_target(const json& t) {
    RecoveryTarget target;
    std::string kind = t.at("kind").get<std::string>();
    if (kind == "lambda2")
        target.kind = RecoveryTarget::Kind::Lambda2OfGraph;
    else if (kind == "connectivity")
        target.kind = RecoveryTarget::Kind::Connectivity;
    else if (kind == "eq4")
        target.kind = RecoveryTarget::Kind::Eq4Margin;
    else
        throw ConfigError("unknown recovery target kind: " + kind);
    target.value = t.value("value", 0.0);
    return target;
}

struct Context {
    json config;
    std::string hash;
    std::uint64_t seed;
    fs::path out;
    std::vector<std::string> files;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    fs::path file(const std::string& name) {
        files.push_back(name);
        return out / name;
    }
    void write_manifest(const std::string& kind) {
        json manifest{{"tool", kToolVersion},
                      {"kind", kind},
                      {"seed", seed},
                      {"config_hash", hash},
                      {"config", config},
                      {"files", files},
                      {"elapsed_ms",
                       std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count()}};
        std::ofstream m(out / "manifest.json");
        m << manifest.dump(2) << "\n";
    }
};

void run_generate(Context& ctx) {
    const json& gc = ctx.config.at("graph");
    int count = gc.value("count", 1);
    std::mt19937_64 seeder(ctx.seed);
    CsvFile csv(ctx.file("spectra.csv"), ctx.hash, ctx.seed);
    csv.header({"index", "graph_seed", "n", "d", "lambda2", "lambdaN", "eigenratio",
                "rejections"});
    for (int i = 0; i < count; ++i) {
        std::uint64_t gs = seeder();
        int rejections = 0;
        Graph g = [&] {
            double cp = gc.value("c_prime", 0.0);
            if (cp > 0.0) {
                ExpanderResult r = generate_expander(gc.at("n").get<int>(), gc.at("d").get<int>(),
                                                     cp, gs, gc.value("max_rejections", 200));
                rejections = r.rejections;
                return r.graph;
            }
            return generate_regular(gc.at("n").get<int>(), gc.at("d").get<int>(), gs);
        }();
        char name[64];
        std::snprintf(name, sizeof(name), "graph_%03d.txt", i);
        {
            std::ofstream gout(ctx.out / name);
            gout << "# config_hash=" << ctx.hash << " seed=" << ctx.seed << "\n";
        }
        // append edges after the provenance comment
        {
            std::ofstream gout(ctx.out / name, std::ios::app);
            gout << g.node_count() << " " << g.declared_degree() << "\n";
            for (auto [a, b] : g.edges()) gout << a << " " << b << "\n";
        }
        ctx.files.push_back(name);
        SpectralSummary s = spectral_summary(g);
        csv.row_of_strings({std::to_string(i), std::to_string(gs),
                            std::to_string(g.node_count()), std::to_string(g.declared_degree()),
                            fmt(s.lambda2), fmt(s.lambdaN), fmt(s.eigenratio),
                            std::to_string(rejections)});
    }
}

void run_spectral(Context& ctx) {
    Graph g = load_or_generate_graph(ctx.config, ctx.seed);
    SpectralSummary s = spectral_summary(g);
    {
        CsvFile csv(ctx.file("eigenvalues.csv"), ctx.hash, ctx.seed);
        csv.header({"index", "value"});
        for (int i = 0; i < s.eigenvalues.size(); ++i)
            csv.row_of_strings({std::to_string(i + 1), fmt(s.eigenvalues(i))});
    }
    json summary{{"n", g.node_count()},         {"d_max", g.max_degree()},
                 {"d_min", g.min_degree()},     {"lambda2", s.lambda2},
                 {"lambdaN", s.lambdaN},        {"eigenratio", s.eigenratio},
                 {"connected", g.connected()}};
    double cp = ctx.config.at("graph").value("c_prime", 0.0);
    if (cp > 0.0) summary["meets_c_prime"] = s.meets(cp);
    ThresholdSizes th = threshold_sizes(cp > 0.0 ? cp : 0.3, g.max_degree(), g.min_degree());
    summary["threshold_n_bar"] = th.n_bar;
    summary["threshold_n_tilde"] = th.n_tilde;
    auto grounded = ctx.config.at("select").at("grounded").get<std::vector<int>>();
    if (!grounded.empty() && static_cast<int>(grounded.size()) < g.node_count()) {
        GroundedSpectrum gs = grounded_laplacian(g, grounded);
        CsvFile csv(ctx.file("grounded_eigenvalues.csv"), ctx.hash, ctx.seed);
        csv.header({"index", "value"});
        for (int i = 0; i < gs.eigenvalues.size(); ++i)
            csv.row_of_strings({std::to_string(i + 1), fmt(gs.eigenvalues(i))});
        summary["grounded"] = grounded;
        summary["grounded_lambda1"] = gs.lambda1();
        summary["grounded_radius"] = gs.radius();
        summary["grounded_eigenratio"] = gs.eigenratio();
        summary["lambda1_bound"] = grounded_connectivity_bound(
            g.node_count(), g.max_degree(), g.min_degree(),
            static_cast<int>(grounded.size()),
            grounded.size() == 1 ? std::optional<int>(g.degree(grounded[0])) : std::nullopt);
    }
    std::ofstream sm(ctx.file("summary.json"));
    sm << summary.dump(2) << "\n";
}

void run_design(Context& ctx) {
    AgentDynamics dyn = parse_dynamics(ctx.config);
    GainDesign d = design_from_config(ctx.config, dyn);
    CsvFile csv(ctx.file("gain.csv"), ctx.hash, ctx.seed);
    std::vector<std::string> cols;
    for (int i = 0; i < d.K.size(); ++i) cols.push_back("K" + std::to_string(i + 1));
    for (const char* c : {"sigma", "epsilon", "R", "c_prime", "sigma_tilde", "mari_margin"})
        cols.push_back(c);
    csv.header(cols);
    std::vector<std::string> row;
    for (int i = 0; i < d.K.size(); ++i) row.push_back(fmt(d.K(i)));
    for (double v : {d.sigma, d.epsilon, d.R, d.c_prime, d.sigma_tilde, d.mari_margin})
        row.push_back(fmt(v));
    csv.row_of_strings(row);
}

void run_simulate(Context& ctx) {
    const json& sc = ctx.config.at("simulate");
    Graph g = load_or_generate_graph(ctx.config, ctx.seed);
    AgentDynamics dyn = parse_dynamics(ctx.config);
    Eigen::RowVectorXd K = gain_from_config(ctx.config, dyn);
    const int N = g.node_count();
    const int n = dyn.order();

    // initial states
    const json& x0c = sc.at("x0");
    Eigen::MatrixXd x0(N, n);
    std::string mode = x0c.at("mode").get<std::string>();
    if (mode == "zero") {
        x0.setZero();
    } else if (mode == "random") {
        std::mt19937_64 rng(ctx.seed ^ 0x9e3779b97f4a7c15ULL);
        double scale = x0c.value("scale", 1.0);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < n; ++j) x0(i, j) = scale * rand_normal(rng);
    } else if (mode == "steady") {
        // every node starts at the takeover setpoint c0 for the given c1
        double c1 = x0c.value("c1", 1.0);
        Eigen::MatrixXd Acl = dyn.A() - dyn.B() * K;
        if (!is_schur(Acl)) throw ConfigError("x0 mode 'steady' needs A - BK Schur");
        Eigen::VectorXd c0 = (Eigen::MatrixXd::Identity(n, n) - Acl)
                                 .colPivHouseholderQr()
                                 .solve(dyn.B() * c1);
        for (int i = 0; i < N; ++i) x0.row(i) = c0.transpose();
    } else if (mode == "values") {
        auto vals = x0c.at("values").get<std::vector<std::vector<double>>>();
        if (static_cast<int>(vals.size()) != N) throw ConfigError("x0.values needs N rows");
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < n; ++j) x0(i, j) = vals[i][j];
    } else {
        throw ConfigError("unknown x0 mode: " + mode);
    }

    std::vector<GroundingEvent> groundings;
    for (const json& ge : sc.at("grounding")) {
        GroundingEvent ev;
        ev.time = ge.at("time").get<int>();
        ev.nodes = ge.at("nodes").get<std::vector<int>>();
        ev.form = parse_form(ge.at("form").get<std::string>());
        if (ge.contains("c_bar") && !ge.at("c_bar").is_null()) {
            auto cb = ge.at("c_bar").get<std::vector<double>>();
            ev.c_bar = Eigen::Map<Eigen::VectorXd>(cb.data(), cb.size()).eval();
        }
        if (ge.contains("a_bar") && !ge.at("a_bar").is_null()) {
            auto rows = ge.at("a_bar").get<std::vector<std::vector<double>>>();
            Eigen::MatrixXd Ab(rows.size(), rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i)
                for (std::size_t j = 0; j < rows.size(); ++j) Ab(i, j) = rows[i][j];
            ev.A_bar = Ab;
        }
        if (ev.form == GroundingForm::Takeover) {
            if (ge.contains("k1") && !ge.at("k1").is_null()) {
                auto kv = ge.at("k1").get<std::vector<double>>();
                ev.K1 = Eigen::Map<Eigen::RowVectorXd>(kv.data(), kv.size()).eval();
            } else {
                ev.K1 = K;  // reuse the consensus gain as the leader controller
            }
            ev.c1 = ge.value("c1", 0.0);
        }
        groundings.push_back(std::move(ev));
    }

    std::vector<DisturbanceEvent> disturbances;
    for (const json& de : sc.at("disturbance"))
        disturbances.push_back({de.at("begin").get<int>(), de.at("end").get<int>(),
                                de.at("nodes").get<std::vector<int>>(),
                                de.at("offset").get<double>()});

    std::vector<GainSwitchEvent> switches;
    for (const json& se : sc.at("gain_switch")) {
        GainSwitchEvent ev;
        ev.time = se.at("time").get<int>();
        if (se.value("redesign", false)) {
            std::set<int> grounded_by_then;
            for (const auto& gev : groundings)
                if (gev.time <= ev.time)
                    grounded_by_then.insert(gev.nodes.begin(), gev.nodes.end());
            if (grounded_by_then.empty())
                throw ConfigError("gain_switch.redesign needs prior grounding events");
            ev.K = redesign_after_grounding(
                       g, {grounded_by_then.begin(), grounded_by_then.end()}, dyn,
                       ctx.config.at("design").at("R").get<double>())
                       .K;
        } else {
            auto kv = se.at("K").get<std::vector<double>>();
            ev.K = Eigen::Map<Eigen::RowVectorXd>(kv.data(), kv.size()).eval();
        }
        switches.push_back(std::move(ev));
    }

    SimOptions options;
    options.log_stride = sc.value("log_stride", 1);
    if (sc.at("reference").value("enabled", false))
        options.reference =
            ReferenceSpec{K, sc.at("reference").value("c1", 1.0), Eigen::VectorXd::Zero(n)};

    Trajectory t =
        simulate(g, dyn, K, x0, sc.at("steps").get<int>(), groundings, disturbances, switches,
                 options);
    ConsensusMetrics metrics = consensus_metrics(t, sc.value("tol", 1e-6));

    {
        CsvFile csv(ctx.file("trajectory.csv"), ctx.hash, ctx.seed);
        std::vector<std::string> cols{"k", "node"};
        for (int j = 0; j < n; ++j) cols.push_back("x" + std::to_string(j + 1));
        cols.push_back("deviation");
        csv.header(cols);
        for (std::size_t s = 0; s < t.states.size(); ++s) {
            int k = t.logged_steps[s];
            for (int v = 1; v <= N; ++v) {
                std::vector<std::string> row{std::to_string(k), std::to_string(v)};
                for (int j = 0; j < n; ++j) row.push_back(fmt(t.states[s](v - 1, j)));
                row.push_back(fmt(t.deviation[k]));
                csv.row_of_strings(row);
            }
        }
    }
    {
        CsvFile csv(ctx.file("deviation.csv"), ctx.hash, ctx.seed);
        csv.header({"k", "deviation"});
        for (std::size_t k = 0; k < t.deviation.size(); ++k)
            csv.row_of_strings({std::to_string(k), fmt(t.deviation[k])});
    }
    if (options.reference) {
        CsvFile csv(ctx.file("reference.csv"), ctx.hash, ctx.seed);
        std::vector<std::string> cols{"k"};
        for (int j = 0; j < n; ++j) cols.push_back("xref" + std::to_string(j + 1));
        csv.header(cols);
        for (std::size_t s = 0; s < t.reference.size(); ++s) {
            std::vector<std::string> row{std::to_string(t.logged_steps[s])};
            for (int j = 0; j < n; ++j) row.push_back(fmt(t.reference[s](j)));
            csv.row_of_strings(row);
        }
    }
    {
        json events{{"config_hash", ctx.hash},
                    {"seed", ctx.seed},
                    {"grounding", sc.at("grounding")},
                    {"disturbance", sc.at("disturbance")},
                    {"gain_switch_times", json::array()},
                    {"gain", std::vector<double>(K.begin(), K.end())}};
        for (const auto& sw : switches) {
            events["gain_switch_times"].push_back(sw.time);
            events["gain_after_switch"] =
                std::vector<double>(sw.K.begin(), sw.K.end());
        }
        std::ofstream ev(ctx.file("events.json"));
        ev << events.dump(2) << "\n";
    }
    {
        json m{{"config_hash", ctx.hash},
               {"seed", ctx.seed},
               {"settling_step", metrics.settling_step},
               {"diverged", metrics.diverged},
               {"peak_deviation", metrics.peak_deviation},
               {"final_deviation", metrics.final_deviation}};
        std::ofstream ms(ctx.file("metrics.json"));
        ms << m.dump(2) << "\n";
    }
}

void run_select(Context& ctx) {
    Graph g = load_or_generate_graph(ctx.config, ctx.seed);
    auto grounded = ctx.config.at("select").at("grounded").get<std::vector<int>>();
    BestNodeResult best = exhaustive_best_node(g, grounded);
    ScoreSelection sel = score_selection(g, grounded);
    LayerCandidates lc =
        grounded.size() == 1 ? layer_candidates(g, grounded[0]) : LayerCandidates{};

    CsvFile csv(ctx.file("selection.csv"), ctx.hash, ctx.seed);
    csv.header({"node", "layer", "lambda1_double_grounded", "psi", "psi_tilde", "score",
                "exhaustive_best", "algorithm2_choice"});
    for (std::size_t i = 0; i < sel.scores.kept.size(); ++i) {
        int v = sel.scores.kept[i];
        double lam = 0.0;
        for (const auto& [node, val] : best.all)
            if (node == v) lam = val;
        csv.row_of_strings({std::to_string(v), std::to_string(sel.scores.layer[i]), fmt(lam),
                            fmt(sel.scores.psi[i]), fmt(sel.scores.psi_tilde[i]),
                            fmt(sel.scores.score[i]), v == best.node ? "1" : "0",
                            v == sel.node ? "1" : "0"});
    }
    json summary{{"config_hash", ctx.hash},
                 {"seed", ctx.seed},
                 {"exhaustive_best", best.node},
                 {"exhaustive_best_lambda1", best.lambda1},
                 {"algorithm2_choice", sel.node},
                 {"ell", sel.scores.ell},
                 {"layer_candidates", lc.nodes},
                 {"layer_degenerate", lc.degenerate}};
    std::ofstream sm(ctx.file("selection_summary.json"));
    sm << summary.dump(2) << "\n";
}

void write_recovery_csv(Context& ctx, const std::string& name, const RecoveryReport& rep) {
    CsvFile csv(ctx.file(name), ctx.hash, ctx.seed);
    csv.header({"step", "node", "lambda1_bar", "radius_bar", "eigenratio_bar",
                "incremental_ratio"});
    for (std::size_t i = 0; i < rep.steps.size(); ++i) {
        const RecoveryStep& s = rep.steps[i];
        csv.row_of_strings({std::to_string(i), std::to_string(s.node), fmt(s.lambda1),
                            fmt(s.radius), fmt(s.eigenratio), fmt(s.incremental_ratio)});
    }
}

void run_recover(Context& ctx) {
    Graph g = load_or_generate_graph(ctx.config, ctx.seed);
    const json& rc = ctx.config.at("recover");
    RecoveryReport rep = recover_by_grounding(
        g, rc.at("grounded").get<std::vector<int>>(), parse_target(rc.at("target")),
        parse_strategy(rc.at("strategy").get<std::string>()), ctx.seed);
    write_recovery_csv(ctx, "recovery.csv", rep);
    json summary{{"config_hash", ctx.hash},        {"seed", ctx.seed},
                 {"strategy", strategy_name(rep.strategy)},
                 {"nodes_needed", rep.nodes_needed}, {"reached", rep.reached},
                 {"grounded_sequence", rep.grounded_sequence}};
    std::ofstream sm(ctx.file("recovery_summary.json"));
    sm << summary.dump(2) << "\n";
}

void run_compare(Context& ctx) {
    const json& cc = ctx.config.at("compare");
    ComparisonConfig config;
    config.n = ctx.config.at("graph").at("n").get<int>();
    config.d = ctx.config.at("graph").at("d").get<int>();
    config.c_prime = ctx.config.at("graph").value("c_prime", 0.0);
    config.seeds = cc.at("seeds").get<int>();
    config.master_seed = ctx.seed;
    config.target = parse_target(cc.at("target"));
    config.initial_grounded = cc.at("grounded").get<std::vector<int>>();
    config.strategies.clear();
    for (const json& s : cc.at("strategies"))
        config.strategies.push_back(parse_strategy(s.get<std::string>()));

    ComparisonTable table = strategy_comparison(config);

    {
        CsvFile csv(ctx.file("comparison.csv"), ctx.hash, ctx.seed);
        csv.header({"graph_seed", "strategy", "nodes_needed", "percent", "reached"});
        for (const auto& row : table.rows)
            csv.row_of_strings({std::to_string(row.seed), strategy_name(row.strategy),
                                std::to_string(row.nodes_needed), fmt(row.percent),
                                row.reached ? "1" : "0"});
    }
    {
        // raw per-seed ratios so the plotted means are recomputable
        CsvFile csv(ctx.file("ratios.csv"), ctx.hash, ctx.seed);
        csv.header({"graph_seed", "strategy", "step", "incremental_ratio"});
        for (const auto& row : table.rows)
            for (std::size_t i = 0; i < row.incremental_ratios.size(); ++i)
                csv.row_of_strings({std::to_string(row.seed), strategy_name(row.strategy),
                                    std::to_string(i + 1), fmt(row.incremental_ratios[i])});
    }
    {
        CsvFile csv(ctx.file("ratios_mean.csv"), ctx.hash, ctx.seed);
        csv.header({"strategy", "step", "mean_incremental_ratio"});
        for (Strategy s : config.strategies) {
            auto means = table.mean_incremental_ratios(s);
            for (std::size_t i = 0; i < means.size(); ++i)
                csv.row_of_strings({strategy_name(s), std::to_string(i + 1), fmt(means[i])});
        }
    }
    {
        // wall-clock measurements; the one output that is not reproducible
        CsvFile csv(ctx.file("timing.csv"), ctx.hash, ctx.seed);
        csv.header({"strategy", "mean_elapsed_ms"});
        for (Strategy s : config.strategies)
            csv.row_of_strings({strategy_name(s), fmt(table.mean_elapsed_ms(s))});
    }
    json summary{{"config_hash", ctx.hash}, {"seed", ctx.seed}};
    for (Strategy s : config.strategies)
        summary["mean_nodes_needed"][strategy_name(s)] = table.mean_nodes_needed(s);
    std::ofstream sm(ctx.file("comparison_summary.json"));
    sm << summary.dump(2) << "\n";
}

void run_scan(Context& ctx) {
    const json& sc = ctx.config.at("scan");
    auto n_values = sc.at("n_values").get<std::vector<int>>();
    int per_n = sc.at("graphs_per_n").get<int>();
    std::vector<int> d_values{ctx.config.at("graph").at("d").get<int>()};
    if (sc.contains("d_values") && !sc.at("d_values").is_null())
        d_values = sc.at("d_values").get<std::vector<int>>();
    double cp = ctx.config.at("graph").value("c_prime", 0.0);
    std::mt19937_64 seeder(ctx.seed);

    CsvFile csv(ctx.file("scan.csv"), ctx.hash, ctx.seed);
    csv.header({"n", "d", "graph_index", "graph_seed", "ell", "best_node", "best_layer",
                "best_in_top_two"});
    CsvFile sm(ctx.file("scan_summary.csv"), ctx.hash, ctx.seed);
    sm.header({"n", "d", "fraction_best_in_top_two", "mean_ell"});
    for (int n : n_values) {
        for (int d : d_values) {
            int hits = 0;
            double ell_sum = 0.0;
            for (int i = 0; i < per_n; ++i) {
                std::uint64_t gs = seeder();
                Graph g = cp > 0.0 ? generate_expander(n, d, cp, gs).graph
                                   : generate_regular(n, d, gs);
                LayerDecomposition ld = layer_decomposition(g, 1);
                BestNodeResult best = exhaustive_best_node(g, {1});
                int layer = ld.layer_of(best.node);
                bool top_two = layer >= ld.ell() - 1;
                hits += top_two;
                ell_sum += ld.ell();
                csv.row_of_strings({std::to_string(n), std::to_string(d), std::to_string(i),
                                    std::to_string(gs), std::to_string(ld.ell()),
                                    std::to_string(best.node), std::to_string(layer),
                                    top_two ? "1" : "0"});
            }
            sm.row_of_strings({std::to_string(n), std::to_string(d),
                               fmt(static_cast<double>(hits) / per_n), fmt(ell_sum / per_n)});
        }
    }
}

}  // namespace

std::string config_hash(const json& config) {
    std::string dump = config.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> validate_config(const json& config) {
    std::vector<std::string> violations;
    json cfg = default_config();
    cfg.merge_patch(config);

    const json& gc = cfg.at("graph");
    std::string file = gc.value("file", "");
    if (!file.empty() && !fs::exists(file))
        violations.push_back("graph.file does not exist: " + file);
    int n = gc.at("n").get<int>();
    int d = gc.at("d").get<int>();
    if (n < 3) violations.push_back("graph.n must be at least 3");
    if (d < 1 || d >= n) violations.push_back("graph.d must satisfy 1 <= d < n");
    if ((static_cast<long long>(n) * d) % 2 != 0)
        violations.push_back("graph parity: n*d must be even");
    double gcp = gc.value("c_prime", 0.0);
    if (gcp < 0.0 || gcp >= 2.0) violations.push_back("graph.c_prime must lie in [0, 2)");

    double sigma_tilde = 1.0;
    try {
        AgentDynamics dyn = parse_dynamics(cfg);
        sigma_tilde = dyn.sigma_tilde();
    } catch (const std::exception& e) {
        violations.push_back(e.what());
    }

    const json& dc = cfg.at("design");
    double cp = dc.at("c_prime").get<double>();
    double c_low = 2.0 * (1.0 - sigma_tilde) / (1.0 + sigma_tilde);
    if (!(cp > c_low && cp < 2.0)) {
        std::ostringstream msg;
        msg << "design.c_prime = " << cp << " outside the feasibility window (" << c_low
            << ", 2)";
        violations.push_back(msg.str());
    } else {
        double sigma_low = (2.0 - cp) / (2.0 + cp);
        if (!dc.at("sigma").is_null()) {
            double s = dc.at("sigma").get<double>();
            if (s < sigma_low || s >= sigma_tilde) {
                std::ostringstream msg;
                msg << "design.sigma = " << s << " outside [" << sigma_low << ", " << sigma_tilde
                    << ")";
                violations.push_back(msg.str());
            } else if (!dc.at("epsilon").is_null()) {
                double e = dc.at("epsilon").get<double>();
                double e_low = (1.0 - s) / cp, e_high = (1.0 + s) / 2.0;
                if (e < e_low || e > e_high) {
                    std::ostringstream msg;
                    msg << "design.epsilon = " << e << " outside [" << e_low << ", " << e_high
                        << "]";
                    violations.push_back(msg.str());
                }
            }
        }
        if (dc.at("R").get<double>() < 0.0) violations.push_back("design.R must be nonnegative");
    }
    return violations;
}

RunResult run_experiment(json user_config) {
    json config = default_config();
    config.merge_patch(user_config);
    std::string kind = config.at("kind").get<std::string>();
    if (kind.empty()) throw ConfigError("missing experiment kind");

    if (kind == "validate") {
        auto violations = validate_config(config);
        RunResult res;
        std::ostringstream msg;
        if (violations.empty()) {
            msg << "configuration valid\n";
        } else {
            for (const auto& v : violations) msg << "violation: " << v << "\n";
        }
        res.message = msg.str();
        return res;
    }

    Context ctx;
    ctx.config = config;
    ctx.hash = config_hash(config);
    ctx.seed = config.at("seed").get<std::uint64_t>();
    ctx.out = config.at("out").get<std::string>();
    fs::create_directories(ctx.out);

    if (kind == "generate")
        run_generate(ctx);
    else if (kind == "spectral")
        run_spectral(ctx);
    else if (kind == "design")
        run_design(ctx);
    else if (kind == "simulate")
        run_simulate(ctx);
    else if (kind == "select")
        run_select(ctx);
    else if (kind == "recover")
        run_recover(ctx);
    else if (kind == "compare")
        run_compare(ctx);
    else if (kind == "scan")
        run_scan(ctx);
    else
        throw ConfigError("unknown experiment kind: " + kind);

    ctx.write_manifest(kind);
    RunResult res;
    res.files = ctx.files;
    res.message = "wrote " + std::to_string(ctx.files.size()) + " artifacts to " +
                  ctx.out.string();
    return res;
}

int run_cli(int argc, char** argv) {
    std::string config_path, kind, out;
    long long seed = -1;
    std::vector<std::string> overrides;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        auto next = [&]() -> std::string {
            if (i + 1 >= argc) throw ConfigError("missing value for " + arg);
            return argv[++i];
        };
        if (arg == "--config") config_path = next();
        else if (arg == "--kind") kind = next();
        else if (arg == "--out") out = next();
        else if (arg == "--seed") seed = std::stoll(next());
        else if (arg == "--override") overrides.push_back(next());
        else if (arg == "--help" || arg == "-h") {
            std::cout << "usage: gcons [--config FILE] [--kind KIND] [--seed N] [--out DIR]\n"
                         "             [--override key.path=value]...\n"
                         "kinds: generate spectral design simulate select recover compare scan"
                         " validate\n";
            return 0;
        } else {
            std::cerr << "unknown argument: " << arg << "\n";
            return 2;
        }
    }

    try {
        json config = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot open config file " + config_path);
            try {
                in >> config;
            } catch (const json::exception& e) {
                throw ConfigError(std::string("config parse error: ") + e.what());
            }
        }
        if (!kind.empty()) config["kind"] = kind;
        if (seed >= 0) config["seed"] = seed;
        if (!out.empty()) config["out"] = out;
        for (const auto& ov : overrides) {
            auto eq = ov.find('=');
            if (eq == std::string::npos)
                throw ConfigError("override must look like key.path=value: " + ov);
            std::string path = "/" + ov.substr(0, eq);
            for (auto& c : path)
                if (c == '.') c = '/';
            std::string value = ov.substr(eq + 1);
            json parsed;
            try {
                parsed = json::parse(value);
            } catch (const json::exception&) {
                parsed = value;  // plain string
            }
            config[json::json_pointer(path)] = parsed;
        }
        RunResult res = run_experiment(config);
        if (!res.message.empty()) std::cout << res.message;
        std::cout.flush();
        return res.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace gcons
