#pragma once
// Oracle benchmark orchestration: N repetitions per scenario per agent,
// the four accuracy metrics, and the attached faithfulness report.
//
// RCA and impact accuracy are computed over completed runs only;
// investigation accuracy over all runs. Accuracy is exact set equality on
// ids. Average duration covers all runs, failed ones included.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "causeway/agent.hpp"
#include "causeway/analyzer.hpp"
#include "causeway/corpus.hpp"
#include "causeway/scenario.hpp"
#include "causeway/session.hpp"

namespace causeway {

struct BenchmarkConfig {
    std::string agent_name = "reference";
    std::vector<Scenario> scenarios;  // see load_benchmark_scenarios
    int repetitions = 10;
    std::uint64_t seed = 0;  // recorded for provenance
    std::string out_dir;     // empty: nothing persisted
    int parallelism = 1;
};

// scenario_set: "builtin" or a directory of scenario files.
inline Result<std::vector<Scenario>> load_benchmark_scenarios(const std::string& scenario_set) {
    if (scenario_set == "builtin") return builtin_scenarios();
    return load_scenarios_from_dir(scenario_set);
}

struct RunScore {
    bool completed = false;
    bool rca_correct = false;
    bool impact_correct = false;
    double duration_seconds = 0.0;
};

// Exact-set scoring; failed runs score neither RCA nor impact.
inline RunScore score_run(const RunResult& run, const GroundTruth& truth) {
    RunScore score;
    score.duration_seconds = run.duration_seconds;
    if (run.outcome != RunResult::Outcome::Completed || !run.publish) return score;
    score.completed = true;
    score.rca_correct = sorted_unique(run.publish->root_cause_ids) == truth.root_cause_ids;
    score.impact_correct =
        sorted_unique(run.publish->impacted_party_ids) == truth.impacted_party_ids;
    return score;
}

// Ground truth rebuilt from the graph alone: the resources in sigma of the
// incident service whose evidence incriminates them, and the parties their
// impact reaches. Independent of the scenario's stored ground-truth block.
inline Result<GroundTruth> recompute_ground_truth(const Scenario& s,
                                                  const EvidenceKeywords& kw = {}) {
    auto svc = incident_service_id(s.graph, s.incident_text);
    if (!svc) return svc.error();
    auto scope = s.graph.sigma(svc.value());
    if (!scope) return scope.error();
    GroundTruth truth;
    for (const std::string& r : scope.value()) {
        auto notes = s.graph.notes_of(r);
        auto events = s.graph.events_of(r);
        if (!notes) return notes.error();
        if (!events) return events.error();
        if (classify_evidence(r, notes.value(), events.value(), s.now, kw).is_root_cause)
            truth.root_cause_ids.push_back(r);
    }
    auto parties = impacted_parties(s.graph, truth.root_cause_ids);
    if (!parties) return parties.error();
    truth.impacted_party_ids = std::move(parties).take();
    return truth;
}

struct MetricRow {
    Fraction investigation;  // completed / all runs
    Fraction rca;            // correct / completed runs
    Fraction impact;         // correct / completed runs
    double avg_duration_seconds = 0.0;
};

struct BenchmarkReport {
    std::string agent_name;
    int repetitions = 0;
    std::uint64_t seed = 0;
    long long total_runs = 0;

    struct ScenarioMetrics {
        std::string scenario_id;
        std::string title;
        MetricRow row;
    };
    std::vector<ScenarioMetrics> per_scenario;
    MetricRow aggregate;
    FaithfulnessReport faithfulness;
};

using AgentFactory = std::function<std::unique_ptr<Agent>()>;

inline Result<BenchmarkReport> run_benchmark(const BenchmarkConfig& config,
                                             const AgentFactory& make_agent) {
    if (config.repetitions < 1)
        return make_error(Errc::malformed_arguments, "repetitions must be >= 1");
    if (config.scenarios.empty())
        return make_error(Errc::io_error, "no scenarios to benchmark");

    std::vector<Scenario> scenarios = config.scenarios;
    std::sort(scenarios.begin(), scenarios.end(),
              [](const Scenario& a, const Scenario& b) { return a.scenario_id < b.scenario_id; });
    std::vector<std::shared_ptr<const Scenario>> shared;
    for (Scenario& s : scenarios) shared.push_back(std::make_shared<const Scenario>(std::move(s)));

    const int reps = config.repetitions;
    const size_t total = shared.size() * static_cast<size_t>(reps);
    std::vector<RunResult> runs(total);

    // Runs share nothing but sealed graphs, so any degree of parallelism
    // yields the same results.
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t slot = next.fetch_add(1); slot < total; slot = next.fetch_add(1)) {
            const size_t si = slot / static_cast<size_t>(reps);
            const int rep = static_cast<int>(slot % static_cast<size_t>(reps));
            char label[16];
            std::snprintf(label, sizeof(label), "%03d", rep + 1);
            Session session(shared[si], shared[si]->scenario_id + "-" + label);
            auto agent = make_agent();
            runs[slot] = run_investigation(*agent, session);
        }
    };
    const int degree = std::max(1, config.parallelism);
    if (degree == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < degree; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    // Persist traces (and the scenario set, so the analyzer CLI can re-read
    // the corpus later).
    if (!config.out_dir.empty()) {
        const std::filesystem::path out(config.out_dir);
        std::vector<Scenario> copy;
        for (const auto& s : shared) copy.push_back(*s);
        if (auto r = export_scenarios(copy, out / "scenarios"); !r) return r.error();
        for (size_t slot = 0; slot < total; ++slot) {
            const size_t si = slot / static_cast<size_t>(reps);
            char label[16];
            std::snprintf(label, sizeof(label), "%03d",
                          static_cast<int>(slot % static_cast<size_t>(reps)) + 1);
            auto r = write_text_file(
                out / "traces" / trace_file_name(shared[si]->scenario_id, label),
                trace_to_jsonl(runs[slot].trace));
            if (!r) return r.error();
        }
    }

    BenchmarkReport report;
    report.agent_name = config.agent_name;
    report.repetitions = reps;
    report.seed = config.seed;
    report.total_runs = static_cast<long long>(total);

    auto add_run = [](MetricRow& row, const RunScore& score) {
        row.investigation.den += 1;
        row.avg_duration_seconds += score.duration_seconds;
        if (!score.completed) return;
        row.investigation.num += 1;
        row.rca.den += 1;
        row.impact.den += 1;
        if (score.rca_correct) row.rca.num += 1;
        if (score.impact_correct) row.impact.num += 1;
    };

    std::vector<TraceEntry> corpus;
    for (size_t si = 0; si < shared.size(); ++si) {
        MetricRow row;
        for (int rep = 0; rep < reps; ++rep) {
            const size_t slot = si * static_cast<size_t>(reps) + static_cast<size_t>(rep);
            const RunScore score = score_run(runs[slot], shared[si]->ground_truth);
            add_run(row, score);
            add_run(report.aggregate, score);
            char label[16];
            std::snprintf(label, sizeof(label), "%03d", rep + 1);
            corpus.push_back({shared[si]->scenario_id + "__" + label, shared[si]->scenario_id,
                              runs[slot].trace});
        }
        row.avg_duration_seconds /= reps;
        report.per_scenario.push_back({shared[si]->scenario_id, shared[si]->title, row});
    }
    report.aggregate.avg_duration_seconds /= static_cast<double>(total);

    std::vector<Scenario> copy;
    for (const auto& s : shared) copy.push_back(*s);
    auto faithfulness = analyze_corpus(std::move(corpus), copy);
    if (!faithfulness) return faithfulness.error();
    report.faithfulness = std::move(faithfulness).take();
    return report;
}

// ---------------------------------------------------------------------------
// Report serialization and rendering
// ---------------------------------------------------------------------------

inline nlohmann::json fraction_to_json(const Fraction& f) {
    return {{"num", f.num}, {"den", f.den}};
}

inline Fraction fraction_from_json(const nlohmann::json& j) {
    return {j.value("num", 0LL), j.value("den", 0LL)};
}

inline nlohmann::json metric_row_to_json(const MetricRow& row) {
    return {{"investigation", fraction_to_json(row.investigation)},
            {"rca", fraction_to_json(row.rca)},
            {"impact", fraction_to_json(row.impact)},
            {"avg_duration_seconds", row.avg_duration_seconds}};
}

inline MetricRow metric_row_from_json(const nlohmann::json& j) {
    MetricRow row;
    row.investigation = fraction_from_json(j["investigation"]);
    row.rca = fraction_from_json(j["rca"]);
    row.impact = fraction_from_json(j["impact"]);
    row.avg_duration_seconds = j.value("avg_duration_seconds", 0.0);
    return row;
}

inline nlohmann::json benchmark_report_to_json(const BenchmarkReport& r) {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& s : r.per_scenario)
        per.push_back({{"scenario_id", s.scenario_id},
                       {"title", s.title},
                       {"metrics", metric_row_to_json(s.row)}});
    return {{"agent", r.agent_name},
            {"repetitions", r.repetitions},
            {"seed", r.seed},
            {"total_runs", r.total_runs},
            {"per_scenario", per},
            {"aggregate", metric_row_to_json(r.aggregate)},
            {"faithfulness",
             {{"hallucination", fraction_to_json(r.faithfulness.hallucination)},
              {"compliance", fraction_to_json(r.faithfulness.compliance)},
              {"compliance_completed", fraction_to_json(r.faithfulness.compliance_completed)},
              {"misuse", fraction_to_json(r.faithfulness.misuse)},
              {"runs", r.faithfulness.runs},
              {"completed_runs", r.faithfulness.completed_runs}}}};
}

inline Result<BenchmarkReport> benchmark_report_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("aggregate") || !j.contains("per_scenario"))
        return make_error(Errc::parse_error, "not a benchmark report");
    BenchmarkReport r;
    r.agent_name = j.value("agent", "");
    r.repetitions = j.value("repetitions", 0);
    r.seed = j.value("seed", std::uint64_t{0});
    r.total_runs = j.value("total_runs", 0LL);
    for (const nlohmann::json& s : j["per_scenario"])
        r.per_scenario.push_back(
            {s.value("scenario_id", ""), s.value("title", ""), metric_row_from_json(s["metrics"])});
    r.aggregate = metric_row_from_json(j["aggregate"]);
    const nlohmann::json& f = j["faithfulness"];
    r.faithfulness.hallucination = fraction_from_json(f["hallucination"]);
    r.faithfulness.compliance = fraction_from_json(f["compliance"]);
    r.faithfulness.compliance_completed = fraction_from_json(f["compliance_completed"]);
    r.faithfulness.misuse = fraction_from_json(f["misuse"]);
    r.faithfulness.runs = f.value("runs", 0LL);
    r.faithfulness.completed_runs = f.value("completed_runs", 0LL);
    return r;
}

namespace detail {

inline std::string duration_cell(double seconds) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1fs", seconds);
    return buf;
}

inline void pad_row(std::ostringstream& out, const std::vector<std::string>& cells,
                    const std::vector<size_t>& widths) {
    for (size_t i = 0; i < cells.size(); ++i) {
        out << cells[i];
        if (i + 1 < cells.size())
            out << std::string(widths[i] > cells[i].size() ? widths[i] - cells[i].size() + 2 : 2,
                               ' ');
    }
    out << "\n";
}

inline void render_table(std::ostringstream& out, const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
    std::vector<size_t> widths;
    for (const std::string& h : header) widths.push_back(h.size());
    for (const auto& row : rows)
        for (size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    pad_row(out, header, widths);
    std::vector<std::string> rule;
    for (size_t w : widths) rule.push_back(std::string(w, '-'));
    pad_row(out, rule, widths);
    for (const auto& row : rows) pad_row(out, row, widths);
}

}  // namespace detail

// Human-readable tables: accuracy columns first, faithfulness columns after.
inline std::string render_benchmark_report(const BenchmarkReport& r) {
    std::ostringstream out;
    out << "Oracle benchmark: " << r.total_runs << " runs (" << r.repetitions
        << " per scenario), agent '" << r.agent_name << "', seed " << r.seed << "\n\n";
    if (r.total_runs == 0) {
        out << "No runs executed.\n";
        return out.str();
    }

    detail::render_table(
        out, {"Agent", "Investigation", "RCA", "Impact", "Avg Duration"},
        {{r.agent_name, r.aggregate.investigation.format(), r.aggregate.rca.format(),
          r.aggregate.impact.format(), detail::duration_cell(r.aggregate.avg_duration_seconds)}});
    out << "\nPer scenario:\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : r.per_scenario)
        rows.push_back({s.scenario_id, s.title, s.row.investigation.format(),
                        s.row.rca.format(), s.row.impact.format(),
                        detail::duration_cell(s.row.avg_duration_seconds)});
    detail::render_table(out, {"Scenario", "Title", "Investigation", "RCA", "Impact", "Avg"},
                         rows);

    out << "\nFaithfulness (compliance and misuse cover failed runs too):\n";
    detail::render_table(out, {"Agent", "Hallucination", "Protocol Compl.", "Tool Misuse"},
                         {{r.agent_name, r.faithfulness.hallucination.format(),
                           r.faithfulness.compliance.format(), r.faithfulness.misuse.format()}});
    out << "Compliance over completed runs only: "
        << r.faithfulness.compliance_completed.format() << "\n";
    return out.str();
}

}  // namespace causeway
