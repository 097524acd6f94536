#pragma once
// Static trace auditing: entity hallucination, protocol compliance, and
// tool misuse. Read-only and pure; the same corpus always yields the same
// report.
//
// Mentions are id-shaped tokens (svc-|res-|party-|evt-|note- followed by
// alphanumerics) harvested from agent messages and Publish arguments only.
// Ids inside tool results never count as mentions, and only ids from
// successful results ground later ones.

#include <algorithm>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "causeway/ontology.hpp"
#include "causeway/result.hpp"
#include "causeway/scenario.hpp"
#include "causeway/tool_catalog.hpp"
#include "causeway/trace.hpp"

namespace causeway {

// ---------------------------------------------------------------------------
// Entity mentions
// ---------------------------------------------------------------------------

struct Mention {
    std::string token;
    int record_index = 0;
    bool seen_in_prior_result = false;
};

struct MentionLedger {
    std::vector<Mention> mentions;
};

namespace detail {

inline const std::regex& id_token_pattern() {
    static const std::regex re("\\b(?:svc|res|party|evt|note)-[A-Za-z0-9]+");
    return re;
}

inline void scan_tokens(const std::string& text, std::set<std::string>& out) {
    for (auto it = std::sregex_iterator(text.begin(), text.end(), id_token_pattern());
         it != std::sregex_iterator(); ++it)
        out.insert(it->str());
}

}  // namespace detail

inline Result<MentionLedger> extract_entity_mentions(const Trace& trace) {
    MentionLedger ledger;
    std::set<std::string> returned;  // ids surfaced by successful tool results so far
    for (const TraceRecord& r : trace.records) {
        std::set<std::string> tokens;
        if (r.kind == RecordKind::agent_message) {
            detail::scan_tokens(r.text.value_or(""), tokens);
        } else if (r.kind == RecordKind::tool_call && r.tool == "Publish") {
            detail::scan_tokens(r.arguments.dump(), tokens);
        } else if (r.kind == RecordKind::tool_result && !r.error) {
            detail::scan_tokens(r.result.dump(), returned);
            continue;
        } else {
            continue;
        }
        for (const std::string& t : tokens)
            ledger.mentions.push_back({t, r.index, returned.count(t) != 0});
    }
    return ledger;
}

// GROUNDED iff the token names a graph entity or appeared in an earlier
// successful tool result.
inline bool mention_grounded(const Mention& m, const InfrastructureGraph& graph) {
    return m.seen_in_prior_result || graph.contains(m.token);
}

inline int count_hallucinations(const MentionLedger& ledger, const InfrastructureGraph& graph) {
    int n = 0;
    for (const Mention& m : ledger.mentions)
        if (!mention_grounded(m, graph)) ++n;
    return n;
}

// ---------------------------------------------------------------------------
// Protocol compliance (rules R1..R7)
// ---------------------------------------------------------------------------

struct ComplianceVerdict {
    struct Violation {
        std::string rule_id;
        std::string description;
        int record_index = 0;
    };
    bool compliant = true;
    std::vector<Violation> violations;
};

namespace detail {

struct PairedCall {
    int record_index = 0;
    std::string tool;
    nlohmann::json arguments;
    nlohmann::json result;
    bool succeeded = false;
};

inline Result<std::vector<PairedCall>> pair_calls(const Trace& trace) {
    std::vector<PairedCall> calls;
    std::optional<size_t> pending;
    for (const TraceRecord& r : trace.records) {
        if (r.kind == RecordKind::tool_call) {
            if (pending)
                return make_error(Errc::malformed_trace,
                                  "tool_call at index " + std::to_string(r.index) +
                                      " before the previous call resolved");
            calls.push_back({r.index, r.tool, r.arguments, {}, false});
            pending = calls.size() - 1;
        } else if (r.kind == RecordKind::tool_result) {
            if (!pending || calls[*pending].tool != r.tool)
                return make_error(Errc::malformed_trace, "tool_result at index " +
                                                             std::to_string(r.index) +
                                                             " without a matching call");
            calls[*pending].succeeded = !r.error.has_value();
            calls[*pending].result = r.result;
            pending.reset();
        }
    }
    return calls;
}

inline std::string string_field(const nlohmann::json& j, const char* key) {
    return j.is_object() && j.contains(key) && j[key].is_string() ? j[key].get<std::string>() : "";
}

inline std::set<std::string> result_ids(const nlohmann::json& result) {
    std::set<std::string> ids;
    if (result.is_array())
        for (const nlohmann::json& e : result)
            if (e.is_object() && e.contains("id") && e["id"].is_string())
                ids.insert(e["id"].get<std::string>());
    if (result.is_object() && result.contains("id") && result["id"].is_string())
        ids.insert(result["id"].get<std::string>());
    return ids;
}

}  // namespace detail

// R1 first tool call is LookupService.
// R2 GetImplementation follows a successful lookup and targets a service it
//    resolved; at least one such call exists.
// R3 every resource returned by GetImplementation gets both GetNotes and
//    GetEvents before Publish.
// R4 every published root cause received GetImpactedServices before Publish.
// R5 every service those impact calls returned received GetUsage before
//    Publish.
// R6 Publish happens exactly once, succeeds, and is the final call.
// R7 all evidence-phase calls precede all impact-phase calls.
inline Result<ComplianceVerdict> check_protocol_compliance(const Trace& trace) {
    auto paired = detail::pair_calls(trace);
    if (!paired) return paired.error();
    const std::vector<detail::PairedCall>& calls = paired.value();

    ComplianceVerdict verdict;
    auto violate = [&](const char* rule, std::string description, int index) {
        verdict.violations.push_back({rule, std::move(description), index});
    };

    if (calls.empty() || calls.front().tool != "LookupService")
        violate("R1", "first tool call must be LookupService",
                calls.empty() ? 0 : calls.front().record_index);

    size_t publish_pos = calls.size();  // first Publish call, else end
    for (size_t i = 0; i < calls.size(); ++i)
        if (calls[i].tool == "Publish") {
            publish_pos = i;
            break;
        }

    // R2
    {
        std::set<std::string> resolved;
        bool any_valid_implementation = false;
        for (const detail::PairedCall& c : calls) {
            if (c.tool == "LookupService" && c.succeeded) {
                auto ids = detail::result_ids(c.result);
                resolved.insert(ids.begin(), ids.end());
            } else if (c.tool == "GetImplementation") {
                const std::string target = detail::string_field(c.arguments, "service_id");
                if (!resolved.count(target))
                    violate("R2", "GetImplementation targets '" + target +
                                      "', which no prior successful lookup resolved",
                            c.record_index);
                else
                    any_valid_implementation = true;
            }
        }
        if (!any_valid_implementation)
            violate("R2", "no GetImplementation call follows a successful lookup", 0);
    }

    // R3
    {
        std::set<std::string> resources;
        for (size_t i = 0; i < publish_pos; ++i)
            if (calls[i].tool == "GetImplementation" && calls[i].succeeded) {
                auto ids = detail::result_ids(calls[i].result);
                resources.insert(ids.begin(), ids.end());
            }
        for (const std::string& r : resources) {
            for (const char* tool : {"GetNotes", "GetEvents"}) {
                bool covered = false;
                for (size_t i = 0; i < publish_pos; ++i)
                    if (calls[i].tool == tool && calls[i].succeeded &&
                        detail::string_field(calls[i].arguments, "resource_id") == r)
                        covered = true;
                if (!covered)
                    violate("R3", std::string("resource '") + r + "' never received " + tool, 0);
            }
        }
    }

    // R4 + R5
    {
        std::vector<std::string> published_roots;
        if (publish_pos < calls.size()) {
            const nlohmann::json& args = calls[publish_pos].arguments;
            if (args.is_object() && args.contains("root_cause_ids") &&
                args["root_cause_ids"].is_array())
                for (const nlohmann::json& v : args["root_cause_ids"])
                    if (v.is_string()) published_roots.push_back(v.get<std::string>());
        }
        std::set<std::string> impacted_services;
        for (const std::string& root : published_roots) {
            bool covered = false;
            for (size_t i = 0; i < publish_pos; ++i)
                if (calls[i].tool == "GetImpactedServices" && calls[i].succeeded &&
                    detail::string_field(calls[i].arguments, "resource_id") == root) {
                    covered = true;
                    auto ids = detail::result_ids(calls[i].result);
                    impacted_services.insert(ids.begin(), ids.end());
                }
            if (!covered)
                violate("R4", "published root cause '" + root +
                                  "' never received GetImpactedServices",
                        0);
        }
        for (const std::string& svc : impacted_services) {
            bool covered = false;
            for (size_t i = 0; i < publish_pos; ++i)
                if (calls[i].tool == "GetUsage" && calls[i].succeeded &&
                    detail::string_field(calls[i].arguments, "service_id") == svc)
                    covered = true;
            if (!covered)
                violate("R5", "impacted service '" + svc + "' never received GetUsage", 0);
        }
    }

    // R6
    {
        int publishes = 0;
        for (const detail::PairedCall& c : calls)
            if (c.tool == "Publish") ++publishes;
        if (publishes != 1)
            violate("R6", "expected exactly one Publish call, saw " + std::to_string(publishes),
                    calls.empty() ? 0 : calls.back().record_index);
        else if (calls.back().tool != "Publish")
            violate("R6", "Publish must be the final call", calls.back().record_index);
        else if (!calls.back().succeeded)
            violate("R6", "Publish call failed", calls.back().record_index);
    }

    // R7
    {
        int last_evidence = -1, first_impact = INT32_MAX;
        int first_impact_record = 0;
        for (const detail::PairedCall& c : calls) {
            if (c.tool == "GetNotes" || c.tool == "GetEvents")
                last_evidence = std::max(last_evidence, c.record_index);
            if (c.tool == "GetImpactedServices" || c.tool == "GetUsage")
                if (c.record_index < first_impact) {
                    first_impact = c.record_index;
                    first_impact_record = c.record_index;
                }
        }
        if (first_impact != INT32_MAX && first_impact < last_evidence)
            violate("R7", "impact-phase call precedes the end of the evidence phase",
                    first_impact_record);
    }

    verdict.compliant = verdict.violations.empty();
    return verdict;
}

// ---------------------------------------------------------------------------
// Tool misuse and corpus aggregation
// ---------------------------------------------------------------------------

struct Fraction {
    long long num = 0;
    long long den = 0;

    double ratio() const { return den == 0 ? 0.0 : static_cast<double>(num) / den; }

    // Table style: "7.3% (20/274)"; integral percentages lose the decimal.
    std::string format() const {
        const double pct = ratio() * 100.0;
        const long long tenths = std::llround(pct * 10.0);
        char buf[64];
        if (tenths % 10 == 0)
            std::snprintf(buf, sizeof(buf), "%lld%% (%lld/%lld)", tenths / 10, num, den);
        else
            std::snprintf(buf, sizeof(buf), "%.1f%% (%lld/%lld)", pct, num, den);
        std::string s = buf;
        if (den == 0) s += " [no data]";
        return s;
    }
};

inline Fraction tool_misuse_rate(const Trace& trace) {
    Fraction f;
    for (const TraceRecord& r : trace.records) {
        if (r.kind != RecordKind::tool_call) continue;
        ++f.den;
        if (!is_known_tool(r.tool)) ++f.num;
    }
    return f;
}

struct TraceEntry {
    std::string trace_id;     // stable sort key, usually the file stem
    std::string scenario_id;  // pairs the trace with its scenario
    Trace trace;
};

struct FaithfulnessReport {
    Fraction hallucination;        // over all mentions
    Fraction compliance;           // over all runs, failed ones included
    Fraction compliance_completed; // over completed runs only
    Fraction misuse;               // over all tool calls
    long long runs = 0;
    long long completed_runs = 0;
};

inline bool trace_completed(const Trace& trace) {
    for (const TraceRecord& r : trace.records)
        if (r.kind == RecordKind::tool_result && r.tool == "Publish" && !r.error) return true;
    return false;
}

inline Result<FaithfulnessReport> analyze_corpus(std::vector<TraceEntry> traces,
                                                 const std::vector<Scenario>& scenarios) {
    std::map<std::string, const Scenario*> by_id;
    for (const Scenario& s : scenarios) by_id[s.scenario_id] = &s;

    std::sort(traces.begin(), traces.end(),
              [](const TraceEntry& a, const TraceEntry& b) { return a.trace_id < b.trace_id; });

    FaithfulnessReport report;
    for (const TraceEntry& entry : traces) {
        auto it = by_id.find(entry.scenario_id);
        if (it == by_id.end())
            return make_error(Errc::trace_scenario_mismatch,
                              "trace '" + entry.trace_id + "' references unknown scenario '" +
                                  entry.scenario_id + "'");
        const Scenario& scenario = *it->second;

        auto ledger = extract_entity_mentions(entry.trace);
        if (!ledger) return ledger.error();
        report.hallucination.den += static_cast<long long>(ledger.value().mentions.size());
        report.hallucination.num += count_hallucinations(ledger.value(), scenario.graph);

        auto compliance = check_protocol_compliance(entry.trace);
        if (!compliance) return compliance.error();
        const bool completed = trace_completed(entry.trace);
        report.runs += 1;
        report.compliance.den += 1;
        if (compliance.value().compliant) report.compliance.num += 1;
        if (completed) {
            report.completed_runs += 1;
            report.compliance_completed.den += 1;
            if (compliance.value().compliant) report.compliance_completed.num += 1;
        }

        const Fraction misuse = tool_misuse_rate(entry.trace);
        report.misuse.num += misuse.num;
        report.misuse.den += misuse.den;
    }
    return report;
}

}  // namespace causeway
