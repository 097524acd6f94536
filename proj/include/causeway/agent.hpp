#pragma once
// Investigation agents. The reference agent executes the six-step protocol
// deterministically: resolve the service, enumerate its resources, gather
// notes and events for each, classify the evidence, expand impact for the
// incriminated resources, and publish.
//
// Agents see only the incident text, the scenario clock, and the tool
// surface; graph data reaches them exclusively through call_tool.

#include <algorithm>
#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "causeway/result.hpp"
#include "causeway/scenario.hpp"
#include "causeway/session.hpp"
#include "causeway/tool_catalog.hpp"

namespace causeway {

inline constexpr int kDefaultCallBudget = 200;

// ---------------------------------------------------------------------------
// Evidence classification
// ---------------------------------------------------------------------------

// Deterministic stand-in for LLM judgment over note/event descriptions.
struct EvidenceKeywords {
    std::vector<std::string> incident = {"failure", "failed", "critical", "leak",
                                         "degraded", "outage", "error"};
    std::vector<std::string> resolution = {"resolved", "replaced", "completed", "restored",
                                           "fixed"};
    std::vector<std::string> normal = {"normal operation", "healthy"};
    std::vector<std::string> maintenance = {"maintenance", "planned intervention", "upgrade"};
};

struct EvidenceVerdict {
    std::string resource_id;
    bool is_root_cause = false;
    std::vector<std::string> supporting_items;  // most recent incriminating event first
    std::string rationale;
};

namespace detail {

inline std::string to_lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline bool matches_any(const std::string& lowered, const std::vector<std::string>& keywords) {
    for (const std::string& k : keywords)
        if (lowered.find(k) != std::string::npos) return true;
    return false;
}

}  // namespace detail

// An item incriminates its resource iff its description matches the incident
// keywords and is not resolved; resolved means either an ended occurrence
// whose description matches the resolution keywords, or any description
// matching the normal-operation keywords. Maintenance events overlapping the
// scenario clock incriminate as well.
inline EvidenceVerdict classify_evidence(const std::string& resource_id,
                                         const std::vector<Entity>& notes,
                                         const std::vector<Entity>& events, Timestamp now,
                                         const EvidenceKeywords& kw = {}) {
    struct Hit {
        const Entity* item;
        bool is_event;
    };
    std::vector<Hit> hits;

    auto resolved = [&](const Entity& e) {
        const std::string d = detail::to_lower(e.description.value_or(""));
        if (detail::matches_any(d, kw.normal)) return true;
        return e.end_time && *e.end_time < now && detail::matches_any(d, kw.resolution);
    };
    auto overlaps_now = [&](const Entity& e) {
        if (e.start_time && *e.start_time > now) return false;
        return !e.end_time || *e.end_time >= now;
    };

    for (const Entity& e : events) {
        const std::string d = detail::to_lower(e.description.value_or(""));
        const bool incident_hit = detail::matches_any(d, kw.incident) && !resolved(e);
        const bool maintenance_hit = detail::matches_any(d, kw.maintenance) && overlaps_now(e);
        if (incident_hit || maintenance_hit) hits.push_back({&e, true});
    }
    for (const Entity& n : notes) {
        const std::string d = detail::to_lower(n.description.value_or(""));
        if (detail::matches_any(d, kw.incident) && !resolved(n)) hits.push_back({&n, false});
    }

    // Most recent incriminating event first; notes trail events.
    std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.is_event != b.is_event) return a.is_event;
        if (a.is_event) {
            const Timestamp sa = a.item->start_time.value_or(INT64_MIN);
            const Timestamp sb = b.item->start_time.value_or(INT64_MIN);
            if (sa != sb) return sa > sb;
        }
        return a.item->id < b.item->id;
    });

    EvidenceVerdict v;
    v.resource_id = resource_id;
    v.is_root_cause = !hits.empty();
    for (const Hit& h : hits) v.supporting_items.push_back(h.item->id);
    if (hits.empty()) {
        v.rationale = "no unresolved incident evidence";
    } else {
        v.rationale = "incriminated by ";
        for (size_t i = 0; i < v.supporting_items.size(); ++i)
            v.rationale += (i ? ", " : "") + v.supporting_items[i];
    }
    return v;
}

// ---------------------------------------------------------------------------
// Agent contract
// ---------------------------------------------------------------------------

struct AgentContext {
    std::string incident_text;
    Timestamp now = 0;  // scenario clock
    std::vector<ToolDescriptor> catalog;
    std::function<Result<nlohmann::json>(const std::string&, const nlohmann::json&)> call_tool;
    std::function<void(const std::string&)> emit_message;
};

class Agent {
public:
    virtual ~Agent() = default;
    virtual std::string name() const = 0;
    // Runs one investigation to completion: publish, or return the error
    // that stopped it.
    virtual Result<void> run(AgentContext& ctx) = 0;
};

struct RunResult {
    enum class Outcome { Completed, LlmError };
    std::string scenario_id;
    Trace trace;
    std::optional<PublishRecord> publish;
    Outcome outcome = Outcome::LlmError;
    double duration_seconds = 0.0;
    std::string error;  // empty when Completed
};

namespace detail {

struct BudgetExhausted {};

}  // namespace detail

// Drives one agent over one fresh session. Returns once the agent publishes,
// fails, or burns through the call budget.
inline RunResult run_investigation(Agent& agent, Session& session,
                                   int call_budget = kDefaultCallBudget) {
    RunResult out;
    out.scenario_id = session.scenario_id();

    int calls = 0;
    AgentContext ctx;
    ctx.incident_text = session.scenario().incident_text;
    ctx.now = session.scenario().now;
    ctx.catalog = tool_catalog();
    ctx.call_tool = [&](const std::string& name, const nlohmann::json& args) {
        if (++calls > call_budget) throw detail::BudgetExhausted{};
        return session.call_tool(name, args);
    };
    ctx.emit_message = [&](const std::string& text) { session.emit_agent_message(text); };

    const auto started = std::chrono::steady_clock::now();
    try {
        auto r = agent.run(ctx);
        if (!r) out.error = r.error().to_string();
    } catch (const detail::BudgetExhausted&) {
        out.error = make_error(Errc::call_budget_exceeded,
                               "agent exceeded " + std::to_string(call_budget) + " tool calls")
                        .to_string();
    } catch (const std::exception& e) {
        out.error = make_error(Errc::transport_failure, e.what()).to_string();
    }
    out.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    if (session.state() == Session::State::Published) {
        out.outcome = RunResult::Outcome::Completed;
        out.publish = session.published();
        out.error.clear();
    } else {
        session.mark_failed();
        out.outcome = RunResult::Outcome::LlmError;
        if (out.error.empty()) out.error = "agent finished without publishing";
    }
    out.trace = session.export_trace();
    return out;
}

// ---------------------------------------------------------------------------
// Reference agent
// ---------------------------------------------------------------------------

// First double-quoted span in the incident text.
inline Result<std::string> extract_quoted_service_name(const std::string& incident_text) {
    const size_t open = incident_text.find('"');
    if (open != std::string::npos) {
        const size_t close = incident_text.find('"', open + 1);
        if (close != std::string::npos && close > open + 1)
            return incident_text.substr(open + 1, close - open - 1);
    }
    return make_error(Errc::service_name_not_extractable,
                      "incident text contains no quoted service name");
}

class ReferenceAgent : public Agent {
public:
    explicit ReferenceAgent(EvidenceKeywords keywords = {}) : keywords_(std::move(keywords)) {}

    std::string name() const override { return "reference"; }

    Result<void> run(AgentContext& ctx) override {
        auto service_name = extract_quoted_service_name(ctx.incident_text);
        if (!service_name) return service_name.error();

        auto service = ctx.call_tool("LookupService", {{"name", service_name.value()}});
        if (!service) return service.error();
        const std::string service_id = service.value()["id"].get<std::string>();

        auto implementation = ctx.call_tool("GetImplementation", {{"service_id", service_id}});
        if (!implementation) return implementation.error();

        // Evidence phase: notes and events for every resource, then verdicts.
        std::vector<EvidenceVerdict> verdicts;
        for (const nlohmann::json& res : implementation.value()) {
            const std::string resource_id = res["id"].get<std::string>();
            auto notes = ctx.call_tool("GetNotes", {{"resource_id", resource_id}});
            if (!notes) return notes.error();
            auto events = ctx.call_tool("GetEvents", {{"resource_id", resource_id}});
            if (!events) return events.error();
            verdicts.push_back(classify_evidence(resource_id, parse_entities(notes.value()),
                                                 parse_entities(events.value()), ctx.now,
                                                 keywords_));
        }

        std::string review = "Evidence review:";
        for (const EvidenceVerdict& v : verdicts)
            review += " " + v.resource_id + ": " + v.rationale + ";";
        ctx.emit_message(review);

        std::vector<std::string> root_causes;
        for (const EvidenceVerdict& v : verdicts)
            if (v.is_root_cause) root_causes.push_back(v.resource_id);
        std::sort(root_causes.begin(), root_causes.end());

        if (root_causes.empty()) {
            const std::string summary =
                "Inconclusive analysis: none of the " + std::to_string(verdicts.size()) +
                " resources implementing \"" + service_name.value() +
                "\" shows unresolved incident evidence.";
            auto ack = ctx.call_tool("Publish", {{"root_cause_ids", nlohmann::json::array()},
                                                 {"impacted_party_ids", nlohmann::json::array()},
                                                 {"summary", summary}});
            if (!ack) return ack.error();
            return {};
        }

        // Impact phase: services behind each root cause, then their parties.
        std::set<std::string> impacted_services;
        for (const std::string& r : root_causes) {
            auto services = ctx.call_tool("GetImpactedServices", {{"resource_id", r}});
            if (!services) return services.error();
            for (const nlohmann::json& s : services.value())
                impacted_services.insert(s["id"].get<std::string>());
        }
        std::set<std::string> parties;
        for (const std::string& s : impacted_services) {
            auto usage = ctx.call_tool("GetUsage", {{"service_id", s}});
            if (!usage) return usage.error();
            for (const nlohmann::json& p : usage.value()) parties.insert(p["id"].get<std::string>());
        }

        std::string summary = "Root cause analysis for \"" + service_name.value() + "\" (" +
                              service_id + "): root cause " + join(root_causes);
        for (const EvidenceVerdict& v : verdicts)
            if (v.is_root_cause) summary += "; " + v.resource_id + " " + v.rationale;
        summary += ". Impacted services: " + join(impacted_services) +
                   ". Impacted parties: " + join(parties) + ".";

        auto ack = ctx.call_tool(
            "Publish",
            {{"root_cause_ids", root_causes},
             {"impacted_party_ids", std::vector<std::string>(parties.begin(), parties.end())},
             {"summary", summary}});
        if (!ack) return ack.error();
        return {};
    }

private:
    static std::vector<Entity> parse_entities(const nlohmann::json& array) {
        std::vector<Entity> out;
        for (const nlohmann::json& j : array) {
            auto e = entity_from_json(j);
            if (e.ok()) out.push_back(std::move(e).take());
        }
        return out;
    }

    template <typename C>
    static std::string join(const C& ids) {
        std::string out;
        for (const std::string& id : ids) out += (out.empty() ? "" : ", ") + id;
        return out.empty() ? "none" : out;
    }

    EvidenceKeywords keywords_;
};

}  // namespace causeway
