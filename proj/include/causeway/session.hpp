#pragma once
// One investigation session over one scenario: dispatches the seven tools
// against the sealed graph, records every call and result in an append-only
// trace, and validates Publish payloads.
//
// Publish deliberately does not check that the published ids exist; a
// fabricated id must land in the trace so the faithfulness analyzer can
// count it, not be sanitized away at the wire.

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "causeway/result.hpp"
#include "causeway/scenario.hpp"
#include "causeway/timeutil.hpp"
#include "causeway/tool_catalog.hpp"
#include "causeway/trace.hpp"

namespace causeway {

struct PublishRecord {
    std::vector<std::string> root_cause_ids;
    std::vector<std::string> impacted_party_ids;
    std::string summary;
};

inline Timestamp wall_clock_now() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

class Session {
public:
    enum class State { Open, Published, Failed };

    Session(std::shared_ptr<const Scenario> scenario, std::string session_id)
        : scenario_(std::move(scenario)), session_id_(std::move(session_id)) {}

    const std::string& session_id() const { return session_id_; }
    const std::string& scenario_id() const { return scenario_->scenario_id; }
    const Scenario& scenario() const { return *scenario_; }
    State state() const { return state_; }
    const std::optional<PublishRecord>& published() const { return published_; }
    const Trace& trace() const { return trace_; }

    Result<std::vector<ToolDescriptor>> list_tools() const {
        if (state_ != State::Open)
            return make_error(state_ == State::Published ? Errc::session_published
                                                         : Errc::session_closed,
                              "session is not open");
        return tool_catalog();
    }

    // Dispatches one tool call. The call and its result (or error) are both
    // appended to the trace, whatever the outcome.
    Result<nlohmann::json> call_tool(const std::string& name, const nlohmann::json& arguments) {
        append(make_call_record(name, arguments));
        Result<nlohmann::json> outcome = dispatch(name, arguments);
        TraceRecord result_record;
        result_record.kind = RecordKind::tool_result;
        result_record.tool = name;
        if (outcome.ok())
            result_record.result = outcome.value();
        else
            result_record.error = outcome.error().to_string();
        append(std::move(result_record));
        return outcome;
    }

    // Agent commentary relayed by the harness; lands in the trace so the
    // analyzer can audit every id the agent mentions.
    void emit_agent_message(const std::string& text) {
        TraceRecord r;
        r.kind = RecordKind::agent_message;
        r.text = text;
        append(std::move(r));
    }

    void mark_failed() {
        if (state_ == State::Open) state_ = State::Failed;
    }

    Trace export_trace() const { return trace_; }

private:
    TraceRecord make_call_record(const std::string& name, const nlohmann::json& arguments) {
        TraceRecord r;
        r.kind = RecordKind::tool_call;
        r.tool = name;
        r.arguments = arguments.is_null() ? nlohmann::json::object() : arguments;
        return r;
    }

    void append(TraceRecord r) {
        r.index = static_cast<int>(trace_.records.size());
        r.timestamp = wall_clock_now();
        trace_.records.push_back(std::move(r));
    }

    Result<nlohmann::json> dispatch(const std::string& name, const nlohmann::json& args) {
        if (state_ == State::Published)
            return make_error(Errc::session_published, "session already published");
        if (state_ == State::Failed) return make_error(Errc::session_closed, "session failed");
        if (!is_known_tool(name))
            return make_error(Errc::unknown_tool, "'" + name + "' is not an available tool");

        if (name == "LookupService") {
            auto arg = string_arg(args, "name");
            if (!arg) return arg.error();
            return lookup_service(arg.value());
        }
        if (name == "GetImplementation") {
            auto arg = string_arg(args, "service_id");
            if (!arg) return arg.error();
            return entity_list(scenario_->graph.sigma(arg.value()));
        }
        if (name == "GetNotes") {
            auto arg = string_arg(args, "resource_id");
            if (!arg) return arg.error();
            return entity_objects(scenario_->graph.notes_of(arg.value()));
        }
        if (name == "GetEvents") {
            auto arg = string_arg(args, "resource_id");
            if (!arg) return arg.error();
            return entity_objects(scenario_->graph.events_of(arg.value()));
        }
        if (name == "GetImpactedServices") {
            auto arg = string_arg(args, "resource_id");
            if (!arg) return arg.error();
            return entity_list(scenario_->graph.rho(arg.value()));
        }
        if (name == "GetUsage") {
            auto arg = string_arg(args, "service_id");
            if (!arg) return arg.error();
            return entity_list(scenario_->graph.parties_of(arg.value()));
        }
        return publish_payload(args);
    }

    static Result<std::string> string_arg(const nlohmann::json& args, const char* key) {
        if (!args.is_object() || !args.contains(key) || !args[key].is_string())
            return make_error(Errc::malformed_arguments,
                              std::string("expected string argument '") + key + "'");
        return args[key].get<std::string>();
    }

    // Exact case-insensitive name match first; otherwise a unique substring
    // match. Several candidates are an error, never a guess.
    Result<nlohmann::json> lookup_service(const std::string& name) {
        const std::string needle = lower(name);
        std::vector<const Entity*> exact, partial;
        for (const auto& [id, e] : scenario_->graph.entities()) {
            if (e.kind != NodeKind::Service) continue;
            const std::string have = lower(e.name);
            if (have == needle || id == name)
                exact.push_back(&e);
            else if (have.find(needle) != std::string::npos)
                partial.push_back(&e);
        }
        const std::vector<const Entity*>& hits = exact.empty() ? partial : exact;
        if (hits.empty())
            return make_error(Errc::entity_not_found, "no service matches '" + name + "'");
        if (hits.size() > 1) {
            std::string ids;
            for (const Entity* e : hits) ids += (ids.empty() ? "" : ", ") + e->id;
            return make_error(Errc::ambiguous_name,
                              "'" + name + "' matches multiple services: " + ids);
        }
        return entity_to_json(*hits.front());
    }

    Result<nlohmann::json> entity_list(Result<std::vector<std::string>> ids) {
        if (!ids) return not_found(ids.error());
        nlohmann::json out = nlohmann::json::array();
        for (const std::string& id : ids.value())
            out.push_back(entity_to_json(*scenario_->graph.find(id)));
        return out;
    }

    Result<nlohmann::json> entity_objects(Result<std::vector<Entity>> entities) {
        if (!entities) return not_found(entities.error());
        nlohmann::json out = nlohmann::json::array();
        for (const Entity& e : entities.value()) out.push_back(entity_to_json(e));
        return out;
    }

    // From the tool's typed point of view an id of the wrong kind does not
    // name a usable entity either.
    static Error not_found(const Error& graph_error) {
        if (graph_error.code == Errc::unknown_entity || graph_error.code == Errc::wrong_kind)
            return make_error(Errc::entity_not_found, graph_error.message);
        return graph_error;
    }

    Result<nlohmann::json> publish_payload(const nlohmann::json& args) {
        if (!args.is_object())
            return make_error(Errc::malformed_arguments, "Publish expects an object");
        PublishRecord record;
        for (const char* key : {"root_cause_ids", "impacted_party_ids"}) {
            if (!args.contains(key) || !args[key].is_array())
                return make_error(Errc::malformed_arguments,
                                  std::string("expected string array '") + key + "'");
            auto& target = std::string(key) == "root_cause_ids" ? record.root_cause_ids
                                                                : record.impacted_party_ids;
            for (const nlohmann::json& v : args[key]) {
                if (!v.is_string())
                    return make_error(Errc::malformed_arguments,
                                      std::string("expected string array '") + key + "'");
                target.push_back(v.get<std::string>());
            }
        }
        if (!args.contains("summary") || !args["summary"].is_string() ||
            args["summary"].get<std::string>().empty())
            return make_error(Errc::missing_summary, "Publish requires a non-empty summary");
        record.summary = args["summary"].get<std::string>();
        published_ = std::move(record);
        state_ = State::Published;
        return nlohmann::json{{"status", "published"}};
    }

    static std::string lower(std::string s) {
        for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    }

    std::shared_ptr<const Scenario> scenario_;
    std::string session_id_;
    Trace trace_;
    std::optional<PublishRecord> published_;
    State state_ = State::Open;
};

}  // namespace causeway
