#pragma once
// Investigation traces: an append-only, ordered record of one session.
// Serialized as line-delimited JSON, one record per line, with fields
// index, kind (tool_call | tool_result | agent_message), tool, arguments,
// result, error, text, timestamp (RFC 3339). Fields absent for a record
// kind are omitted from its line.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "causeway/result.hpp"
#include "causeway/timeutil.hpp"

namespace causeway {

enum class RecordKind { tool_call, tool_result, agent_message };

inline const char* to_string(RecordKind k) {
    switch (k) {
        case RecordKind::tool_call: return "tool_call";
        case RecordKind::tool_result: return "tool_result";
        case RecordKind::agent_message: return "agent_message";
    }
    return "?";
}

struct TraceRecord {
    int index = 0;
    RecordKind kind = RecordKind::tool_call;
    std::string tool;                  // tool_call, tool_result
    nlohmann::json arguments;          // tool_call
    nlohmann::json result;             // tool_result on success
    std::optional<std::string> error;  // tool_result on failure
    std::optional<std::string> text;   // agent_message
    Timestamp timestamp = 0;
};

struct Trace {
    std::vector<TraceRecord> records;
};

inline nlohmann::json trace_record_to_json(const TraceRecord& r) {
    nlohmann::json j;
    j["index"] = r.index;
    j["kind"] = to_string(r.kind);
    j["timestamp"] = format_rfc3339(r.timestamp);
    switch (r.kind) {
        case RecordKind::tool_call:
            j["tool"] = r.tool;
            j["arguments"] = r.arguments;
            break;
        case RecordKind::tool_result:
            j["tool"] = r.tool;
            if (r.error)
                j["error"] = *r.error;
            else
                j["result"] = r.result;
            break;
        case RecordKind::agent_message:
            j["text"] = r.text.value_or("");
            break;
    }
    return j;
}

inline std::string trace_to_jsonl(const Trace& t) {
    std::string out;
    for (const TraceRecord& r : t.records) {
        out += trace_record_to_json(r).dump();
        out += '\n';
    }
    return out;
}

inline Result<TraceRecord> trace_record_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("index") || !j["index"].is_number_integer() ||
        !j.contains("kind") || !j["kind"].is_string())
        return make_error(Errc::malformed_trace, "record requires integer index and string kind");
    TraceRecord r;
    r.index = j["index"].get<int>();
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "tool_call") {
        r.kind = RecordKind::tool_call;
        if (!j.contains("tool") || !j["tool"].is_string())
            return make_error(Errc::malformed_trace, "tool_call requires a tool name");
        r.tool = j["tool"].get<std::string>();
        if (j.contains("arguments")) r.arguments = j["arguments"];
    } else if (kind == "tool_result") {
        r.kind = RecordKind::tool_result;
        if (!j.contains("tool") || !j["tool"].is_string())
            return make_error(Errc::malformed_trace, "tool_result requires a tool name");
        r.tool = j["tool"].get<std::string>();
        if (j.contains("error")) {
            if (!j["error"].is_string())
                return make_error(Errc::malformed_trace, "error must be a string");
            r.error = j["error"].get<std::string>();
        } else if (j.contains("result")) {
            r.result = j["result"];
        }
    } else if (kind == "agent_message") {
        r.kind = RecordKind::agent_message;
        if (!j.contains("text") || !j["text"].is_string())
            return make_error(Errc::malformed_trace, "agent_message requires text");
        r.text = j["text"].get<std::string>();
    } else {
        return make_error(Errc::malformed_trace, "unknown record kind '" + kind + "'");
    }
    if (j.contains("timestamp") && j["timestamp"].is_string()) {
        auto ts = parse_rfc3339(j["timestamp"].get<std::string>());
        if (!ts) return make_error(Errc::malformed_trace, "bad timestamp");
        r.timestamp = *ts;
    }
    return r;
}

inline Result<Trace> trace_from_jsonl(const std::string& text) {
    Trace t;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            return make_error(Errc::malformed_trace,
                              "line " + std::to_string(t.records.size() + 1) + " is not JSON");
        auto r = trace_record_from_json(j);
        if (!r) return r.error();
        t.records.push_back(std::move(r).take());
    }
    return t;
}

// Rewrites every timestamp to the epoch so traces from different wall-clock
// moments can be compared byte for byte.
inline std::string normalize_trace_timestamps(const std::string& jsonl) {
    std::istringstream in(jsonl);
    std::string line, out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (!j.is_discarded() && j.is_object() && j.contains("timestamp"))
            j["timestamp"] = format_rfc3339(0);
        out += j.dump();
        out += '\n';
    }
    return out;
}

}  // namespace causeway
