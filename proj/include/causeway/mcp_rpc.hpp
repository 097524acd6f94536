#pragma once
// MCP transport: JSON-RPC 2.0 with line-delimited framing over stdio, plus
// an optional localhost HTTP listener accepting the same messages by POST.
//
// Methods:
//   initialize                -> protocol/capability handshake
//   notifications/initialized -> client ack, no reply
//   ping                      -> {}
//   tools/list                -> the seven tool descriptors
//   tools/call                -> dispatch into the session; tool-level errors
//                               come back as content with isError, not as
//                               JSON-RPC errors, so misuse stays observable
//   agent/message             -> relays agent commentary into the trace

#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "causeway/session.hpp"

namespace causeway {

inline constexpr const char* kMcpProtocolVersion = "2024-11-05";
inline constexpr const char* kServerName = "causeway-mcp";
inline constexpr const char* kServerVersion = "0.1.0";

class McpServer {
public:
    McpServer(std::shared_ptr<const Scenario> scenario, std::string session_id,
              std::string trace_path = {})
        : session_(std::move(scenario), std::move(session_id)),
          trace_path_(std::move(trace_path)) {}

    Session& session() { return session_; }

    // Handles one JSON-RPC message; nullopt for notifications.
    std::optional<nlohmann::json> handle_message(const nlohmann::json& msg) {
        if (!msg.is_object() || msg.value("jsonrpc", "") != "2.0" || !msg.contains("method") ||
            !msg["method"].is_string())
            return error_response(msg.is_object() ? msg.value("id", nlohmann::json()) : nullptr,
                                  -32600, "invalid request");
        const std::string method = msg["method"].get<std::string>();
        const bool is_notification = !msg.contains("id");
        const nlohmann::json id = is_notification ? nlohmann::json() : msg["id"];
        const nlohmann::json params =
            msg.contains("params") && msg["params"].is_object() ? msg["params"] : nlohmann::json::object();

        if (method == "initialize")
            return result_response(id, {{"protocolVersion", kMcpProtocolVersion},
                                        {"capabilities", {{"tools", nlohmann::json::object()}}},
                                        {"serverInfo",
                                         {{"name", kServerName}, {"version", kServerVersion}}}});
        if (method == "notifications/initialized") return std::nullopt;
        if (method == "ping") return result_response(id, nlohmann::json::object());

        if (method == "tools/list") {
            auto tools = session_.list_tools();
            if (!tools) return error_response(id, -32000, tools.error().to_string());
            nlohmann::json arr = nlohmann::json::array();
            for (const ToolDescriptor& t : tools.value())
                arr.push_back({{"name", t.name},
                               {"description", t.description},
                               {"inputSchema", t.input_schema}});
            return result_response(id, {{"tools", arr}});
        }

        if (method == "tools/call") {
            if (!params.contains("name") || !params["name"].is_string())
                return error_response(id, -32602, "tools/call requires a tool name");
            const std::string name = params["name"].get<std::string>();
            const nlohmann::json arguments = params.contains("arguments")
                                                 ? params["arguments"]
                                                 : nlohmann::json::object();
            auto outcome = session_.call_tool(name, arguments);
            persist_trace();
            nlohmann::json content = nlohmann::json::array();
            if (outcome.ok()) {
                content.push_back({{"type", "text"}, {"text", outcome.value().dump()}});
                return result_response(id, {{"content", content}, {"isError", false}});
            }
            content.push_back({{"type", "text"}, {"text", outcome.error().to_string()}});
            return result_response(id, {{"content", content}, {"isError", true}});
        }

        if (method == "agent/message") {
            if (!params.contains("text") || !params["text"].is_string())
                return error_response(id, -32602, "agent/message requires text");
            session_.emit_agent_message(params["text"].get<std::string>());
            persist_trace();
            if (is_notification) return std::nullopt;
            return result_response(id, nlohmann::json::object());
        }

        if (is_notification) return std::nullopt;
        return error_response(id, -32601, "method not found: " + method);
    }

    // One JSON-RPC message per line.
    void run_stdio(std::istream& in, std::ostream& out) {
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            nlohmann::json msg = nlohmann::json::parse(line, nullptr, false);
            std::optional<nlohmann::json> reply;
            if (msg.is_discarded())
                reply = error_response(nullptr, -32700, "parse error");
            else
                reply = handle_message(msg);
            if (reply) out << reply->dump() << "\n" << std::flush;
        }
        persist_trace();
    }

    void persist_trace() {
        if (trace_path_.empty()) return;
        std::ofstream f(trace_path_, std::ios::trunc);
        f << trace_to_jsonl(session_.export_trace());
    }

private:
    static nlohmann::json result_response(const nlohmann::json& id, nlohmann::json result) {
        return {{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}};
    }
    static nlohmann::json error_response(const nlohmann::json& id, int code, std::string message) {
        return {{"jsonrpc", "2.0"},
                {"id", id},
                {"error", {{"code", code}, {"message", std::move(message)}}}};
    }

    Session session_;
    std::string trace_path_;
};

}  // namespace causeway
