#pragma once
// Adapter from a chat-completions service with tool calling to the Agent
// contract. Every model-visible message and every tool call it makes flows
// through the session, so external runs are audited exactly like reference
// runs. Responses are nondeterministic by nature; the harness only promises
// faithful recording.

#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "causeway/agent.hpp"

namespace causeway {

struct ExternalEndpoint {
    std::string base_url;  // e.g. http://127.0.0.1:8080/v1
    std::string model;
    std::string api_key;

    // AGENT_BASE_URL, AGENT_MODEL, AGENT_API_KEY
    static std::optional<ExternalEndpoint> from_env() {
        const char* url = std::getenv("AGENT_BASE_URL");
        const char* model = std::getenv("AGENT_MODEL");
        if (!url || !model) return std::nullopt;
        const char* key = std::getenv("AGENT_API_KEY");
        return ExternalEndpoint{url, model, key ? key : ""};
    }
};

namespace detail {

struct SplitUrl {
    std::string host_port;  // scheme://host:port
    std::string path;       // leading path, no trailing slash
};

inline SplitUrl split_url(const std::string& url) {
    const size_t scheme = url.find("://");
    const size_t path_start =
        scheme == std::string::npos ? url.find('/') : url.find('/', scheme + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string path = url.substr(path_start);
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {url.substr(0, path_start), path};
}

}  // namespace detail

class ExternalAgent : public Agent {
public:
    explicit ExternalAgent(ExternalEndpoint endpoint, int max_turns = 64)
        : endpoint_(std::move(endpoint)), max_turns_(max_turns) {}

    std::string name() const override { return "external:" + endpoint_.model; }

    Result<void> run(AgentContext& ctx) override {
        const detail::SplitUrl url = detail::split_url(endpoint_.base_url);
        httplib::Client client(url.host_port);
        client.set_read_timeout(120, 0);

        nlohmann::json tools = nlohmann::json::array();
        for (const ToolDescriptor& t : ctx.catalog)
            tools.push_back({{"type", "function"},
                             {"function",
                              {{"name", t.name},
                               {"description", t.description},
                               {"parameters", t.input_schema}}}});

        nlohmann::json messages = nlohmann::json::array();
        messages.push_back({{"role", "system"}, {"content", instructions()}});
        messages.push_back({{"role", "user"},
                            {"content", ctx.incident_text + "\nCurrent time: " +
                                            format_rfc3339(ctx.now)}});

        bool published = false;
        int nudges = 0;
        for (int turn = 0; turn < max_turns_ && !published; ++turn) {
            nlohmann::json body = {{"model", endpoint_.model},
                                   {"messages", messages},
                                   {"tools", tools},
                                   {"tool_choice", "auto"}};
            httplib::Headers headers;
            if (!endpoint_.api_key.empty())
                headers.emplace("Authorization", "Bearer " + endpoint_.api_key);
            auto res = client.Post(url.path + "/chat/completions", headers, body.dump(),
                                   "application/json");
            if (!res || res->status != 200)
                return make_error(Errc::transport_failure,
                                  "completion request failed" +
                                      (res ? " with status " + std::to_string(res->status) : ""));
            nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
            if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty())
                return make_error(Errc::transport_failure, "malformed completion response");

            const nlohmann::json& message = reply["choices"][0]["message"];
            messages.push_back(message);
            if (message.contains("content") && message["content"].is_string() &&
                !message["content"].get<std::string>().empty())
                ctx.emit_message(message["content"].get<std::string>());

            if (!message.contains("tool_calls") || !message["tool_calls"].is_array() ||
                message["tool_calls"].empty()) {
                if (++nudges > 2)
                    return make_error(Errc::transport_failure,
                                      "model stopped without calling Publish");
                messages.push_back(
                    {{"role", "user"},
                     {"content", "Continue the investigation; finish by calling Publish."}});
                continue;
            }

            for (const nlohmann::json& call : message["tool_calls"]) {
                const std::string tool_name = call["function"].value("name", "");
                const std::string raw_args = call["function"].value("arguments", "");
                nlohmann::json args = nlohmann::json::parse(raw_args, nullptr, false);
                // A syntactically broken call still has to land in the trace.
                if (args.is_discarded() || !args.is_object())
                    args = nlohmann::json{{"_raw", raw_args}};
                auto outcome = ctx.call_tool(tool_name, args);
                const std::string content =
                    outcome.ok() ? outcome.value().dump() : outcome.error().to_string();
                messages.push_back({{"role", "tool"},
                                    {"tool_call_id", call.value("id", "")},
                                    {"content", content}});
                if (tool_name == "Publish" && outcome.ok()) {
                    published = true;
                    break;
                }
            }
        }
        if (!published)
            return make_error(Errc::transport_failure, "model never published within turn limit");
        return {};
    }

private:
    static std::string instructions() {
        return "You are an infrastructure incident investigator. Follow these steps strictly:\n"
               "1. Extract the service name from the incident text.\n"
               "2. Resolve the service with LookupService.\n"
               "3. Retrieve all implementing resources with GetImplementation.\n"
               "4. For each resource, call GetNotes and GetEvents and analyze the descriptions "
               "for unresolved root-cause evidence; mind event times relative to the current "
               "time.\n"
               "5. For each root-cause resource, call GetImpactedServices, then GetUsage for "
               "every impacted service.\n"
               "6. Call Publish with the root cause resource ids, the impacted party ids, and a "
               "short summary. Mention only entity ids returned by tools; acknowledge missing or "
               "ambiguous data instead of guessing.";
    }

    ExternalEndpoint endpoint_;
    int max_turns_;
};

}  // namespace causeway
