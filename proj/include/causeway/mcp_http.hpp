#pragma once
// Localhost HTTP listener for the MCP server: JSON-RPC messages by POST to
// /rpc (or /). Notifications get 202 with an empty body.

#include <memory>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "causeway/mcp_rpc.hpp"

namespace causeway {

class McpHttpListener {
public:
    explicit McpHttpListener(McpServer& server) : server_(server) {
        auto handler = [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json msg = nlohmann::json::parse(req.body, nullptr, false);
            std::optional<nlohmann::json> reply;
            if (msg.is_discarded())
                reply = nlohmann::json{{"jsonrpc", "2.0"},
                                       {"id", nullptr},
                                       {"error", {{"code", -32700}, {"message", "parse error"}}}};
            else
                reply = server_.handle_message(msg);
            if (reply) {
                res.set_content(reply->dump(), "application/json");
            } else {
                res.status = 202;
            }
        };
        http_.Post("/rpc", handler);
        http_.Post("/", handler);
        http_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("ok", "text/plain");
        });
    }

    // Binds an ephemeral port when port == 0; returns the bound port.
    int bind(const std::string& host, int port) {
        if (port == 0) return http_.bind_to_any_port(host);
        return http_.bind_to_port(host, port) ? port : -1;
    }

    bool listen_after_bind() { return http_.listen_after_bind(); }
    void stop() { http_.stop(); }

private:
    McpServer& server_;
    httplib::Server http_;
};

}  // namespace causeway
