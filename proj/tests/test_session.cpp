#include <catch2/catch_amalgamated.hpp>

#include <memory>

#include "causeway/session.hpp"
#include "support.hpp"

using namespace causeway;
using testsupport::builtin;
using testsupport::builtin_scenario;

namespace {

std::shared_ptr<const Scenario> builtin_ptr(const std::string& id) {
    return std::make_shared<const Scenario>(builtin_scenario(id));
}

std::vector<std::string> ids_of(const nlohmann::json& entity_array) {
    std::vector<std::string> out;
    for (const auto& e : entity_array) out.push_back(e["id"].get<std::string>());
    return out;
}

}  // namespace

TEST_CASE("list_tools returns the seven descriptors in stable order") {
    Session session(builtin_ptr("oracle-01"), "s1");
    auto tools = session.list_tools();
    REQUIRE(tools.ok());
    const std::vector<std::string> expected = {"LookupService",  "GetImplementation",
                                               "GetNotes",       "GetEvents",
                                               "GetImpactedServices", "GetUsage",
                                               "Publish"};
    REQUIRE(tools.value().size() == expected.size());
    for (size_t i = 0; i < expected.size(); ++i) CHECK(tools.value()[i].name == expected[i]);

    SECTION("GetUsage descriptor takes one service id and returns parties") {
        const ToolDescriptor& usage = tools.value()[5];
        REQUIRE(usage.input_schema["required"] == nlohmann::json::array({"service_id"}));
        REQUIRE(usage.output_schema["type"] == "array");
    }
    SECTION("published session refuses listing") {
        REQUIRE(session
                    .call_tool("Publish", {{"root_cause_ids", {"res-001"}},
                                           {"impacted_party_ids", {"party-001"}},
                                           {"summary", "disk failure on array"}})
                    .ok());
        REQUIRE(session.list_tools().code() == Errc::session_published);
    }
}

TEST_CASE("LookupService name resolution") {
    Session session(builtin_ptr("oracle-06"), "s1");

    SECTION("exact match, case-insensitive") {
        auto r = session.call_tool("LookupService", {{"name", "email service"}});
        REQUIRE(r.ok());
        CHECK(r.value()["id"] == "svc-001");
        CHECK(r.value()["kind"] == "Service");
    }
    SECTION("unique substring match") {
        auto r = session.call_tool("LookupService", {{"name", "Calendar"}});
        REQUIRE(r.ok());
        CHECK(r.value()["id"] == "svc-002");
    }
    SECTION("ambiguous substring") {
        auto r = session.call_tool("LookupService", {{"name", "Service"}});
        REQUIRE(r.code() == Errc::ambiguous_name);
    }
    SECTION("no match") {
        auto r = session.call_tool("LookupService", {{"name", "Quantum Teleporter"}});
        REQUIRE(r.code() == Errc::entity_not_found);
    }
    SECTION("lookup by id") {
        auto r = session.call_tool("LookupService", {{"name", "svc-002"}});
        REQUIRE(r.ok());
        CHECK(r.value()["id"] == "svc-002");
    }
}

TEST_CASE("tool dispatch matches the graph queries exactly") {
    auto scenario = builtin_ptr("oracle-08");
    Session session(scenario, "s1");

    auto impl = session.call_tool("GetImplementation", {{"service_id", "svc-001"}});
    REQUIRE(impl.ok());
    CHECK(ids_of(impl.value()) == scenario->graph.sigma("svc-001").value());

    auto impacted = session.call_tool("GetImpactedServices", {{"resource_id", "res-001"}});
    REQUIRE(impacted.ok());
    CHECK(ids_of(impacted.value()) == scenario->graph.rho("res-001").value());

    auto usage = session.call_tool("GetUsage", {{"service_id", "svc-001"}});
    REQUIRE(usage.ok());
    CHECK(ids_of(usage.value()) == scenario->graph.parties_of("svc-001").value());

    SECTION("results carry full entity objects") {
        auto events = session.call_tool("GetEvents", {{"resource_id", "res-001"}});
        REQUIRE(events.ok());
        const nlohmann::json& evt = events.value()[0];
        CHECK(evt.contains("name"));
        CHECK(evt.contains("description"));
        CHECK(evt.contains("start_time"));
    }
    SECTION("wrong-kind id surfaces as entity-not-found") {
        auto r = session.call_tool("GetImplementation", {{"service_id", "res-001"}});
        REQUIRE(r.code() == Errc::entity_not_found);
        auto r2 = session.call_tool("GetNotes", {{"resource_id", "svc-001"}});
        REQUIRE(r2.code() == Errc::entity_not_found);
    }
    SECTION("malformed arguments") {
        REQUIRE(session.call_tool("GetImplementation", nlohmann::json::object()).code() ==
                Errc::malformed_arguments);
        REQUIRE(session.call_tool("GetImplementation", {{"service_id", 7}}).code() ==
                Errc::malformed_arguments);
    }
}

TEST_CASE("unknown tools error but keep the session open") {
    Session session(builtin_ptr("oracle-01"), "s1");
    auto r = session.call_tool("GetWeather", {{"city", "Lisbon"}});
    REQUIRE(r.code() == Errc::unknown_tool);
    REQUIRE(session.state() == Session::State::Open);

    // both the call and the error landed in the trace
    const Trace& t = session.trace();
    REQUIRE(t.records.size() == 2);
    CHECK(t.records[0].kind == RecordKind::tool_call);
    CHECK(t.records[0].tool == "GetWeather");
    CHECK(t.records[1].kind == RecordKind::tool_result);
    REQUIRE(t.records[1].error.has_value());
    CHECK(t.records[1].error->find("unknown-tool") == 0);

    // and the session still answers real calls
    REQUIRE(session.call_tool("LookupService", {{"name", "Customer Portal"}}).ok());
}

TEST_CASE("publish lifecycle") {
    Session session(builtin_ptr("oracle-01"), "s1");

    SECTION("publish closes the session") {
        auto ack = session.call_tool("Publish", {{"root_cause_ids", {"res-001"}},
                                                 {"impacted_party_ids", {"party-001"}},
                                                 {"summary", "disk failure on array"}});
        REQUIRE(ack.ok());
        CHECK(ack.value()["status"] == "published");
        REQUIRE(session.state() == Session::State::Published);
        REQUIRE(session.published()->root_cause_ids == std::vector<std::string>{"res-001"});

        SECTION("second publish is rejected and recorded") {
            auto again = session.call_tool("Publish", {{"root_cause_ids", {"res-001"}},
                                                       {"impacted_party_ids", {"party-001"}},
                                                       {"summary", "again"}});
            REQUIRE(again.code() == Errc::session_published);
            CHECK(session.trace().records.back().error->find("session-published") == 0);
        }
        SECTION("ordinary calls after publish are rejected") {
            auto r = session.call_tool("GetNotes", {{"resource_id", "res-001"}});
            REQUIRE(r.code() == Errc::session_published);
        }
    }
    SECTION("empty summary") {
        auto r = session.call_tool("Publish", {{"root_cause_ids", nlohmann::json::array()},
                                               {"impacted_party_ids", nlohmann::json::array()},
                                               {"summary", ""}});
        REQUIRE(r.code() == Errc::missing_summary);
        REQUIRE(session.state() == Session::State::Open);
    }
    SECTION("empty lists with an explanatory summary are allowed") {
        auto r = session.call_tool("Publish",
                                   {{"root_cause_ids", nlohmann::json::array()},
                                    {"impacted_party_ids", nlohmann::json::array()},
                                    {"summary", "inconclusive: no incriminating evidence"}});
        REQUIRE(r.ok());
    }
    SECTION("ids are syntax-checked only; fabricated ids pass through") {
        auto r = session.call_tool("Publish", {{"root_cause_ids", {"res-999"}},
                                               {"impacted_party_ids", {"party-777"}},
                                               {"summary", "made up"}});
        REQUIRE(r.ok());
        REQUIRE(session.published()->root_cause_ids == std::vector<std::string>{"res-999"});
    }
    SECTION("non-string id arrays are malformed") {
        auto r = session.call_tool("Publish", {{"root_cause_ids", {1, 2}},
                                               {"impacted_party_ids", nlohmann::json::array()},
                                               {"summary", "x"}});
        REQUIRE(r.code() == Errc::malformed_arguments);
    }
}

TEST_CASE("every call appears exactly once, in invocation order") {
    Session session(builtin_ptr("oracle-01"), "s1");
    (void)session.call_tool("LookupService", {{"name", "Customer Portal"}});
    (void)session.call_tool("GetWeather", nlohmann::json::object());
    (void)session.call_tool("GetImplementation", {{"service_id", "svc-001"}});
    session.emit_agent_message("checking res-001");

    const Trace t = session.export_trace();
    REQUIRE(t.records.size() == 7);
    for (size_t i = 0; i < t.records.size(); ++i) REQUIRE(t.records[i].index == static_cast<int>(i));
    CHECK(t.records[0].tool == "LookupService");
    CHECK(t.records[2].tool == "GetWeather");
    CHECK(t.records[4].tool == "GetImplementation");
    CHECK(t.records[6].kind == RecordKind::agent_message);

    SECTION("empty session exports an empty trace") {
        Session fresh(builtin_ptr("oracle-01"), "s2");
        REQUIRE(fresh.export_trace().records.empty());
    }
}

TEST_CASE("replaying a trace's calls reproduces identical results") {
    auto scenario = builtin_ptr("oracle-06");
    Session first(scenario, "s1");
    (void)first.call_tool("LookupService", {{"name", "Email Service"}});
    (void)first.call_tool("GetImplementation", {{"service_id", "svc-001"}});
    (void)first.call_tool("GetNotes", {{"resource_id", "res-001"}});
    (void)first.call_tool("GetEvents", {{"resource_id", "res-001"}});
    (void)first.call_tool("GetImpactedServices", {{"resource_id", "res-001"}});
    (void)first.call_tool("GetUsage", {{"service_id", "svc-002"}});
    (void)first.call_tool("BogusTool", nlohmann::json::object());

    Session second(scenario, "s2");
    for (const TraceRecord& r : first.trace().records)
        if (r.kind == RecordKind::tool_call) (void)second.call_tool(r.tool, r.arguments);

    REQUIRE(normalize_trace_timestamps(trace_to_jsonl(first.export_trace())) ==
            normalize_trace_timestamps(trace_to_jsonl(second.export_trace())));
}

TEST_CASE("trace serialization round-trips through jsonl") {
    Session session(builtin_ptr("oracle-09"), "s1");
    (void)session.call_tool("LookupService", {{"name", "Payment Gateway"}});
    (void)session.call_tool("GetEvents", {{"resource_id", "res-001"}});
    (void)session.call_tool("Bogus", nlohmann::json::object());
    session.emit_agent_message("reviewing evt-001, evt-002");

    const std::string jsonl = trace_to_jsonl(session.export_trace());
    auto parsed = trace_from_jsonl(jsonl);
    REQUIRE(parsed.ok());
    REQUIRE(trace_to_jsonl(parsed.value()) == jsonl);

    SECTION("malformed lines are rejected") {
        REQUIRE(trace_from_jsonl("{\"index\":0}\n").code() == Errc::malformed_trace);
        REQUIRE(trace_from_jsonl("not json\n").code() == Errc::malformed_trace);
    }
}

TEST_CASE("a failed session's trace ends with the error-bearing result") {
    Session session(builtin_ptr("oracle-01"), "s1");
    (void)session.call_tool("LookupService", {{"name", "Customer Portal"}});
    auto bad = session.call_tool("GetImplementation", {{"wrong_key", "svc-001"}});
    REQUIRE(bad.code() == Errc::malformed_arguments);
    session.mark_failed();

    const Trace t = session.export_trace();
    REQUIRE(session.state() == Session::State::Failed);
    REQUIRE(t.records.back().kind == RecordKind::tool_result);
    REQUIRE(t.records.back().error.has_value());
    CHECK(t.records.back().error->find("malformed-arguments") == 0);
}

TEST_CASE("tool responses never leak ground truth") {
    for (const Scenario& s : builtin_scenarios()) {
        auto scenario = std::make_shared<const Scenario>(s);
        Session session(scenario, "leakcheck");
        (void)session.call_tool("LookupService", {{"name", "nothing"}});
        for (const auto& [id, e] : scenario->graph.entities()) {
            if (e.kind == NodeKind::Service) {
                (void)session.call_tool("GetImplementation", {{"service_id", id}});
                (void)session.call_tool("GetUsage", {{"service_id", id}});
            } else if (e.kind == NodeKind::Resource) {
                (void)session.call_tool("GetNotes", {{"resource_id", id}});
                (void)session.call_tool("GetEvents", {{"resource_id", id}});
                (void)session.call_tool("GetImpactedServices", {{"resource_id", id}});
            }
        }
        for (const TraceRecord& r : session.trace().records) {
            if (r.kind != RecordKind::tool_result || r.error) continue;
            const std::string dump = r.result.dump();
            CHECK(dump.find("ground_truth") == std::string::npos);
            CHECK(dump.find("root_cause") == std::string::npos);
            CHECK(dump.find("impacted_party") == std::string::npos);
        }
    }
}

TEST_CASE("failed sessions reject further calls") {
    Session session(builtin_ptr("oracle-01"), "s1");
    session.mark_failed();
    REQUIRE(session.state() == Session::State::Failed);
    auto r = session.call_tool("LookupService", {{"name", "Customer Portal"}});
    REQUIRE(r.code() == Errc::session_closed);
}
