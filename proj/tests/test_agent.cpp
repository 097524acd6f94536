#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <memory>
#include <thread>

#include <httplib.h>

#include "causeway/agent.hpp"
#include "causeway/external_agent.hpp"
#include "support.hpp"

using namespace causeway;
using testsupport::builtin;
using testsupport::builtin_scenario;

namespace {

std::shared_ptr<const Scenario> builtin_ptr(const std::string& id) {
    return std::make_shared<const Scenario>(builtin_scenario(id));
}

Entity event(std::string id, std::string description, Timestamp start,
             std::optional<Timestamp> end = {}) {
    return {std::move(id), "event", NodeKind::Event, std::move(description), start, end};
}

Entity note(std::string id, std::string description) {
    return {std::move(id), "note", NodeKind::Note, std::move(description), {}, {}};
}

std::vector<std::string> tool_call_sequence(const Trace& t) {
    std::vector<std::string> out;
    for (const TraceRecord& r : t.records)
        if (r.kind == RecordKind::tool_call) out.push_back(r.tool);
    return out;
}

}  // namespace

TEST_CASE("classify_evidence keyword and temporal rules") {
    const Timestamp now = 1000000;

    SECTION("critical unresolved event incriminates") {
        auto v = classify_evidence("res-1", {}, {event("evt-1", "Critical disk failure", now - 100)},
                                   now);
        REQUIRE(v.is_root_cause);
        REQUIRE(v.supporting_items == std::vector<std::string>{"evt-1"});
    }
    SECTION("resolved failure does not") {
        auto v = classify_evidence(
            "res-1", {},
            {event("evt-1", "Disk failure resolved: module replaced", now - 5000, now - 4000)},
            now);
        REQUIRE_FALSE(v.is_root_cause);
    }
    SECTION("normal operation never incriminates") {
        auto v = classify_evidence(
            "res-1", {}, {event("evt-1", "Normal operation: health checks passing", now - 100)},
            now);
        REQUIRE_FALSE(v.is_root_cause);
    }
    SECTION("maintenance overlapping now incriminates without incident keywords") {
        auto v = classify_evidence(
            "res-1", {},
            {event("evt-1", "Scheduled maintenance window in progress", now - 100, now + 100)},
            now);
        REQUIRE(v.is_root_cause);
    }
    SECTION("past maintenance does not") {
        auto v = classify_evidence(
            "res-1", {},
            {event("evt-1", "Scheduled maintenance window", now - 500, now - 100)}, now);
        REQUIRE_FALSE(v.is_root_cause);
    }
    SECTION("notes with incident keywords incriminate") {
        auto v = classify_evidence("res-1", {note("note-1", "suspected memory leak")}, {}, now);
        REQUIRE(v.is_root_cause);
        REQUIRE(v.supporting_items == std::vector<std::string>{"note-1"});
    }
    SECTION("healthy notes do not") {
        auto v = classify_evidence("res-1", {note("note-1", "all components healthy")}, {}, now);
        REQUIRE_FALSE(v.is_root_cause);
    }
    SECTION("most recent incriminating event is primary") {
        auto v = classify_evidence("res-1", {},
                                   {event("evt-1", "Critical failure A", now - 500),
                                    event("evt-2", "Critical failure B", now - 100)},
                                   now);
        REQUIRE(v.supporting_items.size() == 2);
        CHECK(v.supporting_items[0] == "evt-2");
    }
    SECTION("pure function: same inputs, same verdict") {
        std::vector<Entity> notes = {note("note-1", "leak suspected")};
        std::vector<Entity> events = {event("evt-1", "Critical outage", now - 10)};
        auto a = classify_evidence("res-1", notes, events, now);
        auto b = classify_evidence("res-1", notes, events, now);
        CHECK(a.is_root_cause == b.is_root_cause);
        CHECK(a.supporting_items == b.supporting_items);
        CHECK(a.rationale == b.rationale);
    }
}

TEST_CASE("classify_evidence on builtin scenario fixtures") {
    auto all = builtin_scenarios();

    SECTION("scenario 7: active maintenance is a valid root cause") {
        const Scenario& s = builtin(all, "oracle-07");
        auto v = classify_evidence("res-001", s.graph.notes_of("res-001").value(),
                                   s.graph.events_of("res-001").value(), s.now);
        REQUIRE(v.is_root_cause);
    }
    SECTION("scenario 9: only the unresolved incident is cited") {
        const Scenario& s = builtin(all, "oracle-09");
        auto v = classify_evidence("res-001", s.graph.notes_of("res-001").value(),
                                   s.graph.events_of("res-001").value(), s.now);
        REQUIRE(v.is_root_cause);
        REQUIRE(v.supporting_items == std::vector<std::string>{"evt-002"});
    }
    SECTION("scenario 10: normal-operation nodes are exonerated") {
        const Scenario& s = builtin(all, "oracle-10");
        for (const char* healthy : {"res-001", "res-003"}) {
            auto v = classify_evidence(healthy, s.graph.notes_of(healthy).value(),
                                       s.graph.events_of(healthy).value(), s.now);
            REQUIRE_FALSE(v.is_root_cause);
        }
        auto faulty = classify_evidence("res-002", s.graph.notes_of("res-002").value(),
                                        s.graph.events_of("res-002").value(), s.now);
        REQUIRE(faulty.is_root_cause);
    }
}

TEST_CASE("quoted service name extraction") {
    REQUIRE(extract_quoted_service_name("Incident on \"Customer Portal\" today").value() ==
            "Customer Portal");
    REQUIRE(extract_quoted_service_name("no quotes here").code() ==
            Errc::service_name_not_extractable);
    REQUIRE(extract_quoted_service_name("empty \"\" quotes").code() ==
            Errc::service_name_not_extractable);
}

TEST_CASE("reference agent executes the canonical plan on scenario 1") {
    Session session(builtin_ptr("oracle-01"), "run");
    ReferenceAgent agent;
    RunResult run = run_investigation(agent, session);

    REQUIRE(run.outcome == RunResult::Outcome::Completed);
    REQUIRE(run.publish.has_value());
    CHECK(run.publish->root_cause_ids == std::vector<std::string>{"res-001"});
    CHECK(run.publish->impacted_party_ids == std::vector<std::string>{"party-001"});

    // seven calls, in protocol order
    CHECK(tool_call_sequence(run.trace) ==
          std::vector<std::string>{"LookupService", "GetImplementation", "GetNotes", "GetEvents",
                                   "GetImpactedServices", "GetUsage", "Publish"});
    CHECK(run.trace.records.front().tool == "LookupService");
}

TEST_CASE("reference agent discriminates on scenario 5") {
    Session session(builtin_ptr("oracle-05"), "run");
    ReferenceAgent agent;
    RunResult run = run_investigation(agent, session);

    REQUIRE(run.outcome == RunResult::Outcome::Completed);
    auto seq = tool_call_sequence(run.trace);
    // notes+events for both resources, impact expansion only for the faulty one
    CHECK(std::count(seq.begin(), seq.end(), "GetNotes") == 2);
    CHECK(std::count(seq.begin(), seq.end(), "GetEvents") == 2);
    CHECK(std::count(seq.begin(), seq.end(), "GetImpactedServices") == 1);
    CHECK(run.publish->root_cause_ids == std::vector<std::string>{"res-002"});
}

TEST_CASE("reference agent matches ground truth on every builtin scenario") {
    for (const Scenario& s : builtin_scenarios()) {
        CAPTURE(s.scenario_id);
        Session session(std::make_shared<const Scenario>(s), "run");
        ReferenceAgent agent;
        RunResult run = run_investigation(agent, session);
        REQUIRE(run.outcome == RunResult::Outcome::Completed);
        CHECK(sorted_unique(run.publish->root_cause_ids) == s.ground_truth.root_cause_ids);
        CHECK(sorted_unique(run.publish->impacted_party_ids) == s.ground_truth.impacted_party_ids);
    }
}

TEST_CASE("reference agent deterministically repeats itself") {
    auto scenario = builtin_ptr("oracle-06");
    auto one_trace = [&] {
        Session session(scenario, "run");
        ReferenceAgent agent;
        return normalize_trace_timestamps(trace_to_jsonl(run_investigation(agent, session).trace));
    };
    REQUIRE(one_trace() == one_trace());
}

TEST_CASE("reference agent publishes inconclusive when nothing incriminates") {
    // scenario 1 graph minus its event
    Scenario s = builtin_scenario("oracle-01");
    Scenario bare;
    bare.scenario_id = "bare";
    bare.title = "no evidence";
    bare.incident_text = s.incident_text;
    bare.now = s.now;
    for (const auto& [id, e] : s.graph.entities())
        if (e.kind != NodeKind::Event) (void)bare.graph.add_entity(e);
    for (const Edge& e : s.graph.edges())
        if (e.kind != EdgeKind::AffectedBy) (void)bare.graph.add_edge(e.src, e.dst, e.kind);
    bare.graph.seal();

    Session session(std::make_shared<const Scenario>(bare), "run");
    ReferenceAgent agent;
    RunResult run = run_investigation(agent, session);
    REQUIRE(run.outcome == RunResult::Outcome::Completed);
    CHECK(run.publish->root_cause_ids.empty());
    CHECK(run.publish->impacted_party_ids.empty());
    CHECK(run.publish->summary.find("Inconclusive") != std::string::npos);
}

TEST_CASE("run_investigation enforces the call budget") {
    struct LoopingAgent : Agent {
        std::string name() const override { return "looper"; }
        Result<void> run(AgentContext& ctx) override {
            for (;;) (void)ctx.call_tool("LookupService", {{"name", "Customer Portal"}});
        }
    };
    Session session(builtin_ptr("oracle-01"), "run");
    LoopingAgent agent;
    RunResult run = run_investigation(agent, session, 200);
    REQUIRE(run.outcome == RunResult::Outcome::LlmError);
    CHECK(run.error.find("call-budget-exceeded") == 0);
    // exactly 200 calls made it into the trace
    CHECK(tool_call_sequence(run.trace).size() == 200);
}

TEST_CASE("agent failures yield LlmError with the trace preserved") {
    SECTION("no quoted service name") {
        Scenario s = builtin_scenario("oracle-01");
        s.incident_text = "Incident: something odd on Customer Portal";
        Session session(std::make_shared<const Scenario>(s), "run");
        ReferenceAgent agent;
        RunResult run = run_investigation(agent, session);
        REQUIRE(run.outcome == RunResult::Outcome::LlmError);
        CHECK(run.error.find("service-name-not-extractable") == 0);
        CHECK(run.trace.records.empty());
        CHECK(session.state() == Session::State::Failed);
    }
    SECTION("immediate publisher completes with a wrong answer") {
        struct GiveUpAgent : Agent {
            std::string name() const override { return "giveup"; }
            Result<void> run(AgentContext& ctx) override {
                auto r = ctx.call_tool("Publish",
                                       {{"root_cause_ids", nlohmann::json::array()},
                                        {"impacted_party_ids", nlohmann::json::array()},
                                        {"summary", "no idea, publishing empty"}});
                return r.ok() ? Result<void>{} : Result<void>{r.error()};
            }
        };
        Session session(builtin_ptr("oracle-01"), "run");
        GiveUpAgent agent;
        RunResult run = run_investigation(agent, session);
        REQUIRE(run.outcome == RunResult::Outcome::Completed);
        CHECK(run.publish->root_cause_ids.empty());
    }
}

// ---------------------------------------------------------------------------
// External agent against a scripted completion service
// ---------------------------------------------------------------------------

namespace {

// Minimal chat-completions stand-in: replays a fixed list of tool calls,
// one per request.
class FakeModelServer {
public:
    explicit FakeModelServer(std::vector<std::pair<std::string, nlohmann::json>> script)
        : script_(std::move(script)) {
        server_.Post("/v1/chat/completions",
                     [this](const httplib::Request&, httplib::Response& res) {
                         const size_t i = step_.fetch_add(1);
                         nlohmann::json message;
                         if (i < script_.size()) {
                             message = {{"role", "assistant"},
                                        {"content", "Step " + std::to_string(i + 1) +
                                                        ": calling " + script_[i].first},
                                        {"tool_calls",
                                         {{{"id", "call-" + std::to_string(i)},
                                           {"type", "function"},
                                           {"function",
                                            {{"name", script_[i].first},
                                             {"arguments", script_[i].second.is_string()
                                                               ? script_[i].second.get<std::string>()
                                                               : script_[i].second.dump()}}}}}}};
                         } else {
                             message = {{"role", "assistant"}, {"content", "done"}};
                         }
                         res.set_content(
                             nlohmann::json{{"choices", {{{"message", message}}}}}.dump(),
                             "application/json");
                     });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
    }
    ~FakeModelServer() {
        server_.stop();
        thread_.join();
    }
    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

private:
    std::vector<std::pair<std::string, nlohmann::json>> script_;
    std::atomic<size_t> step_{0};
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

std::vector<std::pair<std::string, nlohmann::json>> reference_script(const Scenario& s) {
    Session session(std::make_shared<const Scenario>(s), "plan");
    ReferenceAgent agent;
    RunResult run = run_investigation(agent, session);
    std::vector<std::pair<std::string, nlohmann::json>> script;
    for (const TraceRecord& r : run.trace.records)
        if (r.kind == RecordKind::tool_call) script.emplace_back(r.tool, r.arguments);
    return script;
}

}  // namespace

TEST_CASE("external agent adapts a chat-completions service") {
    const Scenario s = builtin_scenario("oracle-01");

    SECTION("scripted replay of the reference plan reaches the same answer") {
        FakeModelServer model(reference_script(s));
        ExternalAgent agent({model.base_url(), "fake-model", "test-key"});
        Session session(std::make_shared<const Scenario>(s), "run");
        RunResult run = run_investigation(agent, session);
        REQUIRE(run.outcome == RunResult::Outcome::Completed);
        CHECK(sorted_unique(run.publish->root_cause_ids) == s.ground_truth.root_cause_ids);
        CHECK(sorted_unique(run.publish->impacted_party_ids) ==
              s.ground_truth.impacted_party_ids);
    }
    SECTION("a nonexistent tool call is recorded; the run can still publish") {
        auto script = reference_script(s);
        script.insert(script.begin(),
                      {std::string("GetWeather"), nlohmann::json{{"city", "Lisbon"}}});
        FakeModelServer model(script);
        ExternalAgent agent({model.base_url(), "fake-model", ""});
        Session session(std::make_shared<const Scenario>(s), "run");
        RunResult run = run_investigation(agent, session);
        REQUIRE(run.outcome == RunResult::Outcome::Completed);
        bool misuse_recorded = false;
        for (const TraceRecord& r : run.trace.records)
            if (r.kind == RecordKind::tool_result && r.error &&
                r.error->find("unknown-tool") == 0)
                misuse_recorded = true;
        CHECK(misuse_recorded);
    }
    SECTION("malformed tool arguments are recorded as malformed-arguments") {
        auto script = reference_script(s);
        script.insert(script.begin(),
                      {std::string("LookupService"), nlohmann::json("{not json at all")});
        FakeModelServer model(script);
        ExternalAgent agent({model.base_url(), "fake-model", ""});
        Session session(std::make_shared<const Scenario>(s), "run");
        RunResult run = run_investigation(agent, session);
        REQUIRE(run.outcome == RunResult::Outcome::Completed);
        bool malformed_recorded = false;
        for (const TraceRecord& r : run.trace.records)
            if (r.kind == RecordKind::tool_result && r.error &&
                r.error->find("malformed-arguments") == 0)
                malformed_recorded = true;
        CHECK(malformed_recorded);
    }
    SECTION("unreachable endpoint fails the run") {
        ExternalAgent agent({"http://127.0.0.1:1/v1", "fake-model", ""});
        Session session(std::make_shared<const Scenario>(s), "run");
        RunResult run = run_investigation(agent, session);
        REQUIRE(run.outcome == RunResult::Outcome::LlmError);
        CHECK(run.error.find("transport-failure") == 0);
    }
    SECTION("a model that stops calling tools fails after nudges") {
        FakeModelServer model({});
        ExternalAgent agent({model.base_url(), "fake-model", ""});
        Session session(std::make_shared<const Scenario>(s), "run");
        RunResult run = run_investigation(agent, session);
        REQUIRE(run.outcome == RunResult::Outcome::LlmError);
    }
}
