#pragma once
// Scenarios: a sealed infrastructure graph, an incident message naming one
// service, a scenario clock, and hidden ground truth (root-cause resources
// and the parties they impact).
//
// File format: one UTF-8 JSON document per scenario. Top-level keys:
//   scenario_id, title, incident_text, now (optional RFC 3339),
//   entities [{id, name, kind, description?, start_time?, end_time?}],
//   edges [{src, dst, kind}],
//   ground_truth {root_cause_ids, impacted_party_ids}
// Kind tokens are exactly the Service/Resource/Party/Event/Note and
// Implements/AllocatedTo/AffectedBy/ServiceOf/HasNote spellings.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "causeway/ontology.hpp"
#include "causeway/result.hpp"
#include "causeway/timeutil.hpp"

namespace causeway {

using nlohmann::json;

struct GroundTruth {
    std::vector<std::string> root_cause_ids;      // sorted, unique
    std::vector<std::string> impacted_party_ids;  // sorted, unique

    bool operator==(const GroundTruth&) const = default;
};

struct Scenario {
    std::string scenario_id;
    std::string title;
    InfrastructureGraph graph;
    std::string incident_text;
    Timestamp now = 0;  // scenario clock, not the wall clock
    GroundTruth ground_truth;
};

// When a document carries no clock and no events, the clock defaults here.
inline constexpr Timestamp kFallbackScenarioClock = 1704067200;  // 2024-01-01T00:00:00Z

inline Timestamp default_scenario_clock(const InfrastructureGraph& graph) {
    Timestamp latest = INT64_MIN;
    for (const auto& [id, e] : graph.entities())
        if (e.kind == NodeKind::Event && e.start_time) latest = std::max(latest, *e.start_time);
    return latest == INT64_MIN ? kFallbackScenarioClock : latest + 3600;
}

// ---------------------------------------------------------------------------
// JSON codecs
// ---------------------------------------------------------------------------

inline json entity_to_json(const Entity& e) {
    json j;
    j["id"] = e.id;
    j["name"] = e.name;
    j["kind"] = to_string(e.kind);
    if (e.description) j["description"] = *e.description;
    if (e.start_time) j["start_time"] = format_rfc3339(*e.start_time);
    if (e.end_time) j["end_time"] = format_rfc3339(*e.end_time);
    return j;
}

inline Result<Entity> entity_from_json(const json& j) {
    if (!j.is_object() || !j.contains("id") || !j.contains("name") || !j.contains("kind") ||
        !j["id"].is_string() || !j["name"].is_string() || !j["kind"].is_string())
        return make_error(Errc::parse_error, "entity requires string id, name, kind");
    Entity e;
    e.id = j["id"].get<std::string>();
    e.name = j["name"].get<std::string>();
    auto kind = node_kind_from_string(j["kind"].get<std::string>());
    if (!kind)
        return make_error(Errc::parse_error,
                          "unknown node kind '" + j["kind"].get<std::string>() + "'");
    e.kind = *kind;
    if (j.contains("description")) {
        if (!j["description"].is_string())
            return make_error(Errc::parse_error, "description must be a string");
        e.description = j["description"].get<std::string>();
    }
    for (const char* key : {"start_time", "end_time"}) {
        if (!j.contains(key)) continue;
        if (!j[key].is_string())
            return make_error(Errc::parse_error, std::string(key) + " must be an RFC 3339 string");
        auto ts = parse_rfc3339(j[key].get<std::string>());
        if (!ts)
            return make_error(Errc::parse_error,
                              "bad timestamp '" + j[key].get<std::string>() + "'");
        (std::string(key) == "start_time" ? e.start_time : e.end_time) = *ts;
    }
    return e;
}

inline json scenario_to_json(const Scenario& s) {
    json j;
    j["scenario_id"] = s.scenario_id;
    j["title"] = s.title;
    j["incident_text"] = s.incident_text;
    j["now"] = format_rfc3339(s.now);
    j["entities"] = json::array();
    for (const auto& [id, e] : s.graph.entities()) j["entities"].push_back(entity_to_json(e));
    j["edges"] = json::array();
    for (const Edge& e : s.graph.edges())
        j["edges"].push_back(json{{"src", e.src}, {"dst", e.dst}, {"kind", to_string(e.kind)}});
    j["ground_truth"] = json{{"root_cause_ids", s.ground_truth.root_cause_ids},
                             {"impacted_party_ids", s.ground_truth.impacted_party_ids}};
    return j;
}

inline std::string scenario_to_string(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

// The service the incident text refers to: exactly one service name must
// occur verbatim in the text.
inline Result<std::string> incident_service_id(const InfrastructureGraph& graph,
                                               const std::string& incident_text) {
    std::vector<std::string> hits;
    for (const auto& [id, e] : graph.entities()) {
        if (e.kind != NodeKind::Service) continue;
        if (!e.name.empty() && incident_text.find(e.name) != std::string::npos) hits.push_back(id);
    }
    if (hits.size() == 1) return hits.front();
    return make_error(Errc::scenario_invariant,
                      "incident text names " + std::to_string(hits.size()) +
                          " services, expected exactly 1");
}

inline std::vector<std::string> sorted_unique(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Union of parties_of over rho for the given resources.
inline Result<std::vector<std::string>> impacted_parties(const InfrastructureGraph& graph,
                                                         const std::vector<std::string>& roots) {
    std::set<std::string> parties;
    for (const std::string& r : roots) {
        auto services = graph.rho(r);
        if (!services) return services.error();
        for (const std::string& s : services.value()) {
            auto p = graph.parties_of(s);
            if (!p) return p.error();
            parties.insert(p.value().begin(), p.value().end());
        }
    }
    return std::vector<std::string>(parties.begin(), parties.end());
}

inline Result<void> validate_scenario(const Scenario& s) {
    auto svc = incident_service_id(s.graph, s.incident_text);
    if (!svc) return svc.error();

    if (s.ground_truth.root_cause_ids.empty())
        return make_error(Errc::ground_truth_mismatch, "root_cause_ids must be non-empty");

    auto scope = s.graph.sigma(svc.value());
    if (!scope) return scope.error();
    for (const std::string& r : s.ground_truth.root_cause_ids)
        if (!std::binary_search(scope.value().begin(), scope.value().end(), r))
            return make_error(Errc::ground_truth_mismatch,
                              "root cause '" + r + "' is not in sigma of the incident service");

    auto recomputed = impacted_parties(s.graph, s.ground_truth.root_cause_ids);
    if (!recomputed) return recomputed.error();
    if (recomputed.value() != sorted_unique(s.ground_truth.impacted_party_ids))
        return make_error(Errc::ground_truth_mismatch,
                          "declared impacted parties differ from recomputation");
    return {};
}

inline Result<Scenario> load_scenario(const std::string& document) {
    json j = json::parse(document, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        return make_error(Errc::parse_error, "scenario document is not a JSON object");
    for (const char* key : {"scenario_id", "title", "incident_text"})
        if (!j.contains(key) || !j[key].is_string())
            return make_error(Errc::parse_error, std::string("missing string key '") + key + "'");
    if (!j.contains("entities") || !j["entities"].is_array() || !j.contains("edges") ||
        !j["edges"].is_array() || !j.contains("ground_truth") || !j["ground_truth"].is_object())
        return make_error(Errc::parse_error, "missing entities/edges/ground_truth");

    Scenario s;
    s.scenario_id = j["scenario_id"].get<std::string>();
    s.title = j["title"].get<std::string>();
    s.incident_text = j["incident_text"].get<std::string>();

    for (const json& je : j["entities"]) {
        auto e = entity_from_json(je);
        if (!e) return e.error();
        if (auto r = s.graph.add_entity(std::move(e).take()); !r)
            return make_error(Errc::graph_invariant, r.error().to_string());
    }
    for (const json& je : j["edges"]) {
        if (!je.is_object() || !je.contains("src") || !je.contains("dst") || !je.contains("kind") ||
            !je["src"].is_string() || !je["dst"].is_string() || !je["kind"].is_string())
            return make_error(Errc::parse_error, "edge requires string src, dst, kind");
        auto kind = edge_kind_from_string(je["kind"].get<std::string>());
        if (!kind)
            return make_error(Errc::parse_error,
                              "unknown edge kind '" + je["kind"].get<std::string>() + "'");
        if (auto r = s.graph.add_edge(je["src"].get<std::string>(), je["dst"].get<std::string>(),
                                      *kind);
            !r)
            return make_error(Errc::graph_invariant, r.error().to_string());
    }
    s.graph.seal();

    if (j.contains("now")) {
        if (!j["now"].is_string())
            return make_error(Errc::parse_error, "now must be an RFC 3339 string");
        auto ts = parse_rfc3339(j["now"].get<std::string>());
        if (!ts) return make_error(Errc::parse_error, "bad timestamp in 'now'");
        s.now = *ts;
    } else {
        s.now = default_scenario_clock(s.graph);
    }

    const json& gt = j["ground_truth"];
    if (!gt.contains("root_cause_ids") || !gt["root_cause_ids"].is_array() ||
        !gt.contains("impacted_party_ids") || !gt["impacted_party_ids"].is_array())
        return make_error(Errc::parse_error, "ground_truth requires two id arrays");
    for (const json& v : gt["root_cause_ids"]) {
        if (!v.is_string()) return make_error(Errc::parse_error, "root_cause_ids must be strings");
        s.ground_truth.root_cause_ids.push_back(v.get<std::string>());
    }
    for (const json& v : gt["impacted_party_ids"]) {
        if (!v.is_string())
            return make_error(Errc::parse_error, "impacted_party_ids must be strings");
        s.ground_truth.impacted_party_ids.push_back(v.get<std::string>());
    }
    s.ground_truth.root_cause_ids = sorted_unique(std::move(s.ground_truth.root_cause_ids));
    s.ground_truth.impacted_party_ids = sorted_unique(std::move(s.ground_truth.impacted_party_ids));

    if (auto v = validate_scenario(s); !v) return v.error();
    return s;
}

// ---------------------------------------------------------------------------
// Builtin oracle scenarios
// ---------------------------------------------------------------------------

namespace detail {

inline Timestamp ts(const char* rfc3339) {
    auto v = parse_rfc3339(rfc3339);
    return v ? *v : 0;
}

struct ScenarioBuilder {
    Scenario s;

    ScenarioBuilder(std::string id, std::string title, std::string incident, const char* now) {
        s.scenario_id = std::move(id);
        s.title = std::move(title);
        s.incident_text = std::move(incident);
        s.now = ts(now);
    }

    ScenarioBuilder& entity(std::string id, std::string name, NodeKind kind,
                            std::optional<std::string> description = std::nullopt,
                            const char* start = nullptr, const char* end = nullptr) {
        Entity e;
        e.id = std::move(id);
        e.name = std::move(name);
        e.kind = kind;
        e.description = std::move(description);
        if (start) e.start_time = ts(start);
        if (end) e.end_time = ts(end);
        auto r = s.graph.add_entity(std::move(e));
        assert(r.ok());
        (void)r;
        return *this;
    }

    ScenarioBuilder& edge(const std::string& src, const std::string& dst, EdgeKind kind) {
        auto r = s.graph.add_edge(src, dst, kind);
        assert(r.ok());
        (void)r;
        return *this;
    }

    Scenario finish(std::vector<std::string> roots) {
        s.graph.seal();
        s.ground_truth.root_cause_ids = sorted_unique(std::move(roots));
        auto parties = impacted_parties(s.graph, s.ground_truth.root_cause_ids);
        assert(parties.ok());
        s.ground_truth.impacted_party_ids = std::move(parties).take();
        return std::move(s);
    }
};

}  // namespace detail

// The ten-case oracle set. Each case fixes one aspect of the investigation:
// single-resource baseline, multi-party fanout, note-only evidence, service
// hierarchies, faulty-resource discrimination, shared resources, maintenance
// windows, deep hierarchies, temporal ordering, and decoy filtering.
inline std::vector<Scenario> builtin_scenarios() {
    using detail::ScenarioBuilder;
    constexpr const char* kNow = "2024-03-15T12:00:00Z";
    std::vector<Scenario> out;

    out.push_back(
        ScenarioBuilder("oracle-01", "Simple Storage Failure",
                        "Incident: customers report errors on \"Customer Portal\".", kNow)
            .entity("svc-001", "Customer Portal", NodeKind::Service)
            .entity("res-001", "Storage Array A", NodeKind::Resource)
            .entity("party-001", "Acme Corp", NodeKind::Party)
            .entity("evt-001", "Disk failure", NodeKind::Event,
                    "Critical disk failure on the primary storage array", "2024-03-15T10:30:00Z")
            .edge("res-001", "svc-001", EdgeKind::Implements)
            .edge("svc-001", "party-001", EdgeKind::AllocatedTo)
            .edge("res-001", "evt-001", EdgeKind::AffectedBy)
            .finish({"res-001"}));

    out.push_back(
        ScenarioBuilder("oracle-02", "Network Switch Impact",
                        "Incident: widespread connectivity loss reported on \"Corporate Network\".",
                        kNow)
            .entity("svc-001", "Corporate Network", NodeKind::Service)
            .entity("res-001", "Core Network Switch", NodeKind::Resource)
            .entity("party-001", "Globex Industries", NodeKind::Party)
            .entity("party-002", "Initech LLC", NodeKind::Party)
            .entity("party-003", "Umbrella Health", NodeKind::Party)
            .entity("evt-001", "Switch hardware failure", NodeKind::Event,
                    "Critical hardware failure on the core network switch", "2024-03-15T10:30:00Z")
            .edge("res-001", "svc-001", EdgeKind::Implements)
            .edge("svc-001", "party-001", EdgeKind::AllocatedTo)
            .edge("svc-001", "party-002", EdgeKind::AllocatedTo)
            .edge("svc-001", "party-003", EdgeKind::AllocatedTo)
            .edge("res-001", "evt-001", EdgeKind::AffectedBy)
            .finish({"res-001"}));

    out.push_back(
        ScenarioBuilder("oracle-03", "Server Issue via Note",
                        "Incident: slow responses and timeouts on \"Inventory System\".", kNow)
            .entity("svc-001", "Inventory System", NodeKind::Service)
            .entity("res-001", "Application Server B", NodeKind::Resource)
            .entity("party-001", "Wayne Retail", NodeKind::Party)
            .entity("note-001", "Operator note", NodeKind::Note,
                    "Suspected memory leak in the order batch process; nightly restarts observed")
            .edge("res-001", "svc-001", EdgeKind::Implements)
            .edge("svc-001", "party-001", EdgeKind::AllocatedTo)
            .edge("res-001", "note-001", EdgeKind::HasNote)
            .finish({"res-001"}));

    out.push_back(
        ScenarioBuilder("oracle-04", "Hierarchical Service",
                        "Incident: page load failures reported on \"Business Portal\".", kNow)
            .entity("svc-001", "Business Portal", NodeKind::Service)
            .entity("svc-002", "Web Frontend", NodeKind::Service)
            .entity("res-001", "Web Server Cluster", NodeKind::Resource)
            .entity("party-001", "Stark Logistics", NodeKind::Party)
            .entity("evt-001", "CPU saturation", NodeKind::Event,
                    "Critical CPU saturation causing degraded response times",
                    "2024-03-15T10:30:00Z")
            .edge("svc-002", "svc-001", EdgeKind::ServiceOf)
            .edge("res-001", "svc-002", EdgeKind::Implements)
            .edge("svc-001", "party-001", EdgeKind::AllocatedTo)
            .edge("res-001", "evt-001", EdgeKind::AffectedBy)
            .finish({"res-001"}));

    out.push_back(
        ScenarioBuilder("oracle-05", "Multiple Resources One Faulty",
                        "Incident: intermittent page errors on \"Company Website\".", kNow)
            .entity("svc-001", "Company Website", NodeKind::Service)
            .entity("res-001", "Web Server Alpha", NodeKind::Resource)
            .entity("res-002", "Web Server Beta", NodeKind::Resource)
            .entity("party-001", "Soylent Media", NodeKind::Party)
            .entity("evt-001", "HTTP 500 spike", NodeKind::Event,
                    "Web server failed: repeated HTTP 500 errors in access logs",
                    "2024-03-15T10:30:00Z")
            .edge("res-001", "svc-001", EdgeKind::Implements)
            .edge("res-002", "svc-001", EdgeKind::Implements)
            .edge("svc-001", "party-001", EdgeKind::AllocatedTo)
            .edge("res-002", "evt-001", EdgeKind::AffectedBy)
            .finish({"res-002"}));

    out.push_back(
        ScenarioBuilder("oracle-06", "Shared Resource Multiple Services",
                        "Incident: messages stuck in outbox for \"Email Service\".", kNow)
            .entity("svc-001", "Email Service", NodeKind::Service)
            .entity("svc-002", "Calendar Service", NodeKind::Service)
            .entity("res-001", "Mail Server MX1", NodeKind::Resource)
            .entity("party-001", "Hooli GmbH", NodeKind::Party)
            .entity("party-002", "Pied Piper Inc", NodeKind::Party)
            .entity("evt-001", "Mail server outage", NodeKind::Event,
                    "Critical outage: mail server not responding to connections",
                    "2024-03-15T10:30:00Z")
            .edge("res-001", "svc-001", EdgeKind::Implements)
            .edge("res-001", "svc-002", EdgeKind::Implements)
            .edge("svc-001", "party-001", EdgeKind::AllocatedTo)
            .edge("svc-002", "party-002", EdgeKind::AllocatedTo)
            .edge("res-001", "evt-001", EdgeKind::AffectedBy)
            .finish({"res-001"}));

    out.push_back(
        ScenarioBuilder("oracle-07", "Maintenance Event",
                        "Incident: playback interruptions reported on \"Streaming Platform\".",
                        kNow)
            .entity("svc-001", "Streaming Platform", NodeKind::Service)
            .entity("res-001", "Transcoding Node 3", NodeKind::Resource)
            .entity("party-001", "Vandelay Studios", NodeKind::Party)
            .entity("evt-001", "Planned maintenance", NodeKind::Event,
                    "Scheduled maintenance window: storage firmware upgrade in progress",
                    "2024-03-15T11:00:00Z", "2024-03-15T15:00:00Z")
            .edge("res-001", "svc-001", EdgeKind::Implements)
            .edge("svc-001", "party-001", EdgeKind::AllocatedTo)
            .edge("res-001", "evt-001", EdgeKind::AffectedBy)
            .finish({"res-001"}));

    out.push_back(
        ScenarioBuilder("oracle-08", "Deep Service Hierarchy",
                        "Incident: dashboards empty across \"Enterprise Suite\".", kNow)
            .entity("svc-001", "Enterprise Suite", NodeKind::Service)
            .entity("svc-002", "Analytics Module", NodeKind::Service)
            .entity("svc-003", "Data Processing", NodeKind::Service)
            .entity("res-001", "Compute Cluster C1", NodeKind::Resource)
            .entity("party-001", "Massive Dynamic", NodeKind::Party)
            .entity("evt-001", "Scheduler fault", NodeKind::Event,
                    "Critical job scheduler failure: batch pipelines halted",
                    "2024-03-15T10:30:00Z")
            .edge("svc-002", "svc-001", EdgeKind::ServiceOf)
            .edge("svc-003", "svc-002", EdgeKind::ServiceOf)
            .edge("res-001", "svc-003", EdgeKind::Implements)
            .edge("svc-001", "party-001", EdgeKind::AllocatedTo)
            .edge("res-001", "evt-001", EdgeKind::AffectedBy)
            .finish({"res-001"}));

    out.push_back(
        ScenarioBuilder("oracle-09", "Multiple Events Same Resource",
                        "Incident: declined transactions spiking on \"Payment Gateway\".", kNow)
            .entity("svc-001", "Payment Gateway", NodeKind::Service)
            .entity("res-001", "Primary Database Server", NodeKind::Resource)
            .entity("party-001", "Gringotts Finance", NodeKind::Party)
            .entity("evt-001", "Past maintenance", NodeKind::Event,
                    "Scheduled maintenance completed: storage controllers replaced",
                    "2024-02-14T02:00:00Z", "2024-02-14T06:00:00Z")
            .entity("evt-002", "Database incident", NodeKind::Event,
                    "Critical database failure: transactions timing out", "2024-03-15T10:00:00Z")
            .edge("res-001", "svc-001", EdgeKind::Implements)
            .edge("svc-001", "party-001", EdgeKind::AllocatedTo)
            .edge("res-001", "evt-001", EdgeKind::AffectedBy)
            .edge("res-001", "evt-002", EdgeKind::AffectedBy)
            .finish({"res-001"}));

    out.push_back(
        ScenarioBuilder("oracle-10", "Clear Root Cause Among Many",
                        "Incident: slow downloads reported on \"Content Delivery\".", kNow)
            .entity("svc-001", "Content Delivery", NodeKind::Service)
            .entity("res-001", "CDN Node US East", NodeKind::Resource)
            .entity("res-002", "CDN Node EU West", NodeKind::Resource)
            .entity("res-003", "CDN Node AP South", NodeKind::Resource)
            .entity("party-001", "Aperture Streaming", NodeKind::Party)
            .entity("evt-001", "Status report", NodeKind::Event,
                    "Normal operation: all health checks passing", "2024-03-15T09:00:00Z")
            .entity("evt-002", "Cache incident", NodeKind::Event,
                    "Critical cache failure: node serving stale and partial objects",
                    "2024-03-15T10:30:00Z")
            .entity("evt-003", "Status report", NodeKind::Event,
                    "Normal operation: all health checks passing", "2024-03-15T09:00:00Z")
            .edge("res-001", "svc-001", EdgeKind::Implements)
            .edge("res-002", "svc-001", EdgeKind::Implements)
            .edge("res-003", "svc-001", EdgeKind::Implements)
            .edge("svc-001", "party-001", EdgeKind::AllocatedTo)
            .edge("res-001", "evt-001", EdgeKind::AffectedBy)
            .edge("res-002", "evt-002", EdgeKind::AffectedBy)
            .edge("res-003", "evt-003", EdgeKind::AffectedBy)
            .finish({"res-002"}));

    return out;
}

// ---------------------------------------------------------------------------
// Seeded random scenarios
// ---------------------------------------------------------------------------

struct GeneratorBounds {
    int services_min = 1, services_max = 3;
    int resources_min = 1, resources_max = 5;
    int parties_min = 1, parties_max = 3;
};

namespace detail {

// Engine-only bounded draw; keeps generated scenarios a pure function of the
// seed regardless of standard-library distribution internals.
inline int draw(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline std::string padded_id(const char* prefix, int ordinal) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%03d", prefix, ordinal);
    return buf;
}

}  // namespace detail

// Deterministic for a fixed seed. Exactly one resource carries an unresolved
// critical event; every other resource carries nothing or benign evidence.
inline Result<Scenario> generate_random_scenario(std::uint64_t seed,
                                                 const GeneratorBounds& bounds = {}) {
    if (bounds.services_min < 1 || bounds.resources_min < 1 || bounds.parties_min < 1 ||
        bounds.services_max < bounds.services_min ||
        bounds.resources_max < bounds.resources_min || bounds.parties_max < bounds.parties_min)
        return make_error(Errc::infeasible_bounds,
                          "bounds must allow at least one service, resource, and party");
    if (bounds.services_max > 99 || bounds.resources_max > 99 || bounds.parties_max > 99)
        return make_error(Errc::infeasible_bounds, "at most 99 nodes per kind");

    std::mt19937_64 rng(seed);
    const int n_svc = detail::draw(rng, bounds.services_min, bounds.services_max);
    const int n_res = detail::draw(rng, bounds.resources_min, bounds.resources_max);
    const int n_party = detail::draw(rng, bounds.parties_min, bounds.parties_max);

    Scenario s;
    s.scenario_id = "gen-" + std::to_string(seed);
    s.title = "Generated scenario " + std::to_string(seed);

    char namebuf[32];
    std::vector<std::string> svc_ids, res_ids, party_ids;
    for (int i = 1; i <= n_svc; ++i) {
        svc_ids.push_back(detail::padded_id("svc-", i));
        std::snprintf(namebuf, sizeof(namebuf), "Service %02d", i);
        (void)s.graph.add_entity(Entity{svc_ids.back(), namebuf, NodeKind::Service, {}, {}, {}});
    }
    for (int i = 1; i <= n_res; ++i) {
        res_ids.push_back(detail::padded_id("res-", i));
        std::snprintf(namebuf, sizeof(namebuf), "Resource %02d", i);
        (void)s.graph.add_entity(Entity{res_ids.back(), namebuf, NodeKind::Resource, {}, {}, {}});
    }
    for (int i = 1; i <= n_party; ++i) {
        party_ids.push_back(detail::padded_id("party-", i));
        std::snprintf(namebuf, sizeof(namebuf), "Party %02d", i);
        (void)s.graph.add_entity(Entity{party_ids.back(), namebuf, NodeKind::Party, {}, {}, {}});
    }

    // Service forest; parents always have a lower ordinal, so no cycles.
    for (int i = 1; i < n_svc; ++i)
        if (detail::draw(rng, 0, 99) < 45)
            (void)s.graph.add_edge(svc_ids[i], svc_ids[detail::draw(rng, 0, i - 1)],
                                   EdgeKind::ServiceOf);

    for (int i = 0; i < n_res; ++i) {
        const int fanout = 1 + (detail::draw(rng, 0, 99) < 30 ? 1 : 0);
        for (int k = 0; k < fanout; ++k)
            (void)s.graph.add_edge(res_ids[i], svc_ids[detail::draw(rng, 0, n_svc - 1)],
                                   EdgeKind::Implements);  // duplicates rejected, acceptable
    }

    for (int i = 0; i < n_party; ++i)
        (void)s.graph.add_edge(svc_ids[detail::draw(rng, 0, n_svc - 1)], party_ids[i],
                               EdgeKind::AllocatedTo);

    // Incident service: any service whose implementation is non-empty.
    std::vector<std::string> candidates;
    for (const std::string& id : svc_ids) {
        auto scope = s.graph.sigma(id);
        if (scope.ok() && !scope.value().empty()) candidates.push_back(id);
    }
    const std::string incident_svc =
        candidates[static_cast<size_t>(detail::draw(rng, 0, static_cast<int>(candidates.size()) - 1))];
    auto scope = s.graph.sigma(incident_svc);
    const std::string root =
        scope.value()[static_cast<size_t>(detail::draw(rng, 0, static_cast<int>(scope.value().size()) - 1))];

    // Make sure the impacted set is non-empty before sealing.
    {
        auto parties = impacted_parties(s.graph, {root});
        if (parties.ok() && parties.value().empty()) {
            auto services = s.graph.rho(root);
            (void)s.graph.add_edge(services.value().front(), party_ids.front(),
                                   EdgeKind::AllocatedTo);
        }
    }

    const Timestamp base = detail::ts("2024-06-01T12:00:00Z");
    int evt_ordinal = 0, note_ordinal = 0;
    {
        Entity fault;
        fault.id = detail::padded_id("evt-", ++evt_ordinal);
        fault.name = "Active incident";
        fault.kind = NodeKind::Event;
        fault.description =
            "Critical hardware failure detected on " + std::string(s.graph.find(root)->name);
        fault.start_time = base - 7200;
        (void)s.graph.add_entity(std::move(fault));
        (void)s.graph.add_edge(root, detail::padded_id("evt-", evt_ordinal), EdgeKind::AffectedBy);
    }
    for (const std::string& rid : res_ids) {
        if (rid == root) continue;
        const int roll = detail::draw(rng, 0, 99);
        if (roll < 40) continue;  // clean resource
        if (roll < 70) {
            Entity e;
            e.id = detail::padded_id("evt-", ++evt_ordinal);
            e.name = "Status report";
            e.kind = NodeKind::Event;
            e.description = "Normal operation: health checks passing";
            e.start_time = base - 10800;
            (void)s.graph.add_entity(std::move(e));
            (void)s.graph.add_edge(rid, detail::padded_id("evt-", evt_ordinal),
                                   EdgeKind::AffectedBy);
        } else if (roll < 90) {
            Entity e;
            e.id = detail::padded_id("evt-", ++evt_ordinal);
            e.name = "Closed incident";
            e.kind = NodeKind::Event;
            e.description = "Disk failure resolved: faulty module replaced";
            e.start_time = base - 864000;
            e.end_time = base - 860400;
            (void)s.graph.add_entity(std::move(e));
            (void)s.graph.add_edge(rid, detail::padded_id("evt-", evt_ordinal),
                                   EdgeKind::AffectedBy);
        } else {
            Entity e;
            e.id = detail::padded_id("note-", ++note_ordinal);
            e.name = "Operator note";
            e.kind = NodeKind::Note;
            e.description = "Routine inspection: all components healthy";
            (void)s.graph.add_entity(std::move(e));
            (void)s.graph.add_edge(rid, detail::padded_id("note-", note_ordinal),
                                   EdgeKind::HasNote);
        }
    }

    s.graph.seal();
    s.now = default_scenario_clock(s.graph);
    s.incident_text = "Incident: degraded performance reported on \"" +
                      std::string(s.graph.find(incident_svc)->name) + "\".";
    s.ground_truth.root_cause_ids = {root};
    auto parties = impacted_parties(s.graph, s.ground_truth.root_cause_ids);
    if (!parties) return parties.error();
    s.ground_truth.impacted_party_ids = std::move(parties).take();

    if (auto v = validate_scenario(s); !v) return v.error();
    return s;
}

}  // namespace causeway
