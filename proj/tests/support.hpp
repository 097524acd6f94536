#pragma once
// Shared test fixtures: an independent brute-force reachability oracle,
// a random typed-graph generator, and small trace helpers.
//
// The oracle enumerates every simple path over the raw edge list; it shares
// no traversal code with InfrastructureGraph on purpose.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "causeway/ontology.hpp"
#include "causeway/scenario.hpp"
#include "causeway/trace.hpp"

namespace testsupport {

using namespace causeway;

// --- brute-force oracle ----------------------------------------------------

inline bool oracle_path_dfs(const std::vector<Edge>& edges, const std::string& here,
                            const std::string& goal, EdgeKindSet allowed, Orientation orientation,
                            std::vector<std::string>& path) {
    if (here == goal) return true;
    for (const Edge& e : edges) {
        if (!allowed.contains(e.kind)) continue;
        const std::string& from = orientation == Orientation::Forward ? e.src : e.dst;
        const std::string& to = orientation == Orientation::Forward ? e.dst : e.src;
        if (from != here) continue;
        if (std::find(path.begin(), path.end(), to) != path.end()) continue;
        path.push_back(to);
        if (oracle_path_dfs(edges, to, goal, allowed, orientation, path)) return true;
        path.pop_back();
    }
    return false;
}

inline bool oracle_trajectory(const InfrastructureGraph& g, const std::string& u,
                              const std::string& v, EdgeKindSet allowed, Orientation orientation) {
    std::vector<std::string> path{u};
    return oracle_path_dfs(g.edges(), u, v, allowed, orientation, path);
}

inline std::vector<std::string> oracle_sigma(const InfrastructureGraph& g,
                                             const std::string& service_id) {
    std::vector<std::string> out;
    for (const auto& [id, e] : g.entities())
        if (e.kind == NodeKind::Resource &&
            oracle_trajectory(g, service_id, id, implementation_kinds(), Orientation::Reverse))
            out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<std::string> oracle_rho(const InfrastructureGraph& g,
                                           const std::string& resource_id) {
    std::vector<std::string> out;
    for (const auto& [id, e] : g.entities())
        if (e.kind == NodeKind::Service &&
            oracle_trajectory(g, resource_id, id, implementation_kinds(), Orientation::Forward))
            out.push_back(id);
    std::sort(out.begin(), out.end());
    return out;
}

// --- random typed graphs -----------------------------------------------------

inline int pick(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Random graph honoring all kind constraints; at most `max_nodes` nodes.
inline InfrastructureGraph random_graph(std::uint64_t seed, int max_nodes) {
    std::mt19937_64 rng(seed);
    InfrastructureGraph g;
    const int n_svc = pick(rng, 1, std::max(1, max_nodes / 3));
    const int n_res = pick(rng, 1, std::max(1, max_nodes / 3));
    const int n_party = pick(rng, 0, std::max(1, max_nodes / 6));
    const int n_evt = pick(rng, 0, std::max(1, max_nodes / 6));
    const int n_note = pick(rng, 0, std::max(1, max_nodes / 6));

    auto id = [](const char* p, int i) { return std::string(p) + std::to_string(i); };
    for (int i = 0; i < n_svc; ++i)
        (void)g.add_entity({id("s", i), "service", NodeKind::Service, {}, {}, {}});
    for (int i = 0; i < n_res; ++i)
        (void)g.add_entity({id("r", i), "resource", NodeKind::Resource, {}, {}, {}});
    for (int i = 0; i < n_party; ++i)
        (void)g.add_entity({id("p", i), "party", NodeKind::Party, {}, {}, {}});
    for (int i = 0; i < n_evt; ++i)
        (void)g.add_entity({id("e", i), "event", NodeKind::Event, "some event", {}, {}});
    for (int i = 0; i < n_note; ++i)
        (void)g.add_entity({id("n", i), "note", NodeKind::Note, "some note", {}, {}});

    // ServiceOf: child index > parent index keeps the hierarchy acyclic.
    for (int i = 1; i < n_svc; ++i)
        if (pick(rng, 0, 99) < 50)
            (void)g.add_edge(id("s", i), id("s", pick(rng, 0, i - 1)), EdgeKind::ServiceOf);
    for (int i = 0; i < n_res; ++i) {
        const int fanout = pick(rng, 0, 2);
        for (int k = 0; k < fanout; ++k)
            (void)g.add_edge(id("r", i), id("s", pick(rng, 0, n_svc - 1)), EdgeKind::Implements);
    }
    for (int i = 0; i < n_party; ++i)
        (void)g.add_edge(id("s", pick(rng, 0, n_svc - 1)), id("p", i), EdgeKind::AllocatedTo);
    for (int i = 0; i < n_evt; ++i)
        (void)g.add_edge(id("r", pick(rng, 0, n_res - 1)), id("e", i), EdgeKind::AffectedBy);
    for (int i = 0; i < n_note; ++i)
        (void)g.add_edge(id("r", pick(rng, 0, n_res - 1)), id("n", i), EdgeKind::HasNote);

    g.seal();
    return g;
}

// --- misc helpers ------------------------------------------------------------

inline const Scenario& builtin(const std::vector<Scenario>& all, const std::string& id) {
    for (const Scenario& s : all)
        if (s.scenario_id == id) return s;
    throw std::runtime_error("no builtin scenario " + id);
}
// Returning a reference into a temporary vector must not compile.
const Scenario& builtin(std::vector<Scenario>&&, const std::string&) = delete;

inline Scenario builtin_scenario(const std::string& id) {
    auto all = builtin_scenarios();
    return builtin(all, id);
}

// --- trace mutants -----------------------------------------------------------
// Each mutation edits a clean trace into one specific misbehavior; indexes
// are rewritten so the mutant stays well-formed.

inline void reindex(Trace& t) {
    for (size_t i = 0; i < t.records.size(); ++i) t.records[i].index = static_cast<int>(i);
}

// Position of the i-th tool_call with the given name (and optional argument
// match), or npos.
inline size_t find_call(const Trace& t, const std::string& tool, const std::string& arg_key = {},
                        const std::string& arg_value = {}) {
    for (size_t i = 0; i < t.records.size(); ++i) {
        const TraceRecord& r = t.records[i];
        if (r.kind != RecordKind::tool_call || r.tool != tool) continue;
        if (!arg_key.empty() &&
            (!r.arguments.contains(arg_key) || r.arguments[arg_key] != arg_value))
            continue;
        return i;
    }
    return std::string::npos;
}

// Removes the call at `pos` together with its result.
inline Trace drop_call(Trace t, size_t pos) {
    t.records.erase(t.records.begin() + static_cast<long>(pos),
                    t.records.begin() + static_cast<long>(pos) + 2);
    reindex(t);
    return t;
}

// Moves the call+result pair at `pos` to the front of the trace.
inline Trace hoist_call(Trace t, size_t pos) {
    std::vector<TraceRecord> pair(t.records.begin() + static_cast<long>(pos),
                                  t.records.begin() + static_cast<long>(pos) + 2);
    t.records.erase(t.records.begin() + static_cast<long>(pos),
                    t.records.begin() + static_cast<long>(pos) + 2);
    t.records.insert(t.records.begin(), pair.begin(), pair.end());
    reindex(t);
    return t;
}

// Appends an agent message.
inline Trace add_message(Trace t, const std::string& text) {
    TraceRecord r;
    r.kind = RecordKind::agent_message;
    r.text = text;
    t.records.push_back(std::move(r));
    reindex(t);
    return t;
}

// Appends a call+result pair; `error` empty means success with `result`.
inline Trace add_call(Trace t, const std::string& tool, nlohmann::json arguments,
                      nlohmann::json result_payload, const std::string& error = {}) {
    TraceRecord call;
    call.kind = RecordKind::tool_call;
    call.tool = tool;
    call.arguments = std::move(arguments);
    t.records.push_back(std::move(call));
    TraceRecord result;
    result.kind = RecordKind::tool_result;
    result.tool = tool;
    if (error.empty())
        result.result = std::move(result_payload);
    else
        result.error = error;
    t.records.push_back(std::move(result));
    reindex(t);
    return t;
}

}  // namespace testsupport
