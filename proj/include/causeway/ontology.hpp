#pragma once
// Typed infrastructure graph: Service/Resource/Party/Event/Note nodes joined
// by five edge kinds, with edge-kind-restricted reachability.
//
// Canonical stored edge directions:
//   Implements   Resource -> Service
//   ServiceOf    child Service -> parent Service
//   AllocatedTo  Service -> Party
//   AffectedBy   Resource -> Event
//   HasNote      Resource -> Note
//
// sigma(s) walks {ServiceOf, Implements} against the stored direction
// (service down to its resources); rho(r) walks the same kinds with it
// (resource up through every dependent service). One stored edge per fact
// keeps the duality r in sigma(s) <=> s in rho(r) exact.
//
// The graph is mutable during a build phase and frozen by seal(); queries
// never mutate, so a sealed graph is safe to share across reader threads.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "causeway/result.hpp"
#include "causeway/timeutil.hpp"

namespace causeway {

enum class NodeKind : std::uint8_t { Service, Resource, Party, Event, Note };
enum class EdgeKind : std::uint8_t { Implements, AllocatedTo, AffectedBy, ServiceOf, HasNote };

inline constexpr std::array<NodeKind, 5> all_node_kinds = {
    NodeKind::Service, NodeKind::Resource, NodeKind::Party, NodeKind::Event, NodeKind::Note};
inline constexpr std::array<EdgeKind, 5> all_edge_kinds = {
    EdgeKind::Implements, EdgeKind::AllocatedTo, EdgeKind::AffectedBy, EdgeKind::ServiceOf,
    EdgeKind::HasNote};

inline const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Service: return "Service";
        case NodeKind::Resource: return "Resource";
        case NodeKind::Party: return "Party";
        case NodeKind::Event: return "Event";
        case NodeKind::Note: return "Note";
    }
    return "?";
}

inline const char* to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::Implements: return "Implements";
        case EdgeKind::AllocatedTo: return "AllocatedTo";
        case EdgeKind::AffectedBy: return "AffectedBy";
        case EdgeKind::ServiceOf: return "ServiceOf";
        case EdgeKind::HasNote: return "HasNote";
    }
    return "?";
}

inline std::optional<NodeKind> node_kind_from_string(const std::string& s) {
    for (NodeKind k : all_node_kinds)
        if (s == to_string(k)) return k;
    return std::nullopt;
}

inline std::optional<EdgeKind> edge_kind_from_string(const std::string& s) {
    for (EdgeKind k : all_edge_kinds)
        if (s == to_string(k)) return k;
    return std::nullopt;
}

struct Entity {
    std::string id;
    std::string name;
    NodeKind kind = NodeKind::Service;
    std::optional<std::string> description;
    std::optional<Timestamp> start_time;  // Events only
    std::optional<Timestamp> end_time;    // Events only

    bool operator==(const Entity&) const = default;
};

inline Result<void> validate_entity(const Entity& e) {
    if (e.id.empty()) return make_error(Errc::unknown_entity, "entity id must be non-empty");
    if ((e.kind == NodeKind::Event || e.kind == NodeKind::Note) &&
        (!e.description || e.description->empty()))
        return make_error(Errc::missing_description,
                          std::string(to_string(e.kind)) + " '" + e.id +
                              "' requires a non-empty description");
    if (e.end_time && !e.start_time)
        return make_error(Errc::invalid_time_bounds,
                          "'" + e.id + "' has end_time without start_time");
    if (e.start_time && e.end_time && *e.start_time > *e.end_time)
        return make_error(Errc::invalid_time_bounds,
                          "'" + e.id + "' has start_time after end_time");
    if (e.kind != NodeKind::Event && (e.start_time || e.end_time))
        return make_error(Errc::invalid_time_bounds,
                          "'" + e.id + "': time bounds are limited to Event entities");
    return {};
}

struct Edge {
    std::string src;
    std::string dst;
    EdgeKind kind = EdgeKind::Implements;

    bool operator==(const Edge&) const = default;
};

// (src kind, dst kind) each edge kind must connect.
inline std::pair<NodeKind, NodeKind> edge_endpoint_rule(EdgeKind k) {
    switch (k) {
        case EdgeKind::Implements: return {NodeKind::Resource, NodeKind::Service};
        case EdgeKind::AllocatedTo: return {NodeKind::Service, NodeKind::Party};
        case EdgeKind::AffectedBy: return {NodeKind::Resource, NodeKind::Event};
        case EdgeKind::ServiceOf: return {NodeKind::Service, NodeKind::Service};
        case EdgeKind::HasNote: return {NodeKind::Resource, NodeKind::Note};
    }
    return {NodeKind::Service, NodeKind::Service};
}

enum class Orientation { Forward, Reverse };

// Small fixed-size set over the five edge kinds.
class EdgeKindSet {
public:
    constexpr EdgeKindSet() = default;
    constexpr EdgeKindSet(std::initializer_list<EdgeKind> kinds) {
        for (EdgeKind k : kinds) bits_ |= bit(k);
    }
    constexpr bool contains(EdgeKind k) const { return (bits_ & bit(k)) != 0; }
    constexpr bool empty() const { return bits_ == 0; }

private:
    static constexpr std::uint8_t bit(EdgeKind k) {
        return static_cast<std::uint8_t>(1u << static_cast<std::uint8_t>(k));
    }
    std::uint8_t bits_ = 0;
};

// Edge kinds spanning service decomposition and implementation; the travel
// set for both sigma and rho.
inline constexpr EdgeKindSet implementation_kinds() {
    return EdgeKindSet{EdgeKind::ServiceOf, EdgeKind::Implements};
}

class InfrastructureGraph {
public:
    Result<void> add_entity(Entity entity) {
        if (sealed_) return make_error(Errc::graph_sealed, "graph is sealed");
        if (auto v = validate_entity(entity); !v) return v.error();
        if (entities_.count(entity.id))
            return make_error(Errc::duplicate_id, "entity id '" + entity.id + "' already present");
        adjacency_.emplace(entity.id, Adjacency{});
        entities_.emplace(entity.id, std::move(entity));
        return {};
    }

    Result<void> add_edge(const std::string& src, const std::string& dst, EdgeKind kind) {
        if (sealed_) return make_error(Errc::graph_sealed, "graph is sealed");
        const Entity* s = find(src);
        const Entity* d = find(dst);
        if (!s) return make_error(Errc::unknown_entity, "unknown endpoint '" + src + "'");
        if (!d) return make_error(Errc::unknown_entity, "unknown endpoint '" + dst + "'");
        const auto [want_src, want_dst] = edge_endpoint_rule(kind);
        if (s->kind != want_src || d->kind != want_dst)
            return make_error(Errc::kind_constraint,
                              std::string(to_string(kind)) + " requires " +
                                  to_string(want_src) + " -> " + to_string(want_dst) + ", got " +
                                  to_string(s->kind) + " -> " + to_string(d->kind));
        if (edge_keys_.count({src, dst, static_cast<int>(kind)}))
            return make_error(Errc::duplicate_edge, to_string(kind) + (" edge " + src + " -> " + dst) +
                                                        " already present");
        if (kind == EdgeKind::ServiceOf) {
            // Adding child->parent closes a cycle iff the parent already
            // ascends to the child.
            auto reach = trajectory_exists(dst, src, EdgeKindSet{EdgeKind::ServiceOf},
                                           Orientation::Forward);
            if (reach.ok() && reach.value())
                return make_error(Errc::cycle_introduced,
                                  "ServiceOf " + src + " -> " + dst + " would create a cycle");
        }
        edge_keys_.insert({src, dst, static_cast<int>(kind)});
        edges_.push_back(Edge{src, dst, kind});
        insert_sorted(adjacency_[src].out[static_cast<size_t>(kind)], dst);
        insert_sorted(adjacency_[dst].in[static_cast<size_t>(kind)], src);
        return {};
    }

    void seal() { sealed_ = true; }
    bool sealed() const { return sealed_; }

    bool contains(const std::string& id) const { return entities_.count(id) != 0; }

    const Entity* find(const std::string& id) const {
        auto it = entities_.find(id);
        return it == entities_.end() ? nullptr : &it->second;
    }

    // Ordered by id.
    const std::map<std::string, Entity>& entities() const { return entities_; }
    // Insertion order.
    const std::vector<Edge>& edges() const { return edges_; }

    size_t entity_count() const { return entities_.size(); }
    size_t edge_count() const { return edges_.size(); }

    Result<bool> trajectory_exists(const std::string& u, const std::string& v,
                                   EdgeKindSet allowed, Orientation orientation) const {
        if (!contains(u)) return make_error(Errc::unknown_entity, "unknown node '" + u + "'");
        if (!contains(v)) return make_error(Errc::unknown_entity, "unknown node '" + v + "'");
        if (u == v) return true;  // zero-length trajectory
        std::set<std::string> visited{u};
        std::vector<const std::string*> frontier{&u};
        while (!frontier.empty()) {
            std::vector<const std::string*> next;
            for (const std::string* node : frontier) {
                for (EdgeKind k : all_edge_kinds) {
                    if (!allowed.contains(k)) continue;
                    for (const std::string& step : neighbors(*node, k, orientation)) {
                        if (step == v) return true;
                        if (visited.insert(step).second) next.push_back(&*visited.find(step));
                    }
                }
            }
            frontier = std::move(next);
        }
        return false;
    }

    // All Resource nodes reachable from a service against the stored
    // direction of {ServiceOf, Implements}; sorted by id.
    Result<std::vector<std::string>> sigma(const std::string& service_id) const {
        if (auto r = require_kind(service_id, NodeKind::Service); !r) return r.error();
        return collect_reachable(service_id, Orientation::Reverse, NodeKind::Resource);
    }

    // All Service nodes reachable from a resource along {Implements,
    // ServiceOf}, ancestors included; sorted by id.
    Result<std::vector<std::string>> rho(const std::string& resource_id) const {
        if (auto r = require_kind(resource_id, NodeKind::Resource); !r) return r.error();
        return collect_reachable(resource_id, Orientation::Forward, NodeKind::Service);
    }

    // Parties directly allocated to the service; sorted by id.
    Result<std::vector<std::string>> parties_of(const std::string& service_id) const {
        if (auto r = require_kind(service_id, NodeKind::Service); !r) return r.error();
        return neighbors(service_id, EdgeKind::AllocatedTo, Orientation::Forward);
    }

    // Notes attached to the resource; sorted by id.
    Result<std::vector<Entity>> notes_of(const std::string& resource_id) const {
        if (auto r = require_kind(resource_id, NodeKind::Resource); !r) return r.error();
        std::vector<Entity> out;
        for (const std::string& id : neighbors(resource_id, EdgeKind::HasNote, Orientation::Forward))
            out.push_back(*find(id));
        return out;
    }

    // Events affecting the resource; sorted by start_time ascending, then id.
    Result<std::vector<Entity>> events_of(const std::string& resource_id) const {
        if (auto r = require_kind(resource_id, NodeKind::Resource); !r) return r.error();
        std::vector<Entity> out;
        for (const std::string& id :
             neighbors(resource_id, EdgeKind::AffectedBy, Orientation::Forward))
            out.push_back(*find(id));
        std::stable_sort(out.begin(), out.end(), [](const Entity& a, const Entity& b) {
            const Timestamp sa = a.start_time.value_or(INT64_MIN);
            const Timestamp sb = b.start_time.value_or(INT64_MIN);
            return sa != sb ? sa < sb : a.id < b.id;
        });
        return out;
    }

private:
    struct Adjacency {
        std::array<std::vector<std::string>, 5> out;
        std::array<std::vector<std::string>, 5> in;
    };

    static void insert_sorted(std::vector<std::string>& v, const std::string& s) {
        v.insert(std::upper_bound(v.begin(), v.end(), s), s);
    }

    static const std::vector<std::string>& empty_list() {
        static const std::vector<std::string> empty;
        return empty;
    }

    const std::vector<std::string>& neighbors(const std::string& id, EdgeKind kind,
                                              Orientation orientation) const {
        auto it = adjacency_.find(id);
        if (it == adjacency_.end()) return empty_list();
        return orientation == Orientation::Forward ? it->second.out[static_cast<size_t>(kind)]
                                                   : it->second.in[static_cast<size_t>(kind)];
    }

    Result<void> require_kind(const std::string& id, NodeKind kind) const {
        const Entity* e = find(id);
        if (!e)
            return make_error(Errc::unknown_entity,
                              std::string("unknown ") + to_string(kind) + " '" + id + "'");
        if (e->kind != kind)
            return make_error(Errc::wrong_kind, "'" + id + "' is a " + to_string(e->kind) +
                                                    ", expected " + to_string(kind));
        return {};
    }

    std::vector<std::string> collect_reachable(const std::string& origin, Orientation orientation,
                                               NodeKind wanted) const {
        std::set<std::string> visited{origin};
        std::vector<std::string> stack{origin};
        std::vector<std::string> out;
        while (!stack.empty()) {
            std::string node = std::move(stack.back());
            stack.pop_back();
            for (EdgeKind k : {EdgeKind::ServiceOf, EdgeKind::Implements}) {
                for (const std::string& step : neighbors(node, k, orientation)) {
                    if (!visited.insert(step).second) continue;
                    if (find(step)->kind == wanted) out.push_back(step);
                    stack.push_back(step);
                }
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::map<std::string, Entity> entities_;
    std::vector<Edge> edges_;
    std::set<std::tuple<std::string, std::string, int>> edge_keys_;
    std::map<std::string, Adjacency> adjacency_;
    bool sealed_ = false;
};

}  // namespace causeway
