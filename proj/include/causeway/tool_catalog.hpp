#pragma once
// The seven investigation tools. This catalog is the whole tool surface:
// agents obtain infrastructure data through these calls and nothing else.

#include <string>
#include <vector>

#include <json.hpp>

namespace causeway {

struct ToolDescriptor {
    std::string name;
    std::string description;
    nlohmann::json input_schema;
    nlohmann::json output_schema;
};

namespace detail {

inline nlohmann::json entity_schema() {
    return nlohmann::json{
        {"type", "object"},
        {"properties",
         {{"id", {{"type", "string"}}},
          {"name", {{"type", "string"}}},
          {"kind", {{"type", "string"}}},
          {"description", {{"type", "string"}}},
          {"start_time", {{"type", "string"}, {"format", "date-time"}}},
          {"end_time", {{"type", "string"}, {"format", "date-time"}}}}},
        {"required", {"id", "name", "kind"}}};
}

inline nlohmann::json entity_array_schema() {
    return nlohmann::json{{"type", "array"}, {"items", entity_schema()}};
}

inline nlohmann::json one_string_arg(const char* key, const char* description) {
    return nlohmann::json{{"type", "object"},
                          {"properties", {{key, {{"type", "string"}, {"description", description}}}}},
                          {"required", {key}}};
}

}  // namespace detail

inline const std::vector<ToolDescriptor>& tool_catalog() {
    static const std::vector<ToolDescriptor> catalog = [] {
        std::vector<ToolDescriptor> tools;
        tools.push_back(
            {"LookupService", "Returns the service entity matching the given name or identifier.",
             detail::one_string_arg("name", "Service name to resolve"), detail::entity_schema()});
        tools.push_back({"GetImplementation",
                         "Returns all resource entities implementing the service, including "
                         "resources of its sub-services.",
                         detail::one_string_arg("service_id", "Service entity id"),
                         detail::entity_array_schema()});
        tools.push_back({"GetNotes", "Returns operational notes associated with a resource.",
                         detail::one_string_arg("resource_id", "Resource entity id"),
                         detail::entity_array_schema()});
        tools.push_back({"GetEvents",
                         "Returns events (maintenance, incidents) affecting a resource, in "
                         "chronological order.",
                         detail::one_string_arg("resource_id", "Resource entity id"),
                         detail::entity_array_schema()});
        tools.push_back({"GetImpactedServices",
                         "Returns all services that depend on the resource, directly or through "
                         "the service hierarchy.",
                         detail::one_string_arg("resource_id", "Resource entity id"),
                         detail::entity_array_schema()});
        tools.push_back({"GetUsage", "Returns all parties to which the service is allocated.",
                         detail::one_string_arg("service_id", "Service entity id"),
                         detail::entity_array_schema()});
        tools.push_back(
            {"Publish",
             "Publishes the investigation results: root cause resource IDs, impacted party IDs, "
             "and an analysis summary. Ends the session.",
             nlohmann::json{
                 {"type", "object"},
                 {"properties",
                  {{"root_cause_ids",
                    {{"type", "array"}, {"items", {{"type", "string"}}}}},
                   {"impacted_party_ids",
                    {{"type", "array"}, {"items", {{"type", "string"}}}}},
                   {"summary", {{"type", "string"}}}}},
                 {"required", {"root_cause_ids", "impacted_party_ids", "summary"}}},
             nlohmann::json{{"type", "object"},
                            {"properties", {{"status", {{"type", "string"}}}}}}});
        return tools;
    }();
    return catalog;
}

inline bool is_known_tool(const std::string& name) {
    for (const ToolDescriptor& t : tool_catalog())
        if (t.name == name) return true;
    return false;
}

}  // namespace causeway
