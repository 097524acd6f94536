#pragma once
// Error codes and a small Result<T> used across the library.
//
// Errors are values, not exceptions: tool calls and graph mutations report
// failures that callers (and trace records) must be able to inspect.

#include <cassert>
#include <string>
#include <utility>
#include <variant>

namespace causeway {

enum class Errc {
    // graph construction
    duplicate_id,
    missing_description,
    invalid_time_bounds,
    unknown_entity,
    wrong_kind,
    kind_constraint,
    cycle_introduced,
    duplicate_edge,
    graph_sealed,
    // scenario files and generation
    parse_error,
    graph_invariant,
    ground_truth_mismatch,
    scenario_invariant,
    infeasible_bounds,
    // tool sessions
    unknown_tool,
    malformed_arguments,
    entity_not_found,
    ambiguous_name,
    session_published,
    session_closed,
    missing_summary,
    // agent harness
    service_name_not_extractable,
    call_budget_exceeded,
    transport_failure,
    // analysis and io
    malformed_trace,
    trace_scenario_mismatch,
    io_error,
};

inline const char* errc_token(Errc c) {
    switch (c) {
        case Errc::duplicate_id: return "duplicate-id";
        case Errc::missing_description: return "missing-description";
        case Errc::invalid_time_bounds: return "invalid-time-bounds";
        case Errc::unknown_entity: return "unknown-entity";
        case Errc::wrong_kind: return "wrong-kind";
        case Errc::kind_constraint: return "kind-constraint-violation";
        case Errc::cycle_introduced: return "cycle-introduced";
        case Errc::duplicate_edge: return "duplicate-edge";
        case Errc::graph_sealed: return "graph-sealed";
        case Errc::parse_error: return "parse-error";
        case Errc::graph_invariant: return "graph-invariant-violation";
        case Errc::ground_truth_mismatch: return "ground-truth-mismatch";
        case Errc::scenario_invariant: return "scenario-invariant-violation";
        case Errc::infeasible_bounds: return "infeasible-bounds";
        case Errc::unknown_tool: return "unknown-tool";
        case Errc::malformed_arguments: return "malformed-arguments";
        case Errc::entity_not_found: return "entity-not-found";
        case Errc::ambiguous_name: return "ambiguous-name";
        case Errc::session_published: return "session-published";
        case Errc::session_closed: return "session-closed";
        case Errc::missing_summary: return "missing-summary";
        case Errc::service_name_not_extractable: return "service-name-not-extractable";
        case Errc::call_budget_exceeded: return "call-budget-exceeded";
        case Errc::transport_failure: return "transport-failure";
        case Errc::malformed_trace: return "malformed-trace";
        case Errc::trace_scenario_mismatch: return "trace-scenario-mismatch";
        case Errc::io_error: return "io-error";
    }
    return "unknown-error";
}

struct Error {
    Errc code;
    std::string message;

    // Stable wire form: "<token>: <message>"
    std::string to_string() const {
        std::string s = errc_token(code);
        if (!message.empty()) {
            s += ": ";
            s += message;
        }
        return s;
    }
};

inline Error make_error(Errc code, std::string message = {}) {
    return Error{code, std::move(message)};
}

template <typename T>
class Result {
public:
    Result(T value) : state_(std::move(value)) {}
    Result(Error error) : state_(std::move(error)) {}

    bool ok() const { return std::holds_alternative<T>(state_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& {
        assert(ok());
        return std::get<T>(state_);
    }
    T& value() & {
        assert(ok());
        return std::get<T>(state_);
    }
    // By value on purpose: keeps `f(...).value()` safe to iterate over.
    T value() && {
        assert(ok());
        return std::get<T>(std::move(state_));
    }
    T take() && {
        assert(ok());
        return std::get<T>(std::move(state_));
    }

    const Error& error() const {
        assert(!ok());
        return std::get<Error>(state_);
    }
    Errc code() const { return error().code; }

private:
    std::variant<T, Error> state_;
};

template <>
class Result<void> {
public:
    Result() = default;
    Result(Error error) : error_(std::move(error)), failed_(true) {}

    bool ok() const { return !failed_; }
    explicit operator bool() const { return ok(); }

    const Error& error() const {
        assert(failed_);
        return error_;
    }
    Errc code() const { return error().code; }

private:
    Error error_{};
    bool failed_ = false;
};

}  // namespace causeway
