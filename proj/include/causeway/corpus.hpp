#pragma once
// Filesystem plumbing shared by the benchmark and the analyzer CLI: scenario
// directories, trace directories, and the trace-file naming convention
// <scenario_id>__<label>.jsonl that pairs a trace with its scenario.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "causeway/analyzer.hpp"
#include "causeway/result.hpp"
#include "causeway/scenario.hpp"
#include "causeway/trace.hpp"

namespace causeway {

inline Result<std::string> read_text_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return make_error(Errc::io_error, "cannot read " + path.string());
    std::ostringstream out;
    out << f.rdbuf();
    return out.str();
}

inline Result<void> write_text_file(const std::filesystem::path& path,
                                    const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) return make_error(Errc::io_error, "cannot write " + path.string());
    f << content;
    return {};
}

inline std::string trace_file_name(const std::string& scenario_id, const std::string& label) {
    return scenario_id + "__" + label + ".jsonl";
}

inline std::string scenario_id_from_trace_stem(const std::string& stem) {
    const size_t pos = stem.rfind("__");
    return pos == std::string::npos ? stem : stem.substr(0, pos);
}

inline Result<std::vector<Scenario>> load_scenarios_from_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        return make_error(Errc::io_error, dir.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<Scenario> out;
    for (const auto& path : files) {
        auto text = read_text_file(path);
        if (!text) return text.error();
        auto scenario = load_scenario(text.value());
        if (!scenario)
            return make_error(scenario.error().code,
                              path.filename().string() + ": " + scenario.error().message);
        out.push_back(std::move(scenario).take());
    }
    if (out.empty()) return make_error(Errc::io_error, "no scenario files in " + dir.string());
    return out;
}

inline Result<std::vector<TraceEntry>> load_traces_from_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        return make_error(Errc::io_error, dir.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<TraceEntry> out;
    for (const auto& path : files) {
        auto text = read_text_file(path);
        if (!text) return text.error();
        auto trace = trace_from_jsonl(text.value());
        if (!trace)
            return make_error(trace.error().code,
                              path.filename().string() + ": " + trace.error().message);
        const std::string stem = path.stem().string();
        out.push_back({stem, scenario_id_from_trace_stem(stem), std::move(trace).take()});
    }
    return out;
}

inline Result<void> export_scenarios(const std::vector<Scenario>& scenarios,
                                     const std::filesystem::path& dir) {
    for (const Scenario& s : scenarios)
        if (auto r = write_text_file(dir / (s.scenario_id + ".json"), scenario_to_string(s)); !r)
            return r;
    return {};
}

}  // namespace causeway
