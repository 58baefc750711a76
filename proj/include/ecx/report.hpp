#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace ecx {

using Json = nlohmann::ordered_json;

struct CheckRecord {
    std::string name;
    Json values;  // named numeric results of the check
    double tolerance = 0.0;
    bool pass = false;
    double wall_time_ms = 0.0;
    std::uint64_t seed = 0;
};

/// Structured result record emitted by the CLI. Field order is fixed so a
/// run is byte-reproducible modulo the wall_time fields.
struct Report {
    std::string command;
    std::string artifact_version = "0.1.0";
    std::uint64_t master_seed = 0;
    Json config;  // fully resolved configuration
    std::vector<CheckRecord> checks;

    bool all_pass() const;
    Json to_json() const;
    std::string to_string() const;  // pretty JSON, trailing newline

    /// Canonical form for reproducibility comparison: every wall_time_ms
    /// zeroed, then serialized.
    static std::string strip_timings(const Json& report);
};

}  // namespace ecx
