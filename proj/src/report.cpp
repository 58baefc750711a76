#include "ecx/report.hpp"

namespace ecx {

bool Report::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

Json Report::to_json() const {
    Json j;
    j["artifact_version"] = artifact_version;
    j["command"] = command;
    j["master_seed"] = master_seed;
    j["config"] = config.is_null() ? Json::object() : config;
    Json arr = Json::array();
    for (const auto& c : checks) {
        Json rec;
        rec["name"] = c.name;
        rec["values"] = c.values;
        rec["tolerance"] = c.tolerance;
        rec["pass"] = c.pass;
        rec["wall_time_ms"] = c.wall_time_ms;
        rec["seed"] = c.seed;
        arr.push_back(rec);
    }
    j["checks"] = arr;
    j["all_pass"] = all_pass();
    return j;
}

std::string Report::to_string() const { return to_json().dump(2) + "\n"; }

namespace {

void zero_timings(Json& j) {
    if (j.is_object()) {
        for (auto& [key, value] : j.items()) {
            if (key == "wall_time_ms")
                value = 0.0;
            else
                zero_timings(value);
        }
    } else if (j.is_array()) {
        for (auto& v : j) zero_timings(v);
    }
}

}  // namespace

std::string Report::strip_timings(const Json& report) {
    Json copy = report;
    zero_timings(copy);
    return copy.dump(2);
}

}  // namespace ecx
