#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace ecx {

/// Flat key=value configuration with [section] headers; keys are stored as
/// "section.key" ("" section for the preamble). CLI flags override entries.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

std::string config_get(const ConfigMap& cfg, const std::string& key, const std::string& fallback);
double config_get_double(const ConfigMap& cfg, const std::string& key, double fallback);
std::uint64_t config_get_u64(const ConfigMap& cfg, const std::string& key, std::uint64_t fallback);
int config_get_int(const ConfigMap& cfg, const std::string& key, int fallback);

}  // namespace ecx
