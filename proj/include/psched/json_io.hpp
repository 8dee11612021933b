#pragma once

#include <string>

#include "psched/instance.hpp"

namespace psched {

// Versioned JSON documents.  Parsing is strict: unknown fields and version
// mismatches are rejected with ValidationError.
inline constexpr int kFormatVersion = 1;

std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);

std::string schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace psched
