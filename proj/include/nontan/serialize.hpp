#pragma once

#include <string>

#include <json.hpp>

#include "nontan/schedule.hpp"

namespace nontan {

using Json = nlohmann::ordered_json;

std::string sha256_hex(const std::string& data);

// Schedule <-> JSON. Log radii and deltas are decimal strings at the
// schedule's precision, times and point coordinates exact "n/d" strings.
// Only power-law symbols can be serialized.
Json schedule_to_json(const Schedule& sch);
Schedule schedule_from_json(const Json& j);

// Hash of the schedule content (the JSON without its "content_hash" field).
std::string schedule_hash(const Json& j);

// Adds "content_hash" and returns the pretty-printed document.
std::string dump_schedule(const Schedule& sch, const Json& config);
// Parses, checks the stored hash, and rebuilds the schedule.
Schedule load_schedule(const std::string& text, Json* config = nullptr, std::string* hash = nullptr);

std::string read_file(const std::string& path);
// Writes to path + ".tmp" and renames over path.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace nontan
