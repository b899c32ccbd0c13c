// Licensed under the Apache License, Version 2.0. See LICENSE or
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "topcco/cco.hpp"
#include "topcco/model.hpp"

namespace topcco::io {

using nlohmann::json;

// Instance file: {"f","B","C","nodes":[{"b","c","t"}],"d","d_to_v","d_from_v",
// "verification":{"members","leader","rtts"}}; delays in milliseconds.
json to_json(const Instance& instance);
Instance instance_from_json(const json& j);

// Configuration file: {"p","committees":[{"leader","members","active",
// "sigma"}],"latency":{...},"optimal","gap"}. "members" lists followers.
json to_json(const cco::Solution& solution);
json to_json(const cco::LatencyBreakdown& latency);
cco::Solution solution_from_json(const json& j, std::size_t node_count);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

Instance load_instance(const std::filesystem::path& path);

}  // namespace topcco::io
