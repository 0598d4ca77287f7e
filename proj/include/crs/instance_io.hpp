#pragma once

#include <string>

#include "crs/analytics.hpp"
#include "json.hpp"

namespace crs {

// { "vertices": n, "edges": [ {"id", "u", "v", "x"} ... ], "bipartition": [side per vertex] }
// Edge ids must be dense; "x" may be a number or a "p/q" string. The
// bipartition, when present, must be a proper 2-coloring of the edges.
Instance instance_from_json(const nlohmann::json& j, const std::string& name = "json");
nlohmann::json instance_to_json(const Instance& inst);

Instance load_instance(const std::string& path);
void save_instance(const std::string& path, const Instance& inst);

// Marginal file: a JSON array of per-edge values, or an object with key "y".
// Entries are numbers or "p/q" strings and are read exactly.
RationalVector marginals_from_json(const nlohmann::json& j, int edge_count);
RationalVector load_marginals(const std::string& path, int edge_count);

}  // namespace crs
