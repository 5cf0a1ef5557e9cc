// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "pkgraph/model/graph.hpp"

namespace pkgraph {

/// Path separator between key segments.
inline constexpr char kPathSeparator = '-';

/// Escapes a key for use as a path segment: '-' becomes "\-" and '\' becomes "\\".
std::string escape_path_segment(std::string_view key);

/// Adds one document as a tree of path_value nodes under a synthetic root and returns the
/// root id. Primitive values are stored as their JSON text; containers store no value.
NodeId json_to_graph(std::string_view document, std::string_view doc_id, Graph& builder);
NodeId json_value_to_graph(const nlohmann::ordered_json& document, std::string_view doc_id, Graph& builder);

/// Primitive leaves of a stored document keyed by path.
std::map<std::string, nlohmann::json> reconstruct_leaves(const Graph& graph, std::string_view doc_id);

}  // namespace pkgraph
