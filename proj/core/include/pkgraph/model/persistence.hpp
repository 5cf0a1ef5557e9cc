// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "pkgraph/model/graph.hpp"

namespace pkgraph {

inline constexpr std::string_view kFormatVersion = "1";

struct GraphManifest {
    std::string format_version{kFormatVersion};
    std::string embedder_id;
    std::size_t embedding_dim = 0;
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    std::string created_at;
};

struct SaveOptions {
    /// Permit saving a graph still in its build phase (resumable checkpoints).
    bool allow_unsealed = false;
    /// Fixed timestamp; otherwise SOURCE_DATE_EPOCH if set, else the current UTC time.
    std::optional<std::string> created_at;
};

struct LoadOptions {
    /// Leave the loaded graph in its build phase, e.g. to finish embedding it.
    bool seal = true;
};

void save_graph(const Graph& graph, const std::filesystem::path& dir, const SaveOptions& options = {});
Graph load_graph(const std::filesystem::path& dir, const LoadOptions& options = {});
GraphManifest read_manifest(const std::filesystem::path& dir);

nlohmann::ordered_json node_to_json(const PkgNode& node);
nlohmann::ordered_json edge_to_json(const PkgEdge& edge);
nlohmann::ordered_json manifest_to_json(const GraphManifest& manifest);

/// Current time as ISO-8601 UTC ("2024-01-31T12:00:00Z"), honoring SOURCE_DATE_EPOCH.
std::string iso8601_now();

}  // namespace pkgraph
