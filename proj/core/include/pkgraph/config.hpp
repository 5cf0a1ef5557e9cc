// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "pkgraph/embed/embedder.hpp"
#include "pkgraph/eval/generator.hpp"
#include "pkgraph/rerank/runner.hpp"
#include "pkgraph/retrieve/prune.hpp"

namespace pkgraph {

struct Config {
    EmbedderSpec embedder;
    RunnerSpec runner;
    PruneConfig prune;
    std::optional<GeneratorSpec> generator;
    std::size_t parallelism = 1;
    std::size_t max_calls = 3;
    std::string template_id = "codellama";
    std::optional<std::string> templates_file;
};

/// Reads a JSON config document; absent fields keep their defaults. Relative paths inside
/// (mock tables, template files) resolve against the file's directory. Throws InvalidConfig
/// naming the offending field.
Config load_config(const std::filesystem::path& path);
Config config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Cross-field checks; throws InvalidConfig naming the field.
void validate(const Config& config);

nlohmann::ordered_json to_json(const Config& config);

}  // namespace pkgraph
