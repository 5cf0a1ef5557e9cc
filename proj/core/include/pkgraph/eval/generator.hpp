// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace pkgraph {

struct GeneratorSpec {
    std::string endpoint = "mock";  // URL, or "mock"
    std::string model;
    std::size_t max_new_tokens = 512;
    double temperature = 0.0;
    std::optional<std::string> mock_table;  // JSON Lines {prompt_sha256, completion}
    bool strict = true;                     // mock: unknown prompt is an error
    std::string fallback_completion;        // mock, non-strict: returned on a miss
    std::optional<std::string> api_key_env;
    double timeout_seconds = 120.0;
    std::size_t retries = 0;
};

/// Throws InvalidConfig naming the offending field.
void validate(const GeneratorSpec& spec);

std::string sha256_hex(std::string_view data);

class Generator {
public:
    virtual ~Generator() = default;
    virtual std::string generate(const std::string& prompt) = 0;
};

class MockGenerator final : public Generator {
public:
    MockGenerator(std::unordered_map<std::string, std::string> table, bool strict, std::string fallback = {});
    static MockGenerator from_file(const std::filesystem::path& table, bool strict, std::string fallback = {});

    /// Throws MockMiss in strict mode when the prompt hash is not in the table.
    std::string generate(const std::string& prompt) override;

private:
    std::unordered_map<std::string, std::string> table_;  // sha256 hex -> completion
    bool strict_;
    std::string fallback_;
};

/// Completion endpoint: POST {"model", "prompt", "max_tokens", "temperature"}, reads
/// choices[0].text. Throws GeneratorError on transport or status failures.
class HttpGenerator final : public Generator {
public:
    explicit HttpGenerator(GeneratorSpec spec);
    std::string generate(const std::string& prompt) override;

private:
    GeneratorSpec spec_;
};

std::unique_ptr<Generator> make_generator(const GeneratorSpec& spec);

}  // namespace pkgraph
