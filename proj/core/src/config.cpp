// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/config.hpp"

#include <fstream>
#include <set>

#include "pkgraph/error.hpp"

namespace pkgraph {

namespace {

using json = nlohmann::json;

class Section {
public:
    Section(const json& obj, std::string prefix, std::set<std::string> known) : obj_(obj), prefix_(std::move(prefix)) {
        if (!obj_.is_object()) throw Error(ErrorCode::InvalidConfig, name("") + " must be an object");
        for (const auto& [key, _] : obj_.items()) {
            if (!known.count(key)) throw Error(ErrorCode::InvalidConfig, name(key) + ": unknown field");
        }
    }

    template <typename T>
    void get(const char* key, T& out) const {
        const auto it = obj_.find(key);
        if (it == obj_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw Error(ErrorCode::InvalidConfig, name(key) + ": wrong type");
        }
    }

    template <typename T>
    void get(const char* key, std::optional<T>& out) const {
        const auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null()) return;
        T v{};
        get(key, v);
        out = std::move(v);
    }

    void get_count(const char* key, std::size_t& out) const {
        const auto it = obj_.find(key);
        if (it == obj_.end()) return;
        if (!it->is_number_integer() || it->get<long long>() <= 0) {
            throw Error(ErrorCode::InvalidConfig, name(key) + ": must be a positive integer");
        }
        out = it->get<std::size_t>();
    }

    const json* child(const char* key) const {
        const auto it = obj_.find(key);
        return it == obj_.end() || it->is_null() ? nullptr : &*it;
    }

    std::string name(const std::string& key) const {
        if (key.empty()) return prefix_.empty() ? "config" : prefix_;
        return prefix_.empty() ? key : prefix_ + "." + key;
    }

private:
    const json& obj_;
    std::string prefix_;
};

std::string resolve(const std::string& p, const std::filesystem::path& base) {
    if (base.empty() || std::filesystem::path(p).is_absolute()) return p;
    return (base / p).string();
}

}  // namespace

Config config_from_json(const json& doc, const std::filesystem::path& base_dir) {
    Config c;
    const Section root(doc, "", {"embedder", "runner", "prune", "generator", "parallelism", "max_calls", "template",
                                 "templates_file"});
    root.get_count("parallelism", c.parallelism);
    root.get_count("max_calls", c.max_calls);
    root.get("template", c.template_id);
    root.get("templates_file", c.templates_file);
    if (c.templates_file) c.templates_file = resolve(*c.templates_file, base_dir);

    if (const json* e = root.child("embedder")) {
        const Section s(*e, "embedder", {"id", "dimension", "endpoint", "model", "api_key_env", "batch_size", "timeout_seconds"});
        s.get("id", c.embedder.id);
        s.get_count("dimension", c.embedder.dimension);
        s.get("endpoint", c.embedder.endpoint);
        s.get("model", c.embedder.model);
        s.get("api_key_env", c.embedder.api_key_env);
        s.get_count("batch_size", c.embedder.batch_size);
        s.get("timeout_seconds", c.embedder.timeout_seconds);
    }
    if (const json* r = root.child("runner")) {
        const Section s(*r, "runner", {"command", "timeout_seconds", "memory_limit_mb"});
        s.get("command", c.runner.command);
        s.get("timeout_seconds", c.runner.timeout_seconds);
        s.get_count("memory_limit_mb", c.runner.memory_limit_mb);
    }
    if (const json* p = root.child("prune")) {
        const Section s(*p, "prune", {"enabled", "max_branches_removed", "min_remaining_lines"});
        s.get("enabled", c.prune.enabled);
        s.get_count("max_branches_removed", c.prune.max_branches_removed);
        s.get_count("min_remaining_lines", c.prune.min_remaining_lines);
    }
    if (const json* g = root.child("generator")) {
        const Section s(*g, "generator", {"endpoint", "model", "max_new_tokens", "temperature", "mock_table", "strict",
                                          "fallback_completion", "api_key_env", "timeout_seconds", "retries"});
        GeneratorSpec spec;
        s.get("endpoint", spec.endpoint);
        s.get("model", spec.model);
        s.get_count("max_new_tokens", spec.max_new_tokens);
        s.get("temperature", spec.temperature);
        s.get("mock_table", spec.mock_table);
        if (spec.mock_table) spec.mock_table = resolve(*spec.mock_table, base_dir);
        s.get("strict", spec.strict);
        s.get("fallback_completion", spec.fallback_completion);
        s.get("api_key_env", spec.api_key_env);
        s.get("timeout_seconds", spec.timeout_seconds);
        s.get("retries", spec.retries);
        c.generator = std::move(spec);
    }
    validate(c);
    return c;
}

void validate(const Config& c) {
    validate(c.embedder);
    validate(c.prune);
    // The runner is only needed by rerank and eval; an empty command is checked when used.
    if (!c.runner.command.empty()) validate(c.runner);
    if (!(c.runner.timeout_seconds > 0)) throw Error(ErrorCode::InvalidConfig, "runner.timeout_seconds must be positive");
    if (c.runner.memory_limit_mb == 0) throw Error(ErrorCode::InvalidConfig, "runner.memory_limit_mb must be positive");
    if (c.generator) validate(*c.generator);
    if (c.parallelism == 0) throw Error(ErrorCode::InvalidConfig, "parallelism must be positive");
    if (c.template_id.empty()) throw Error(ErrorCode::InvalidConfig, "template must not be empty");
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
    }
    return config_from_json(doc, path.parent_path());
}

nlohmann::ordered_json to_json(const Config& c) {
    using oj = nlohmann::ordered_json;
    const auto opt = [](const std::optional<std::string>& s) { return s ? oj(*s) : oj(nullptr); };
    oj j;
    j["embedder"] = {{"id", c.embedder.id},
                     {"dimension", c.embedder.dimension},
                     {"endpoint", opt(c.embedder.endpoint)},
                     {"model", opt(c.embedder.model)},
                     {"api_key_env", opt(c.embedder.api_key_env)},
                     {"batch_size", c.embedder.batch_size},
                     {"timeout_seconds", c.embedder.timeout_seconds}};
    j["runner"] = {{"command", c.runner.command},
                   {"timeout_seconds", c.runner.timeout_seconds},
                   {"memory_limit_mb", c.runner.memory_limit_mb}};
    j["prune"] = {{"enabled", c.prune.enabled},
                  {"max_branches_removed", c.prune.max_branches_removed},
                  {"min_remaining_lines", c.prune.min_remaining_lines}};
    if (c.generator) {
        const GeneratorSpec& g = *c.generator;
        j["generator"] = {{"endpoint", g.endpoint},
                          {"model", g.model},
                          {"max_new_tokens", g.max_new_tokens},
                          {"temperature", g.temperature},
                          {"mock_table", opt(g.mock_table)},
                          {"strict", g.strict},
                          {"retries", g.retries}};
    } else {
        j["generator"] = nullptr;
    }
    j["parallelism"] = c.parallelism;
    j["max_calls"] = c.max_calls;
    j["template"] = c.template_id;
    j["templates_file"] = opt(c.templates_file);
    return j;
}

}  // namespace pkgraph
