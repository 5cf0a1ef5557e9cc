// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pkgraph/retrieve/retriever.hpp"

namespace pkgraph {

/// Placeholders: {{query}}, {{context}}, {{helpers}}. Without a {{helpers}} slot the helper
/// sections are appended to the context.
struct PromptTemplate {
    std::string with_context;
    std::string no_context;
};

class TemplateRegistry {
public:
    /// "codellama", "starcoder", "deepseek", and "none" (the codellama prompt without context).
    static TemplateRegistry builtin();

    void add(std::string name, PromptTemplate tmpl);
    /// JSON object: name -> {"with_context": s, "no_context": s}, or name -> s for both.
    void load_file(const std::filesystem::path& path);

    bool contains(std::string_view name) const;
    const PromptTemplate& get(std::string_view name) const;  // throws UnknownTemplate
    std::vector<std::string> names() const;

private:
    std::map<std::string, PromptTemplate, std::less<>> templates_;
};

/// "\n#helper code 1:\n<body>" for each call, in order.
std::string render_helpers(const std::vector<ResolvedCall>& calls);

/// Single-pass substitution; unknown placeholders are left as written.
std::string substitute(std::string_view tmpl, std::string_view query, std::string_view context,
                       std::string_view helpers);

std::string render_prompt(const PromptTemplate& tmpl, std::string_view query, std::string_view context,
                          const std::vector<ResolvedCall>& calls);

std::string augment(std::string_view query, const RetrievalResult& result, std::string_view template_id,
                    const TemplateRegistry& registry);

/// Prompt for a query with no retrieved context.
std::string augment(std::string_view query, std::string_view template_id, const TemplateRegistry& registry);

}  // namespace pkgraph
