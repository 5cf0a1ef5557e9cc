// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/retrieve/templates.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "pkgraph/error.hpp"

namespace pkgraph {

namespace {

constexpr std::string_view kCodellamaWith =
    "[INST] You are a python programmer. Solve the following problem:\n{{query}} \n\n"
    "The following code might be helpful:\n{{context}}\n"
    "If helper section is useful, integrate their logic directly into the body of the main function, "
    "otherwise just ignore them. You MUST write your solution between [PYTHON] and [/PYTHON]. "
    "Your solution MUST be executable. [/INST] ";
constexpr std::string_view kCodellamaWithout =
    "[INST] You are a python programmer. Solve the following problem:\n{{query}} \n\n"
    "Please write the python solution inside [PYTHON] and [/PYTHON] tags.\n[/INST] ";

constexpr std::string_view kStarcoderWith =
    "### Instruction\nYou are a python programmer. Solve the following problem:\n{{query}} \n\n"
    " The following code might be helpful:\n{{context}}\n. If they are useful, integrate their logic "
    "directly into the body of the main function, otherwise just ignore them.\n\n### Response\n";
constexpr std::string_view kStarcoderWithout =
    "### Instruction\nYou are a python programmer. Solve the following problem:\n{{query}} \n\n\n### Response\n";

constexpr std::string_view kDeepseekWith =
    "[INST] You are a python programmer. Solve the following problem:\n{{query}} \n\n"
    " The following code might be helpful:\n{{context}}\n.If they are useful, integrate their logic "
    "directly into the body of the main function, otherwise just ignore them.\n[/INST]";
constexpr std::string_view kDeepseekWithout =
    "[INST] You are a python programmer. Solve the following problem: \n{{query}} \n\n[/INST]";

}  // namespace

TemplateRegistry TemplateRegistry::builtin() {
    TemplateRegistry r;
    r.add("codellama", {std::string(kCodellamaWith), std::string(kCodellamaWithout)});
    r.add("starcoder", {std::string(kStarcoderWith), std::string(kStarcoderWithout)});
    r.add("deepseek", {std::string(kDeepseekWith), std::string(kDeepseekWithout)});
    r.add("none", {std::string(kCodellamaWithout), std::string(kCodellamaWithout)});
    return r;
}

void TemplateRegistry::add(std::string name, PromptTemplate tmpl) { templates_[std::move(name)] = std::move(tmpl); }

void TemplateRegistry::load_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, path.string() + ": expected an object of templates");
    for (const auto& [name, value] : doc.items()) {
        if (value.is_string()) {
            add(name, {value.get<std::string>(), value.get<std::string>()});
        } else if (value.is_object() && value.contains("with_context") && value["with_context"].is_string()) {
            const std::string with = value["with_context"].get<std::string>();
            const std::string without = value.value("no_context", with);
            add(name, {with, without});
        } else {
            throw Error(ErrorCode::InvalidConfig, path.string() + ": template '" + name + "' must be a string or carry with_context");
        }
    }
}

bool TemplateRegistry::contains(std::string_view name) const { return templates_.find(name) != templates_.end(); }

const PromptTemplate& TemplateRegistry::get(std::string_view name) const {
    const auto it = templates_.find(name);
    if (it == templates_.end()) throw Error(ErrorCode::UnknownTemplate, std::string(name));
    return it->second;
}

std::vector<std::string> TemplateRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : templates_) out.push_back(name);
    return out;
}

std::string render_helpers(const std::vector<ResolvedCall>& calls) {
    std::string out;
    for (std::size_t i = 0; i < calls.size(); ++i) {
        out += "\n#helper code " + std::to_string(i + 1) + ":\n";
        out += calls[i].content;
    }
    return out;
}

std::string substitute(std::string_view tmpl, std::string_view query, std::string_view context,
                       std::string_view helpers) {
    std::string out;
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const std::size_t open = tmpl.find("{{", pos);
        if (open == std::string_view::npos) break;
        out.append(tmpl.substr(pos, open - pos));
        const std::size_t close = tmpl.find("}}", open + 2);
        if (close == std::string_view::npos) {
            pos = open;
            break;
        }
        const std::string_view key = tmpl.substr(open + 2, close - open - 2);
        if (key == "query") {
            out.append(query);
        } else if (key == "context") {
            out.append(context);
        } else if (key == "helpers") {
            out.append(helpers);
        } else {
            out.append(tmpl.substr(open, close + 2 - open));
        }
        pos = close + 2;
    }
    out.append(tmpl.substr(std::min(pos, tmpl.size())));
    return out;
}

std::string render_prompt(const PromptTemplate& tmpl, std::string_view query, std::string_view context,
                          const std::vector<ResolvedCall>& calls) {
    const std::string helpers = render_helpers(calls);
    const bool has_data = !context.empty() || !helpers.empty();
    const std::string& body = has_data ? tmpl.with_context : tmpl.no_context;
    if (body.find("{{helpers}}") != std::string::npos) return substitute(body, query, context, helpers);
    return substitute(body, query, std::string(context) + helpers, "");
}

std::string augment(std::string_view query, const RetrievalResult& result, std::string_view template_id,
                    const TemplateRegistry& registry) {
    return render_prompt(registry.get(template_id), query, result.rendered_context, result.resolved_calls);
}

std::string augment(std::string_view query, std::string_view template_id, const TemplateRegistry& registry) {
    return render_prompt(registry.get(template_id), query, "", {});
}

}  // namespace pkgraph
