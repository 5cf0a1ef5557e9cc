// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/retrieve/calls.hpp"

#include <limits>
#include <optional>

#include "pkgraph/embed/embedding.hpp"
#include "pkgraph/python/names.hpp"

namespace pkgraph {

NameIndex::NameIndex(const Graph& graph) {
    for (const PkgNode& n : graph.nodes()) {
        if (n.kind == NodeKind::FunctionName) by_name_[n.content].push_back(n.id);
    }
}

const std::vector<NodeId>* NameIndex::find(std::string_view name) const {
    const auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : &it->second;
}

std::string dedent(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        nl = nl == std::string_view::npos ? text.size() : nl + 1;
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl;
    }
    std::optional<std::string_view> common;
    for (std::string_view l : lines) {
        const std::size_t indent = l.find_first_not_of(" \t");
        if (indent == std::string_view::npos || l[indent] == '\n' || l[indent] == '\r') continue;
        const std::string_view prefix = l.substr(0, indent);
        if (!common) {
            common = prefix;
        } else {
            std::size_t k = 0;
            while (k < common->size() && k < prefix.size() && (*common)[k] == prefix[k]) ++k;
            common = common->substr(0, k);
        }
    }
    const std::size_t strip = common ? common->size() : 0;
    std::string out;
    for (std::string_view l : lines) {
        const std::size_t indent = l.find_first_not_of(" \t");
        const bool is_blank = indent == std::string_view::npos || l[indent] == '\n' || l[indent] == '\r';
        out.append(is_blank ? l : l.substr(strip));
    }
    return out;
}

std::vector<std::string> free_calls(std::string_view code) {
    const std::string text = dedent(code);
    python::ParseOutcome parsed = python::parse_module(text);
    const python::NameUsage usage = parsed.ok() ? python::collect_names(*parsed.module) : python::scan_names(text);
    std::vector<std::string> out;
    for (const std::string& name : usage.called) {
        if (usage.defined.count(name) || python::is_builtin_function(name)) continue;
        out.push_back(name);
    }
    return out;
}

std::vector<ResolvedCall> resolve_calls(const Graph& graph, const NameIndex& index, std::string_view code,
                                        const Embedding& query, std::size_t max_calls) {
    std::vector<ResolvedCall> out;
    for (const std::string& name : free_calls(code)) {
        if (out.size() >= max_calls) break;
        const std::vector<NodeId>* names = index.find(name);
        if (!names) continue;
        std::optional<NodeId> best;
        double best_score = -std::numeric_limits<double>::infinity();
        for (NodeId name_id : *names) {
            for (NodeId impl : graph.children(name_id, EdgeKind::NameToImpl)) {
                const PkgNode& n = graph.node(impl);
                const double s = n.embedding ? similarity(query, *n.embedding) : 0.0;
                if (s > best_score || (s == best_score && best && impl < *best)) {
                    best_score = s;
                    best = impl;
                }
            }
        }
        if (best) out.push_back({name, *best, graph.node(*best).content});
    }
    return out;
}

}  // namespace pkgraph
