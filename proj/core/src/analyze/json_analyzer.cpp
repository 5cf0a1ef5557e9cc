// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/analyze/json_analyzer.hpp"

#include "pkgraph/error.hpp"

namespace pkgraph {

using ojson = nlohmann::ordered_json;

std::string escape_path_segment(std::string_view key) {
    std::string out;
    out.reserve(key.size());
    for (char c : key) {
        if (c == kPathSeparator || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

namespace {

std::string join_path(const std::string& parent, const std::string& segment) {
    return parent.empty() ? segment : parent + kPathSeparator + segment;
}

struct TreeWriter {
    Graph& builder;
    std::string doc_id;

    NodeId add(const std::string& path, const ojson& value, std::string content) {
        PkgNode n;
        n.kind = NodeKind::PathValue;
        n.path = path;
        n.doc_id = doc_id;
        if (value.is_structured()) {
            n.content = std::move(content);
        } else {
            n.value = value.dump();
            n.content = path + ": " + (value.is_string() ? value.get<std::string>() : *n.value);
        }
        const NodeId id = builder.add_node(std::move(n));
        descend(id, path, value);
        return id;
    }

    void descend(NodeId parent, const std::string& path, const ojson& value) {
        if (value.is_object()) {
            for (const auto& [key, child] : value.items()) {
                const std::string p = join_path(path, escape_path_segment(key));
                builder.add_edge({parent, add(p, child, p), EdgeKind::JsonChild});
            }
        } else if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                const std::string p = join_path(path, std::to_string(i));
                builder.add_edge({parent, add(p, value[i], p), EdgeKind::JsonListItem});
            }
        }
    }
};

}  // namespace

NodeId json_value_to_graph(const ojson& document, std::string_view doc_id, Graph& builder) {
    if (!document.is_object()) throw Error(ErrorCode::NotAnObject, std::string(doc_id) + ": top level is not an object");
    if (doc_id.empty()) throw Error(ErrorCode::InvalidNode, "empty doc_id");
    TreeWriter writer{builder, std::string(doc_id)};
    // The root has an empty path, so its content falls back to the document id.
    return writer.add("", document, std::string(doc_id));
}

NodeId json_to_graph(std::string_view document, std::string_view doc_id, Graph& builder) {
    ojson parsed;
    try {
        parsed = ojson::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseFailure,
                    std::string(doc_id) + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    return json_value_to_graph(parsed, doc_id, builder);
}

std::map<std::string, nlohmann::json> reconstruct_leaves(const Graph& graph, std::string_view doc_id) {
    std::map<std::string, nlohmann::json> leaves;
    bool found = false;
    for (const PkgNode& n : graph.nodes()) {
        if (n.kind != NodeKind::PathValue || n.doc_id != doc_id) continue;
        found = true;
        if (n.value) leaves.emplace(*n.path, nlohmann::json::parse(*n.value));
    }
    if (!found) throw Error(ErrorCode::UnknownDocument, std::string(doc_id));
    return leaves;
}

}  // namespace pkgraph
