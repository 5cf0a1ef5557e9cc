// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/retrieve/prune.hpp"

#include "pkgraph/embed/embedding.hpp"
#include "pkgraph/error.hpp"

namespace pkgraph {

void validate(const PruneConfig& cfg) {
    if (cfg.max_branches_removed == 0) throw Error(ErrorCode::InvalidConfig, "prune.max_branches_removed must be positive");
    if (cfg.min_remaining_lines == 0) throw Error(ErrorCode::InvalidConfig, "prune.min_remaining_lines must be positive");
}

namespace {

std::vector<std::string_view> split_keep_newlines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        nl = nl == std::string_view::npos ? text.size() : nl + 1;
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl;
    }
    return lines;
}

bool blank(std::string_view line) { return line.find_first_not_of(" \t\f\r\n") == std::string_view::npos; }

std::size_t non_blank_lines(std::string_view text) {
    std::size_t n = 0;
    for (std::string_view l : split_keep_newlines(text)) n += blank(l) ? 0 : 1;
    return n;
}

}  // namespace

std::string remove_spans(const std::string& content, int first_line, const std::vector<Span>& spans) {
    std::string out;
    int line = first_line;
    for (std::string_view l : split_keep_newlines(content)) {
        bool drop = false;
        for (const Span& s : spans) drop = drop || (s.start <= line && line <= s.end);
        if (!drop) out.append(l);
        ++line;
    }
    return out;
}

PruneOutcome prune(const Graph& graph, NodeId node_id, const Embedding& query, const PruneConfig& cfg,
                   Embedder& embedder) {
    const PkgNode& node = graph.node(node_id);
    EdgeKind branch_kind;
    if (node.kind == NodeKind::FunctionImpl) {
        branch_kind = EdgeKind::ImplToBlock;
    } else if (node.kind == NodeKind::CodeBlock) {
        branch_kind = EdgeKind::BlockToBlock;
    } else {
        throw Error(ErrorCode::WrongKind, "node " + std::to_string(node_id) + " is " + std::string(to_string(node.kind)));
    }
    if (!node.embedding) throw Error(ErrorCode::MissingEmbedding, "node " + std::to_string(node_id));

    PruneOutcome out;
    out.rendered = node.content;
    out.identity_similarity = similarity(query, *node.embedding);
    out.similarity = out.identity_similarity;
    if (!cfg.enabled || !node.span) return out;

    std::vector<NodeId> branches;
    for (NodeId child : graph.children(node_id, branch_kind)) {
        const PkgNode& c = graph.node(child);
        if (c.span && node.span->contains(*c.span)) branches.push_back(child);
    }
    std::vector<bool> taken(branches.size(), false);

    for (std::size_t round = 0; round < cfg.max_branches_removed; ++round) {
        std::vector<std::size_t> index;
        std::vector<std::string> texts;
        for (std::size_t i = 0; i < branches.size(); ++i) {
            if (taken[i]) continue;
            std::vector<Span> spans = out.removed_spans;
            spans.push_back(*graph.node(branches[i]).span);
            std::string text = remove_spans(node.content, node.span->start, spans);
            if (non_blank_lines(text) < cfg.min_remaining_lines) continue;
            index.push_back(i);
            texts.push_back(std::move(text));
        }
        if (texts.empty()) break;
        const std::vector<Embedding> vectors = embedder.embed_batch(texts);
        std::optional<std::size_t> best;
        double best_score = out.similarity;
        for (std::size_t k = 0; k < texts.size(); ++k) {
            const double s = similarity(query, vectors[k]);
            if (s > best_score) {
                best_score = s;
                best = k;
            }
        }
        if (!best) break;
        const NodeId removed = branches[index[*best]];
        taken[index[*best]] = true;
        out.removed_spans.push_back(*graph.node(removed).span);
        out.removed_block_ids.push_back(removed);
        out.rendered = std::move(texts[*best]);
        out.similarity = best_score;
        out.pruned = true;
    }
    return out;
}

}  // namespace pkgraph
