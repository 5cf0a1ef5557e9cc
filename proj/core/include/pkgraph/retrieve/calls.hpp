// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pkgraph/model/graph.hpp"

namespace pkgraph {

struct ResolvedCall {
    std::string name;
    NodeId impl_id = 0;
    std::string content;

    bool operator==(const ResolvedCall&) const = default;
};

/// function_name content -> function_name ids, ascending.
class NameIndex {
public:
    explicit NameIndex(const Graph& graph);
    const std::vector<NodeId>* find(std::string_view name) const;

private:
    std::map<std::string, std::vector<NodeId>, std::less<>> by_name_;
};

/// Common leading whitespace removed from every non-blank line.
std::string dedent(std::string_view text);

/// Names called by `code` that it does not define itself and that are not built-ins, in order
/// of first call. Falls back to a token scan when the text does not parse.
std::vector<std::string> free_calls(std::string_view code);

/// Implementations of the free calls of `code`, one per name, at most `max_calls`. Among
/// same-named functions the implementation closest to `query` wins, then the lower id.
std::vector<ResolvedCall> resolve_calls(const Graph& graph, const NameIndex& index, std::string_view code,
                                        const Embedding& query, std::size_t max_calls = 3);

}  // namespace pkgraph
