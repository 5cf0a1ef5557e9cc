// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pkgraph/python/ast.hpp"

namespace pkgraph::python {

/// Names a snippet calls and names it binds itself.
struct NameUsage {
    std::vector<std::string> called;  // plain `name(...)` calls, first-occurrence order, unique
    std::set<std::string> defined;    // defs, classes, parameters, assignment/loop/with targets, imports
};

NameUsage collect_names(const Module& module);

/// Token-level approximation used when the text does not parse (e.g. a pruned fragment).
NameUsage scan_names(std::string_view source);

/// Built-in function names of the language (the `builtins` function table).
bool is_builtin_function(std::string_view name) noexcept;

}  // namespace pkgraph::python
