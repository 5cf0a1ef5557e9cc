// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>

#include "pkgraph/model/graph.hpp"

namespace pkgraph {

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

bool is_zero(const Embedding& v) noexcept;

/// Scales `v` to unit L2 norm; the zero vector is left unchanged.
void l2_normalize(Embedding& v) noexcept;

/// Cosine similarity. Zero when either side is the zero vector. Throws LengthMismatch.
double similarity(const Embedding& a, const Embedding& b);

}  // namespace pkgraph
