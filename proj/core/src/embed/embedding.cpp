// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/embed/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "pkgraph/error.hpp"

namespace pkgraph {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

bool is_zero(const Embedding& v) noexcept {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

void l2_normalize(Embedding& v) noexcept {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq == 0.0) return;
    const double norm = std::sqrt(sq);
    for (double& x : v) x /= norm;
}

double similarity(const Embedding& a, const Embedding& b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace pkgraph
