// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pkgraph/model/graph.hpp"

namespace pkgraph {

struct EmbedderSpec {
    std::string id = "det-v1";  // "det-v1" or "http"
    std::size_t dimension = 256;
    std::optional<std::string> endpoint;
    std::optional<std::string> model;
    std::optional<std::string> api_key_env;
    std::size_t batch_size = 32;
    double timeout_seconds = 30.0;
};

/// Validates the spec; throws InvalidConfig naming the offending field.
void validate(const EmbedderSpec& spec);

/// Identifier recorded in graph manifests: "det-v1", or "http:<model>" for remote providers.
std::string embedder_id(const EmbedderSpec& spec);

class Embedder {
public:
    virtual ~Embedder() = default;

    virtual std::string id() const = 0;
    virtual std::size_t dimension() const = 0;
    /// One vector per input text, in order.
    virtual std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) = 0;

    Embedding embed(std::string_view text);
};

/// det-v1: ASCII-lowercase, tokens are maximal runs of [a-z0-9_], each token's FNV-1a 64-bit
/// hash increments component (hash mod d), then L2 normalization.
class HashingEmbedder final : public Embedder {
public:
    explicit HashingEmbedder(std::size_t dimension = 256);

    std::string id() const override { return "det-v1"; }
    std::size_t dimension() const override { return dimension_; }
    std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) override;

    Embedding embed_one(std::string_view text) const;

private:
    std::size_t dimension_;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderSpec& spec);

Embedding embed_text(const EmbedderSpec& spec, std::string_view text);

using NodeFilter = std::function<bool(const PkgNode&)>;

struct EmbedProgress {
    std::size_t embedded = 0;  // nodes embedded by this call
    std::size_t skipped = 0;   // already carried an embedding
};

/// Embeds every matching node that has no embedding yet, batch by batch. A failing batch
/// propagates its error; earlier batches stay applied so a rerun resumes.
EmbedProgress embed_graph(Graph& builder, Embedder& embedder, const NodeFilter& filter = {},
                          std::size_t batch_size = 32);

}  // namespace pkgraph
