// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/embed/embedder.hpp"

#include "pkgraph/embed/embedding.hpp"
#include "pkgraph/embed/http_embedder.hpp"
#include "pkgraph/error.hpp"

namespace pkgraph {

void validate(const EmbedderSpec& spec) {
    if (spec.id != "det-v1" && spec.id != "http") {
        throw Error(ErrorCode::InvalidConfig, "embedder.id: unknown provider '" + spec.id + "'");
    }
    if (spec.dimension == 0) throw Error(ErrorCode::InvalidConfig, "embedder.dimension must be positive");
    if (spec.batch_size == 0) throw Error(ErrorCode::InvalidConfig, "embedder.batch_size must be positive");
    if (!(spec.timeout_seconds > 0)) throw Error(ErrorCode::InvalidConfig, "embedder.timeout_seconds must be positive");
    if (spec.id == "http" && (!spec.endpoint || spec.endpoint->empty())) {
        throw Error(ErrorCode::InvalidConfig, "embedder.endpoint is required for the http provider");
    }
}

std::string embedder_id(const EmbedderSpec& spec) {
    if (spec.id == "http") return "http:" + spec.model.value_or("");
    return spec.id;
}

Embedding Embedder::embed(std::string_view text) {
    std::vector<Embedding> out = embed_batch({std::string(text)});
    if (out.size() != 1) throw Error(ErrorCode::ProviderError, "provider returned " + std::to_string(out.size()) + " vectors for 1 text");
    return std::move(out.front());
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) throw Error(ErrorCode::InvalidConfig, "embedder.dimension must be positive");
}

Embedding HashingEmbedder::embed_one(std::string_view text) const {
    Embedding v(dimension_, 0.0);
    std::string token;
    const auto flush = [&] {
        if (token.empty()) return;
        v[fnv1a64(token) % dimension_] += 1.0;
        token.clear();
    };
    for (char raw : text) {
        char c = raw;
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_') {
            token.push_back(c);
        } else {
            flush();
        }
    }
    flush();
    l2_normalize(v);
    return v;
}

std::vector<Embedding> HashingEmbedder::embed_batch(const std::vector<std::string>& texts) {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const std::string& t : texts) out.push_back(embed_one(t));
    return out;
}

std::unique_ptr<Embedder> make_embedder(const EmbedderSpec& spec) {
    validate(spec);
    if (spec.id == "http") return std::make_unique<HttpEmbedder>(spec);
    return std::make_unique<HashingEmbedder>(spec.dimension);
}

Embedding embed_text(const EmbedderSpec& spec, std::string_view text) { return make_embedder(spec)->embed(text); }

EmbedProgress embed_graph(Graph& builder, Embedder& embedder, const NodeFilter& filter, std::size_t batch_size) {
    if (batch_size == 0) throw Error(ErrorCode::InvalidConfig, "batch_size must be positive");
    if (embedder.dimension() != builder.embedding_info().dimension || embedder.id() != builder.embedding_info().embedder_id) {
        // Vectors from a different provider would not be comparable with existing ones.
        for (const PkgNode& n : builder.nodes()) {
            if (n.embedding) {
                throw Error(ErrorCode::DimensionMismatch, "graph already holds vectors from " +
                                                              builder.embedding_info().embedder_id);
            }
        }
        builder.set_embedding_info({embedder.id(), embedder.dimension()});
    }
    EmbedProgress progress;
    std::vector<NodeId> pending;
    for (const PkgNode& n : builder.nodes()) {
        if (filter && !filter(n)) continue;
        if (n.embedding) {
            ++progress.skipped;
        } else {
            pending.push_back(n.id);
        }
    }
    for (std::size_t begin = 0; begin < pending.size(); begin += batch_size) {
        const std::size_t end = std::min(pending.size(), begin + batch_size);
        std::vector<std::string> texts;
        texts.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) texts.push_back(builder.node(pending[i]).content);
        std::vector<Embedding> vectors = embedder.embed_batch(texts);
        if (vectors.size() != texts.size()) {
            throw Error(ErrorCode::ProviderError, "provider returned " + std::to_string(vectors.size()) + " vectors for " +
                                                      std::to_string(texts.size()) + " texts");
        }
        for (std::size_t i = begin; i < end; ++i) builder.set_embedding(pending[i], std::move(vectors[i - begin]));
        progress.embedded += end - begin;
    }
    return progress;
}

}  // namespace pkgraph
