// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "pkgraph/embed/embedder.hpp"

namespace pkgraph {

/// Splits "http://host:port/path" into the origin and the request path ("/" if absent).
struct UrlParts {
    std::string origin;
    std::string path;
};
UrlParts split_url(const std::string& url);

/// Remote provider. Request {"input": [texts], "model": m}; response {"data": [{"embedding": [...]}, ...]}.
/// The bearer token is read from the environment variable named by api_key_env.
class HttpEmbedder final : public Embedder {
public:
    explicit HttpEmbedder(EmbedderSpec spec);

    std::string id() const override;
    std::size_t dimension() const override { return spec_.dimension; }
    std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) override;

private:
    EmbedderSpec spec_;
};

}  // namespace pkgraph
