// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/embed/http_embedder.hpp"

#include <cmath>
#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "pkgraph/error.hpp"

namespace pkgraph {

UrlParts split_url(const std::string& url) {
    const std::size_t scheme = url.find("://");
    const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    const std::size_t slash = url.find('/', host_start);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

HttpEmbedder::HttpEmbedder(EmbedderSpec spec) : spec_(std::move(spec)) {
    if (!spec_.endpoint) throw Error(ErrorCode::InvalidConfig, "embedder.endpoint is required for the http provider");
}

std::string HttpEmbedder::id() const { return embedder_id(spec_); }

std::vector<Embedding> HttpEmbedder::embed_batch(const std::vector<std::string>& texts) {
    const UrlParts url = split_url(*spec_.endpoint);
    httplib::Client client(url.origin);
    const auto timeout = std::chrono::duration<double>(spec_.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    if (spec_.api_key_env) {
        if (const char* key = std::getenv(spec_.api_key_env->c_str()); key && *key) client.set_bearer_token_auth(key);
    }
    nlohmann::json request = {{"input", texts}, {"model", spec_.model.value_or("")}};
    const httplib::Result res = client.Post(url.path, request.dump(), "application/json");
    if (!res) throw Error(ErrorCode::ProviderError, "request failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) {
        throw Error(ErrorCode::ProviderError, "HTTP status " + std::to_string(res->status));
    }
    std::vector<Embedding> out;
    try {
        const nlohmann::json body = nlohmann::json::parse(res->body);
        for (const nlohmann::json& item : body.at("data")) {
            Embedding v = item.at("embedding").get<Embedding>();
            if (v.size() != spec_.dimension) {
                throw Error(ErrorCode::DimensionMismatch, "provider returned length " + std::to_string(v.size()) +
                                                              ", expected " + std::to_string(spec_.dimension));
            }
            for (double x : v) {
                if (!std::isfinite(x)) throw Error(ErrorCode::ProviderError, "non-finite vector component");
            }
            out.push_back(std::move(v));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ProviderError, std::string("malformed response: ") + e.what());
    }
    if (out.size() != texts.size()) {
        throw Error(ErrorCode::ProviderError, "provider returned " + std::to_string(out.size()) + " vectors for " +
                                                  std::to_string(texts.size()) + " texts");
    }
    return out;
}

}  // namespace pkgraph
