// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/eval/generator.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "pkgraph/embed/http_embedder.hpp"
#include "pkgraph/error.hpp"

namespace pkgraph {

void validate(const GeneratorSpec& spec) {
    if (spec.endpoint.empty()) throw Error(ErrorCode::InvalidConfig, "generator.endpoint must not be empty");
    if (spec.max_new_tokens == 0) throw Error(ErrorCode::InvalidConfig, "generator.max_new_tokens must be positive");
    if (!(spec.temperature >= 0)) throw Error(ErrorCode::InvalidConfig, "generator.temperature must be non-negative");
    if (!(spec.timeout_seconds > 0)) throw Error(ErrorCode::InvalidConfig, "generator.timeout_seconds must be positive");
    if (spec.endpoint == "mock" && !spec.mock_table) {
        throw Error(ErrorCode::InvalidConfig, "generator.mock_table is required for the mock endpoint");
    }
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::GeneratorError, "sha256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xf]);
    }
    return out;
}

MockGenerator::MockGenerator(std::unordered_map<std::string, std::string> table, bool strict, std::string fallback)
    : table_(std::move(table)), strict_(strict), fallback_(std::move(fallback)) {}

MockGenerator MockGenerator::from_file(const std::filesystem::path& path, bool strict, std::string fallback) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    std::unordered_map<std::string, std::string> table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const nlohmann::json j = nlohmann::json::parse(line);
            table[j.at("prompt_sha256").get<std::string>()] = j.at("completion").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::CorruptRecord, path.filename().string() + " line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return MockGenerator(std::move(table), strict, std::move(fallback));
}

std::string MockGenerator::generate(const std::string& prompt) {
    const std::string key = sha256_hex(prompt);
    const auto it = table_.find(key);
    if (it != table_.end()) return it->second;
    if (strict_) throw Error(ErrorCode::MockMiss, "no completion for prompt " + key);
    return fallback_;
}

HttpGenerator::HttpGenerator(GeneratorSpec spec) : spec_(std::move(spec)) {}

std::string HttpGenerator::generate(const std::string& prompt) {
    const UrlParts url = split_url(spec_.endpoint);
    httplib::Client client(url.origin);
    const auto timeout = std::chrono::duration<double>(spec_.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    if (spec_.api_key_env) {
        if (const char* key = std::getenv(spec_.api_key_env->c_str()); key && *key) client.set_bearer_token_auth(key);
    }
    const nlohmann::json request = {{"model", spec_.model},
                                    {"prompt", prompt},
                                    {"max_tokens", spec_.max_new_tokens},
                                    {"temperature", spec_.temperature}};
    const httplib::Result res = client.Post(url.path, request.dump(), "application/json");
    if (!res) throw Error(ErrorCode::GeneratorError, "request failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) {
        throw Error(ErrorCode::GeneratorError, "HTTP status " + std::to_string(res->status));
    }
    try {
        return nlohmann::json::parse(res->body).at("choices").at(0).at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::GeneratorError, std::string("malformed response: ") + e.what());
    }
}

std::unique_ptr<Generator> make_generator(const GeneratorSpec& spec) {
    validate(spec);
    if (spec.endpoint == "mock") {
        return std::make_unique<MockGenerator>(MockGenerator::from_file(*spec.mock_table, spec.strict, spec.fallback_completion));
    }
    return std::make_unique<HttpGenerator>(spec);
}

}  // namespace pkgraph
