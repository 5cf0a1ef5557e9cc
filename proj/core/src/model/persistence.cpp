// SPDX-License-Identifier: Apache-2.0
#include "pkgraph/model/persistence.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "pkgraph/error.hpp"

namespace pkgraph {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
    return out;
}

std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
    return in;
}

[[noreturn]] void corrupt(const std::string& file, std::size_t line, const std::string& what) {
    throw Error(ErrorCode::CorruptRecord, file + " line " + std::to_string(line) + ": " + what);
}

template <typename T>
T field(const ojson& obj, const char* key, const std::string& file, std::size_t line) {
    const auto it = obj.find(key);
    if (it == obj.end()) corrupt(file, line, std::string("missing key '") + key + "'");
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        corrupt(file, line, std::string("bad type for '") + key + "'");
    }
}

PkgNode node_from_json(const ojson& j, std::size_t line, std::size_t dim) {
    static const std::string file = "nodes.jsonl";
    if (!j.is_object()) corrupt(file, line, "not an object");
    PkgNode n;
    n.id = field<NodeId>(j, "id", file, line);
    const auto kind = parse_node_kind(field<std::string>(j, "kind", file, line));
    if (!kind) corrupt(file, line, "unknown kind");
    n.kind = *kind;
    n.content = field<std::string>(j, "content", file, line);
    n.doc_id = field<std::string>(j, "doc_id", file, line);
    const auto nullable = [&](const char* key) -> const ojson* {
        const auto it = j.find(key);
        if (it == j.end()) corrupt(file, line, std::string("missing key '") + key + "'");
        return it->is_null() ? nullptr : &*it;
    };
    if (const ojson* p = nullable("path")) {
        if (!p->is_string()) corrupt(file, line, "bad type for 'path'");
        n.path = p->get<std::string>();
    }
    if (const ojson* v = nullable("value")) {
        if (!v->is_string()) corrupt(file, line, "bad type for 'value'");
        n.value = v->get<std::string>();
    }
    if (const ojson* f = nullable("function_id")) {
        if (!f->is_number_unsigned()) corrupt(file, line, "bad type for 'function_id'");
        n.function_id = f->get<NodeId>();
    }
    if (const ojson* s = nullable("span")) {
        if (!s->is_array() || s->size() != 2 || !(*s)[0].is_number_integer() || !(*s)[1].is_number_integer()) {
            corrupt(file, line, "bad type for 'span'");
        }
        n.span = Span{(*s)[0].get<int>(), (*s)[1].get<int>()};
    }
    if (const ojson* e = nullable("embedding")) {
        if (!e->is_array()) corrupt(file, line, "bad type for 'embedding'");
        if (e->size() != dim) {
            throw Error(ErrorCode::DimensionMismatch, file + " line " + std::to_string(line) + ": embedding length " +
                                                          std::to_string(e->size()) + ", manifest declares " +
                                                          std::to_string(dim));
        }
        Embedding vec;
        vec.reserve(e->size());
        for (const ojson& x : *e) {
            if (!x.is_number()) corrupt(file, line, "non-numeric embedding component");
            vec.push_back(x.get<double>());
        }
        n.embedding = std::move(vec);
    }
    return n;
}

template <typename Fn>
std::size_t for_each_line(const fs::path& p, Fn&& fn) {
    std::ifstream in = open_in(p);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        ojson j;
        try {
            j = ojson::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            corrupt(p.filename().string(), lineno, e.what());
        }
        fn(j, lineno);
    }
    return lineno;
}

}  // namespace

std::string iso8601_now() {
    std::time_t t = 0;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    } else {
        t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ojson node_to_json(const PkgNode& n) {
    ojson j;
    j["id"] = n.id;
    j["kind"] = to_string(n.kind);
    j["content"] = n.content;
    j["path"] = n.path ? ojson(*n.path) : ojson(nullptr);
    j["value"] = n.value ? ojson(*n.value) : ojson(nullptr);
    j["doc_id"] = n.doc_id;
    j["function_id"] = n.function_id ? ojson(*n.function_id) : ojson(nullptr);
    j["span"] = n.span ? ojson::array({n.span->start, n.span->end}) : ojson(nullptr);
    j["embedding"] = n.embedding ? ojson(*n.embedding) : ojson(nullptr);
    return j;
}

ojson edge_to_json(const PkgEdge& e) {
    ojson j;
    j["src"] = e.src;
    j["dst"] = e.dst;
    j["kind"] = to_string(e.kind);
    return j;
}

ojson manifest_to_json(const GraphManifest& m) {
    ojson j;
    j["format_version"] = m.format_version;
    j["embedder_id"] = m.embedder_id;
    j["embedding_dim"] = m.embedding_dim;
    j["node_count"] = m.node_count;
    j["edge_count"] = m.edge_count;
    j["created_at"] = m.created_at;
    return j;
}

void save_graph(const Graph& graph, const fs::path& dir, const SaveOptions& options) {
    if (!graph.sealed() && !options.allow_unsealed) throw Error(ErrorCode::NotSealed, "save requires a sealed graph");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

    constexpr auto kDump = [](const ojson& j) { return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict); };
    {
        std::ofstream out = open_out(dir / "nodes.jsonl");
        for (const PkgNode& n : graph.nodes()) out << kDump(node_to_json(n)) << '\n';
        if (!out) throw Error(ErrorCode::Io, "write failed: nodes.jsonl");
    }
    {
        std::ofstream out = open_out(dir / "edges.jsonl");
        for (const PkgEdge& e : graph.edges()) out << kDump(edge_to_json(e)) << '\n';
        if (!out) throw Error(ErrorCode::Io, "write failed: edges.jsonl");
    }
    GraphManifest m;
    m.embedder_id = graph.embedding_info().embedder_id;
    m.embedding_dim = graph.embedding_info().dimension;
    m.node_count = graph.node_count();
    m.edge_count = graph.edge_count();
    m.created_at = options.created_at ? *options.created_at : iso8601_now();
    std::ofstream out = open_out(dir / "manifest.json");
    out << manifest_to_json(m).dump(2) << '\n';
    if (!out) throw Error(ErrorCode::Io, "write failed: manifest.json");
}

GraphManifest read_manifest(const fs::path& dir) {
    const fs::path p = dir / "manifest.json";
    if (!fs::exists(p)) throw Error(ErrorCode::Io, "no manifest.json in " + dir.string());
    std::ifstream in = open_in(p);
    ojson j;
    try {
        j = ojson::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        corrupt("manifest.json", 1, e.what());
    }
    if (!j.is_object()) corrupt("manifest.json", 1, "not an object");
    GraphManifest m;
    m.format_version = field<std::string>(j, "format_version", "manifest.json", 1);
    if (m.format_version != kFormatVersion) {
        throw Error(ErrorCode::FormatVersionMismatch,
                    "format_version " + m.format_version + ", expected " + std::string(kFormatVersion));
    }
    m.embedder_id = field<std::string>(j, "embedder_id", "manifest.json", 1);
    m.embedding_dim = field<std::size_t>(j, "embedding_dim", "manifest.json", 1);
    m.node_count = field<std::size_t>(j, "node_count", "manifest.json", 1);
    m.edge_count = field<std::size_t>(j, "edge_count", "manifest.json", 1);
    m.created_at = field<std::string>(j, "created_at", "manifest.json", 1);
    if (m.embedding_dim == 0) corrupt("manifest.json", 1, "embedding_dim must be positive");
    return m;
}

Graph load_graph(const fs::path& dir, const LoadOptions& options) {
    const GraphManifest m = read_manifest(dir);
    Graph g(EmbeddingInfo{m.embedder_id, m.embedding_dim});
    const std::size_t node_lines = for_each_line(dir / "nodes.jsonl", [&](const ojson& j, std::size_t line) {
        PkgNode n = node_from_json(j, line, m.embedding_dim);
        if (n.id != g.node_count()) corrupt("nodes.jsonl", line, "id " + std::to_string(n.id) + " out of sequence");
        try {
            g.add_node(std::move(n));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::DimensionMismatch) throw;
            corrupt("nodes.jsonl", line, e.what());
        }
    });
    const std::size_t edge_lines = for_each_line(dir / "edges.jsonl", [&](const ojson& j, std::size_t line) {
        if (!j.is_object()) corrupt("edges.jsonl", line, "not an object");
        PkgEdge e;
        e.src = field<NodeId>(j, "src", "edges.jsonl", line);
        e.dst = field<NodeId>(j, "dst", "edges.jsonl", line);
        const auto kind = parse_edge_kind(field<std::string>(j, "kind", "edges.jsonl", line));
        if (!kind) corrupt("edges.jsonl", line, "unknown kind");
        e.kind = *kind;
        try {
            g.add_edge(e);
        } catch (const Error& err) {
            corrupt("edges.jsonl", line, err.what());
        }
    });
    if (node_lines != m.node_count) {
        corrupt("nodes.jsonl", node_lines, "manifest declares " + std::to_string(m.node_count) + " nodes");
    }
    if (edge_lines != m.edge_count) {
        corrupt("edges.jsonl", edge_lines, "manifest declares " + std::to_string(m.edge_count) + " edges");
    }
    if (options.seal) g.seal();
    return g;
}

}  // namespace pkgraph
