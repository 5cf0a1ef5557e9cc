// SPDX-License-Identifier: Apache-2.0
// pkgraph: build, query and evaluate programming knowledge graphs.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pkgraph/analyze/corpus.hpp"
#include "pkgraph/config.hpp"
#include "pkgraph/embed/embedder.hpp"
#include "pkgraph/error.hpp"
#include "pkgraph/eval/harness.hpp"
#include "pkgraph/model/persistence.hpp"
#include "pkgraph/rerank/reranker.hpp"
#include "pkgraph/retrieve/retriever.hpp"
#include "pkgraph/retrieve/templates.hpp"

namespace fs = std::filesystem;
using namespace pkgraph;

namespace {

constexpr int kOk = 0;
constexpr int kEnvError = 1;
constexpr int kEmpty = 2;

struct Options {
    std::string config_path;
    std::optional<std::size_t> parallelism;

    // build
    std::string input;
    std::string kind = "code";
    std::string out;
    bool no_embed = false;
    bool resume = false;

    // query
    std::string graph;
    std::string mode = "block";
    std::string prompt;
    bool no_prune = false;
    std::size_t top_k = 1;
    bool json = false;
    std::optional<std::string> template_id;

    // rerank
    std::string candidates;
    std::string query;

    // eval
    std::string tasks;
    std::vector<std::string> approaches{"none", "block-pkg"};
    std::string report;
    std::optional<std::string> csv;
    std::optional<std::string> topics;
    std::optional<std::string> mock_table;
};

Config effective_config(const Options& o) {
    Config c = o.config_path.empty() ? Config{} : load_config(o.config_path);
    if (o.parallelism) c.parallelism = *o.parallelism;
    if (o.template_id) c.template_id = *o.template_id;
    if (o.mock_table) {
        if (!c.generator) c.generator = GeneratorSpec{};
        c.generator->endpoint = "mock";
        c.generator->mock_table = *o.mock_table;
    }
    validate(c);
    return c;
}

TemplateRegistry templates_for(const Config& c) {
    TemplateRegistry r = TemplateRegistry::builtin();
    if (c.templates_file) r.load_file(*c.templates_file);
    return r;
}

Graph load_existing(const std::string& dir) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, "graph directory not found: " + dir);
    return load_graph(dir);
}

void print_stats(const Graph& g, std::ostream& out) {
    const GraphStats s = g.stats();
    out << "nodes " << s.node_total << "\n";
    for (std::size_t i = 0; i < kNodeKindCount; ++i) {
        out << "  " << to_string(static_cast<NodeKind>(i)) << " " << s.nodes[i] << "\n";
    }
    out << "edges " << s.edge_total << "\n";
    for (std::size_t i = 0; i < kEdgeKindCount; ++i) {
        out << "  " << to_string(static_cast<EdgeKind>(i)) << " " << s.edges[i] << "\n";
    }
}

nlohmann::ordered_json stats_json(const Graph& g) {
    const GraphStats s = g.stats();
    nlohmann::ordered_json nodes = nlohmann::ordered_json::object();
    nlohmann::ordered_json edges = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < kNodeKindCount; ++i) nodes[std::string(to_string(static_cast<NodeKind>(i)))] = s.nodes[i];
    for (std::size_t i = 0; i < kEdgeKindCount; ++i) edges[std::string(to_string(static_cast<EdgeKind>(i)))] = s.edges[i];
    return {{"node_count", s.node_total}, {"edge_count", s.edge_total}, {"nodes", nodes}, {"edges", edges}};
}

int cmd_build(const Options& o) {
    const Config cfg = effective_config(o);
    Graph graph;
    nlohmann::ordered_json build_info = nlohmann::ordered_json::object();
    const bool resuming = o.resume && fs::exists(fs::path(o.out) / "manifest.json");
    if (resuming) {
        graph = load_graph(o.out, LoadOptions{.seal = false});
        std::cerr << "resuming from " << o.out << " (" << graph.node_count() << " nodes)\n";
    } else {
        if (!fs::exists(o.input)) throw Error(ErrorCode::Io, "input not found: " + o.input);
        graph = Graph(EmbeddingInfo{embedder_id(cfg.embedder), cfg.embedder.dimension});
        BuildReport report;
        if (o.kind == "code") {
            report = build_code_graph(o.input, graph);
        } else if (o.kind == "json") {
            report = build_json_graph(o.input, graph);
        } else {
            throw Error(ErrorCode::InvalidConfig, "--kind must be code or json");
        }
        std::cerr << "records " << report.records << ", documents " << report.documents << ", skipped "
                  << report.skipped.size();
        if (o.kind == "code") std::cerr << ", functions " << report.functions << ", blocks " << report.blocks;
        std::cerr << "\n";
        for (const LineFailure& f : report.skipped) std::cerr << "  line " << f.line << ": " << f.message << "\n";
        nlohmann::ordered_json skipped = nlohmann::ordered_json::array();
        nlohmann::ordered_json diagnostics = nlohmann::ordered_json::array();
        for (const LineFailure& f : report.skipped) skipped.push_back({{"line", f.line}, {"message", f.message}});
        for (const ParseDiagnostic& d : report.diagnostics) {
            std::cerr << "  " << d.doc_id << " line " << d.line << ": " << d.message << "\n";
            diagnostics.push_back({{"doc_id", d.doc_id}, {"line", d.line}, {"message", d.message}});
        }
        build_info = {{"records", report.records}, {"documents", report.documents}, {"skipped", skipped},
                      {"diagnostics", diagnostics}};
    }
    if (!o.no_embed) {
        const auto embedder = make_embedder(cfg.embedder);
        try {
            const EmbedProgress p = embed_graph(graph, *embedder, {}, cfg.embedder.batch_size);
            std::cerr << "embedded " << p.embedded << " nodes";
            if (p.skipped) std::cerr << " (" << p.skipped << " already done)";
            std::cerr << "\n";
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ProviderError && e.code() != ErrorCode::DimensionMismatch) throw;
            SaveOptions checkpoint;
            checkpoint.allow_unsealed = true;
            save_graph(graph, o.out, checkpoint);
            std::cerr << "checkpoint written to " << o.out << "; rerun with --resume\n";
            throw;
        }
    }
    graph.seal();
    save_graph(graph, o.out);
    if (o.json) {
        nlohmann::ordered_json j = stats_json(graph);
        if (!build_info.empty()) j["build"] = std::move(build_info);
        std::cout << j.dump(2) << "\n";
    } else {
        print_stats(graph, std::cout);
    }
    return kOk;
}

int cmd_query(const Options& o) {
    const Config cfg = effective_config(o);
    const auto mode = parse_mode(o.mode);
    if (!mode) throw Error(ErrorCode::InvalidConfig, "--mode must be block, function or path");
    const Graph graph = load_existing(o.graph);
    const auto embedder = make_embedder(cfg.embedder);
    RetrieverOptions ropts{cfg.prune, cfg.max_calls};
    if (o.no_prune) ropts.prune.enabled = false;
    const Retriever retriever(graph, *embedder, ropts);
    const RetrievalResult r = retriever.retrieve(o.prompt, *mode);
    const std::vector<ScoredNode> ranking = retriever.search(o.prompt, *mode, o.top_k);
    std::string prompt_text;
    if (o.template_id) prompt_text = augment(o.prompt, r, *o.template_id, templates_for(cfg));

    if (o.json) {
        nlohmann::ordered_json j = to_json(r);
        nlohmann::ordered_json rank = nlohmann::ordered_json::array();
        for (const ScoredNode& s : ranking) rank.push_back({{"node_id", s.id}, {"score", s.score}});
        j["ranking"] = std::move(rank);
        if (o.template_id) j["prompt"] = prompt_text;
        std::cout << j.dump(2) << "\n";
        return kOk;
    }
    const PkgNode& node = graph.node(r.node_id);
    std::printf("best %s node %llu (doc %s)  similarity %.6f", std::string(to_string(node.kind)).c_str(),
                static_cast<unsigned long long>(r.node_id), node.doc_id.c_str(), r.raw_similarity);
    if (r.pruned) std::printf("  pruned %.6f", r.augmented_similarity);
    std::printf("\n");
    for (const Span& s : r.pruned_branch_spans) std::printf("removed lines %d-%d\n", s.start, s.end);
    std::printf("----\n%s", r.rendered_context.c_str());
    if (!r.rendered_context.empty() && r.rendered_context.back() != '\n') std::printf("\n");
    for (const ResolvedCall& c : r.resolved_calls) std::printf("---- helper %s\n%s", c.name.c_str(), c.content.c_str());
    if (ranking.size() > 1) {
        std::printf("---- top %zu\n", ranking.size());
        for (const ScoredNode& s : ranking) std::printf("%8llu  %.6f\n", static_cast<unsigned long long>(s.id), s.score);
    }
    if (o.template_id) std::printf("---- prompt\n%s\n", prompt_text.c_str());
    return kOk;
}

ProcessRunner make_runner(const Config& cfg) {
    if (cfg.runner.command.empty()) throw Error(ErrorCode::RunnerUnavailable, "runner.command is not configured");
    return ProcessRunner(cfg.runner);
}

int cmd_rerank(const Options& o) {
    const Config cfg = effective_config(o);
    std::vector<Candidate> candidates = load_candidates(o.candidates);
    if (candidates.empty()) throw Error(ErrorCode::NoCandidates, "no candidates in " + o.candidates);
    ProcessRunner runner = make_runner(cfg);
    const auto embedder = make_embedder(cfg.embedder);
    const RerankReport report = rerank(std::move(candidates), o.query, runner, *embedder, cfg.parallelism);
    if (o.json) {
        std::cout << to_json(report).dump(2) << "\n";
        return kOk;
    }
    std::printf("chosen %s (tier %d)\n", report.chosen_id.c_str(), static_cast<int>(report.tier));
    std::printf("survivors %zu -> %zu -> %zu\n", report.total, report.parsed, report.ran);
    for (const Candidate& c : report.candidates) {
        std::printf("  %-16s %-12s syntax=%s runtime=%s%s", c.id.c_str(), c.origin.c_str(),
                    c.syntax_ok.value_or(false) ? "ok" : "fail",
                    !c.runtime_ok ? "-" : (*c.runtime_ok ? "ok" : "fail"),
                    c.runtime_error_kind ? (" (" + *c.runtime_error_kind + ")").c_str() : "");
        if (c.similarity) std::printf("  sim %.6f", *c.similarity);
        std::printf("\n");
    }
    for (const OriginStats& s : report.origins) {
        std::printf("origin %-12s syntax errors %.3f  runtime errors %.3f\n", s.origin.c_str(), s.syntax_error_rate,
                    s.runtime_error_rate);
    }
    return kOk;
}

int cmd_eval(const Options& o) {
    const Config cfg = effective_config(o);
    if (!cfg.generator) throw Error(ErrorCode::InvalidConfig, "generator is not configured");
    std::vector<Task> tasks = load_tasks(o.tasks);
    if (o.topics) apply_topics(tasks, *o.topics);
    std::vector<Approach> approaches;
    bool needs_graph = false;
    for (const std::string& label : o.approaches) {
        approaches.push_back(parse_approach(label, cfg.template_id));
        needs_graph = needs_graph || approaches.back().mode.has_value();
    }
    std::optional<Graph> graph;
    if (needs_graph || !o.graph.empty()) graph = load_existing(o.graph);
    const auto embedder = make_embedder(cfg.embedder);
    std::optional<Retriever> retriever;
    if (graph) retriever.emplace(*graph, *embedder, RetrieverOptions{cfg.prune, cfg.max_calls});
    const auto generator = make_generator(*cfg.generator);
    ProcessRunner runner = make_runner(cfg);
    const TemplateRegistry templates = templates_for(cfg);

    EvalReport report = run_suite(tasks, retriever ? &*retriever : nullptr, approaches, templates, *generator, runner,
                                  *embedder, SuiteOptions{cfg.parallelism, cfg.generator->retries});
    report.metadata["template"] = cfg.template_id;
    report.metadata["generator"] = {{"endpoint", cfg.generator->endpoint},
                                    {"model", cfg.generator->model},
                                    {"max_new_tokens", cfg.generator->max_new_tokens},
                                    {"temperature", cfg.generator->temperature}};
    const std::string text = to_json(report).dump(2) + "\n";
    {
        std::ofstream out(o.report, std::ios::binary | std::ios::trunc);
        if (!out || !(out << text)) throw Error(ErrorCode::Io, "cannot write " + o.report);
    }
    if (o.csv) {
        std::ofstream out(*o.csv, std::ios::binary | std::ios::trunc);
        if (!out || !(out << pass_matrix_csv(report))) throw Error(ErrorCode::Io, "cannot write " + *o.csv);
    }
    if (o.json) {
        std::cout << text;
    } else {
        std::cout << summary_table(report);
    }
    return kOk;
}

int cmd_stats(const Options& o) {
    effective_config(o);  // a malformed --config is an error even where no setting applies
    const GraphManifest m = read_manifest(o.graph);
    const Graph graph = load_existing(o.graph);
    if (o.json) {
        nlohmann::ordered_json j = manifest_to_json(m);
        j["stats"] = stats_json(graph);
        std::cout << j.dump(2) << "\n";
        return kOk;
    }
    std::cout << "format_version " << m.format_version << "\nembedder " << m.embedder_id << " (d=" << m.embedding_dim
              << ")\ncreated_at " << m.created_at << "\n";
    print_stats(graph, std::cout);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Build, query and evaluate programming knowledge graphs"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--parallelism", o.parallelism, "Worker budget (overrides the config)");

    CLI::App* build = app.add_subcommand("build", "Extract, embed, seal and save a graph");
    build->add_option("--input", o.input, "Corpus (JSON Lines)");
    build->add_option("--kind", o.kind, "code or json")->check(CLI::IsMember({"code", "json"}));
    build->add_option("--out", o.out, "Output graph directory")->required();
    build->add_flag("--no-embed", o.no_embed, "Save nodes without embeddings");
    build->add_flag("--resume", o.resume, "Continue embedding a checkpoint in --out");
    build->add_flag("--json", o.json, "Print stats as JSON");

    CLI::App* query = app.add_subcommand("query", "Retrieve context for a prompt");
    query->add_option("--graph", o.graph, "Graph directory")->required();
    query->add_option("--mode", o.mode, "block, function or path")->check(CLI::IsMember({"block", "function", "path"}));
    query->add_option("--prompt", o.prompt, "Query text")->required();
    query->add_flag("--no-prune", o.no_prune, "Return the best node unpruned");
    query->add_option("--top-k", o.top_k, "Ranking length")->check(CLI::PositiveNumber);
    query->add_option("--template", o.template_id, "Also print the augmented prompt");
    query->add_flag("--json", o.json, "Machine-readable output");

    CLI::App* rr = app.add_subcommand("rerank", "Filter and select among candidate programs");
    rr->add_option("--candidates", o.candidates, "Directory with index.jsonl")->required();
    rr->add_option("--query", o.query, "Query text")->required();
    rr->add_flag("--json", o.json, "Machine-readable output");

    CLI::App* ev = app.add_subcommand("eval", "Run an evaluation suite");
    ev->add_option("--graph", o.graph, "Graph directory");
    ev->add_option("--tasks", o.tasks, "Task suite (JSON Lines)")->required();
    ev->add_option("--approaches", o.approaches, "Approach labels")->delimiter(',');
    ev->add_option("--report", o.report, "Report path (JSON)")->required();
    ev->add_option("--csv", o.csv, "Also write the pass matrix as CSV");
    ev->add_option("--topics", o.topics, "JSON object task_id -> topic");
    ev->add_option("--mock-table", o.mock_table, "Use the mock generator with this table");
    ev->add_option("--template", o.template_id, "Prompt template");
    ev->add_flag("--json", o.json, "Print the report instead of the summary");

    CLI::App* st = app.add_subcommand("stats", "Print graph statistics");
    st->add_option("--graph", o.graph, "Graph directory")->required();
    st->add_flag("--json", o.json, "Machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kEnvError;
    }

    try {
        if (*build) {
            if (o.input.empty() && !o.resume) throw Error(ErrorCode::InvalidConfig, "--input is required");
            return cmd_build(o);
        }
        if (*query) return cmd_query(o);
        if (*rr) return cmd_rerank(o);
        if (*ev) return cmd_eval(o);
        if (*st) return cmd_stats(o);
    } catch (const Error& e) {
        std::cerr << "pkgraph: " << e.what() << "\n";
        return e.code() == ErrorCode::EmptyIndex || e.code() == ErrorCode::NoCandidates ? kEmpty : kEnvError;
    } catch (const std::exception& e) {
        std::cerr << "pkgraph: " << e.what() << "\n";
        return kEnvError;
    }
    return kEnvError;
}
