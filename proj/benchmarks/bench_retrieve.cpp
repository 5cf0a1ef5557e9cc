#include <benchmark/benchmark.h>

#include "pkgraph/analyze/code_analyzer.hpp"
#include "pkgraph/embed/embedder.hpp"
#include "pkgraph/retrieve/retriever.hpp"
#include "pkgraph/retrieve/search.hpp"
#include "synthetic.hpp"

namespace {

pkgraph::Graph graph_of(std::size_t functions) {
    pkgraph::Graph g(pkgraph::EmbeddingInfo{"det-v1", 256});
    const auto fns = bench::synthetic_functions(functions);
    for (std::size_t i = 0; i < fns.size(); ++i) {
        pkgraph::emit_graph(pkgraph::extract_functions(fns[i], "f" + std::to_string(i)).functions, g);
    }
    pkgraph::HashingEmbedder embedder;
    pkgraph::embed_graph(g, embedder);
    g.seal();
    return g;
}

void BM_Search(benchmark::State& state) {
    const pkgraph::Graph g = graph_of(static_cast<std::size_t>(state.range(0)));
    const pkgraph::HashingEmbedder embedder;
    const pkgraph::Embedding q = embedder.embed_one("append values above the limit");
    for (auto _ : state) benchmark::DoNotOptimize(pkgraph::search(g, q, pkgraph::RetrievalMode::BlockWise, 1));
    state.counters["nodes"] = static_cast<double>(g.node_count());
}
BENCHMARK(BM_Search)->Arg(100)->Arg(1000)->Arg(5000);

void BM_RetrieveWithPruning(benchmark::State& state) {
    const pkgraph::Graph g = graph_of(static_cast<std::size_t>(state.range(0)));
    pkgraph::HashingEmbedder embedder;
    const pkgraph::Retriever retriever(g, embedder, {});
    for (auto _ : state) {
        benchmark::DoNotOptimize(retriever.retrieve("count words above the limit", pkgraph::RetrievalMode::FunctionWise));
    }
}
BENCHMARK(BM_RetrieveWithPruning)->Arg(100)->Arg(1000);

}  // namespace
