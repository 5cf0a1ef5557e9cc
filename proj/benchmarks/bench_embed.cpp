#include <benchmark/benchmark.h>

#include "pkgraph/embed/embedder.hpp"
#include "pkgraph/embed/embedding.hpp"
#include "synthetic.hpp"

namespace {

void BM_EmbedFunction(benchmark::State& state) {
    const pkgraph::HashingEmbedder embedder(static_cast<std::size_t>(state.range(0)));
    const std::vector<std::string> fns = bench::synthetic_functions(64);
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(embedder.embed_one(fns[i++ % fns.size()]));
}
BENCHMARK(BM_EmbedFunction)->Arg(64)->Arg(256)->Arg(1024);

void BM_Cosine(benchmark::State& state) {
    const pkgraph::HashingEmbedder embedder(static_cast<std::size_t>(state.range(0)));
    const pkgraph::Embedding a = embedder.embed_one("count the words in each line");
    const pkgraph::Embedding b = embedder.embed_one("sum values greater than a limit");
    for (auto _ : state) benchmark::DoNotOptimize(pkgraph::similarity(a, b));
}
BENCHMARK(BM_Cosine)->Arg(256)->Arg(1024);

}  // namespace
