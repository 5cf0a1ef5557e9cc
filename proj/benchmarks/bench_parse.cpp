#include <benchmark/benchmark.h>

#include "pkgraph/analyze/code_analyzer.hpp"
#include "pkgraph/python/ast.hpp"
#include "synthetic.hpp"

namespace {

std::string module_of(std::size_t n) {
    std::string src;
    for (const std::string& f : bench::synthetic_functions(n)) src += f + "\n";
    return src;
}

void BM_ParseModule(benchmark::State& state) {
    const std::string src = module_of(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(pkgraph::python::parse_module(src));
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * src.size()));
}
BENCHMARK(BM_ParseModule)->Arg(1)->Arg(32)->Arg(256);

void BM_CheckSyntaxError(benchmark::State& state) {
    // The error sits at the end so the whole file is scanned first.
    const std::string src = module_of(32) + "def broken(:\n    pass\n";
    for (auto _ : state) benchmark::DoNotOptimize(pkgraph::python::check_syntax(src));
}
BENCHMARK(BM_CheckSyntaxError);

void BM_ExtractFunctions(benchmark::State& state) {
    const std::string src = module_of(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(pkgraph::extract_functions(src, "bench"));
}
BENCHMARK(BM_ExtractFunctions)->Arg(32)->Arg(256);

}  // namespace
