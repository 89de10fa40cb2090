#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "fakecti/fakecti.hpp"

using namespace fakecti;

namespace
{

std::vector<std::string> synthetic_docs(std::size_t n, std::size_t words, std::uint64_t seed)
{
    Xoshiro256StarStar rng(seed);
    std::vector<std::string> docs;
    docs.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        std::string d;
        for (std::size_t w = 0; w < words; ++w)
            d += "term" + std::to_string(rng.below(2000)) + (w + 1 < words ? " " : "");
        docs.push_back(std::move(d));
    }
    return docs;
}

void BM_TfidfFit(benchmark::State& state)
{
    const auto docs = synthetic_docs(static_cast<std::size_t>(state.range(0)), 12, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(TfidfModel::fit(docs));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TfidfFit)->Arg(1000)->Arg(10000);

void BM_TfidfTransform(benchmark::State& state)
{
    const auto model = TfidfModel::fit(synthetic_docs(5000, 12, 1));
    const auto queries = synthetic_docs(256, 12, 2);
    std::size_t i = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(model.transform(queries[i++ % queries.size()]));
}
BENCHMARK(BM_TfidfTransform);

// One article of `tuples` tuples against 3 campaigns of `refs` references each.
void BM_Voting(benchmark::State& state)
{
    const auto tuples = static_cast<std::size_t>(state.range(0));
    const auto refs = static_cast<std::size_t>(state.range(1));
    const auto ref_docs = synthetic_docs(3 * refs, 3, 3);
    const auto model = TfidfModel::fit(ref_docs);
    std::vector<ReferenceVector> index_refs;
    for (std::size_t r = 0; r < ref_docs.size(); ++r)
        index_refs.push_back({"C" + std::to_string(r % 3), ref_docs[r], model.transform(ref_docs[r])});
    const CampaignIndex index(Modality::Lexical, std::move(index_refs));
    std::vector<Embedding> article;
    for (const auto& d : synthetic_docs(tuples, 3, 4))
        article.emplace_back(model.transform(d));
    AttributionConfig config;
    for (auto _ : state)
        benchmark::DoNotOptimize(attribute_voting("a", article, index, config));
}
BENCHMARK(BM_Voting)->Args({10, 100})->Args({10, 2000})->Args({50, 2000});

void BM_ParseTuples(benchmark::State& state)
{
    std::string completion;
    for (int i = 0; i < state.range(0); ++i)
        completion += std::to_string(i + 1) + ". Country X - funds - Organization " + std::to_string(i) + "\n";
    completion += "END LIST\nsome trailing chatter\n";
    for (auto _ : state)
        benchmark::DoNotOptimize(parse_tuples(completion, "article"));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(completion.size()));
}
BENCHMARK(BM_ParseTuples)->Arg(10)->Arg(500);

} // namespace
BENCHMARK_MAIN();
