#include <benchmark/benchmark.h>

#include <map>

#include "fieldnorm/bias_eval.hpp"
#include "fieldnorm/corpus.hpp"
#include "fieldnorm/source_norm.hpp"
#include "fieldnorm/synthgen.hpp"
#include "fieldnorm/target_norm.hpp"

namespace {

using namespace fieldnorm;

const Grouping kField{"synth", "field"};

// `fields` fields of `per_year` papers in each window year.
SynthConfig config(int fields, std::int64_t per_year) {
    SynthConfig c;
    c.seed = 11;
    c.epsilon = 0.2;
    for (int f = 0; f < fields; ++f) {
        FieldSpec s;
        s.field_id = "F" + std::to_string(f);
        s.papers_per_year = {{2020, per_year}, {2021, per_year}, {2022, per_year}};
        s.journals = 5;
        s.mean_active_refs = 5.0 + f;
        s.total_refs_multiplier = 2.0;
        c.fields.push_back(s);
    }
    return c;
}

const SyntheticCorpus& synthetic(std::int64_t per_year) {
    static std::map<std::int64_t, SyntheticCorpus> cache;
    auto it = cache.find(per_year);
    if (it == cache.end()) it = cache.emplace(per_year, generate(config(10, per_year))).first;
    return it->second;
}

void BM_Generate(benchmark::State& state) {
    const auto cfg = config(10, state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(generate(cfg));
    state.SetItemsProcessed(state.iterations() * 30 * state.range(0));
}
BENCHMARK(BM_Generate)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_CorpusBuild(benchmark::State& state) {
    const auto& s = synthetic(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(Corpus::build(s.papers, s.edges, s.assignments, WindowConfig{}));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.edges.size()));
}
BENCHMARK(BM_CorpusBuild)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Sc3(benchmark::State& state) {
    const auto& s = synthetic(5000);
    const auto c = Corpus::build(s.papers, s.edges, s.assignments, WindowConfig{});
    const auto stats = compute_citing_stats(c);
    const auto threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(compute_sc3(c, stats, threads));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.edge_count()));
}
BENCHMARK(BM_Sc3)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_MetricMatrix(benchmark::State& state) {
    const auto& s = synthetic(5000);
    const auto c = Corpus::build(s.papers, s.edges, s.assignments, WindowConfig{});
    for (auto _ : state) benchmark::DoNotOptimize(build_metric_matrix(c, kField));
}
BENCHMARK(BM_MetricMatrix)->Unit(benchmark::kMillisecond);

void BM_NullSample(benchmark::State& state) {
    const std::vector<std::int64_t> sizes(static_cast<std::size_t>(state.range(0)), 1000);
    auto engine = make_engine(1, "bench");
    for (auto _ : state) benchmark::DoNotOptimize(sample_unbiased_dm(sizes, 10.0, engine));
}
BENCHMARK(BM_NullSample)->Arg(10)->Arg(100)->Arg(1000);

void BM_NullModel(benchmark::State& state) {
    const std::vector<std::int64_t> sizes(10, 1000);
    for (auto _ : state) {
        benchmark::DoNotOptimize(null_model_distribution(sizes, 10.0, state.range(0), 1));
    }
}
BENCHMARK(BM_NullModel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_RankAndBias(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<std::string> ids(n);
    std::vector<double> values(n);
    FieldLabels labels;
    for (int f = 0; f < 100; ++f) labels.field_ids.push_back(std::to_string(f));
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = std::to_string(i);
        values[i] = static_cast<double>((i * 2654435761u) % 1000);
        labels.label.push_back(static_cast<std::int32_t>(i % 100));
    }
    for (auto _ : state) {
        const auto ranking = rank_papers(ids, values);
        benchmark::DoNotOptimize(mahalanobis_bias(top_share_counts(ranking, 10.0, labels)));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RankAndBias)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
