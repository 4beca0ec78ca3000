#include <benchmark/benchmark.h>

#include <numeric>

#include "coloc/ensemble.hpp"
#include "coloc/features.hpp"
#include "coloc/geodyads.hpp"
#include "coloc/synth.hpp"
#include "coloc/thresholds.hpp"

using namespace coloc;

namespace {

void BM_Haversine(benchmark::State& state) {
  Rng rng(1, "bench");
  std::vector<GeoPoint> pts(4096);
  for (auto& p : pts) p = {40 + rng.normal(0, 0.01), -75 + rng.normal(0, 0.01)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(haversine_m(pts[i & 4095], pts[(i + 1) & 4095]));
    ++i;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Haversine);

void BM_Cluster1d(benchmark::State& state) {
  Rng rng(2, "bench");
  std::vector<WeightedSample> s(static_cast<std::size_t>(state.range(0)));
  for (auto& x : s) x = {std::floor(rng.uniform() * 1999), 1 + rng.uniform()};
  for (auto _ : state) benchmark::DoNotOptimize(cluster_1d(s, 10, 2000).cost);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Cluster1d)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

struct ExtractFixture {
  SynthCohort cohort;
  GridSet grids;
  std::vector<Dyad> dyads;
  DyadContext ctx;

  ExtractFixture() : cohort(generate_cohort(config())) {
    grids = build_grids(cohort.traces.locations, cohort.traces.wifi, cohort.study, cohort.study.nodes);
    dyads = eligible_dyads(grids, cohort.study.nodes).dyads;
    ctx = DyadContext::make(cohort.study, kPublishedBreaksM, *grids.hotspots);
  }
  static SynthConfig config() {
    SynthConfig c;
    c.n_nodes = 12;
    c.residents = 4;
    c.period_days = 28;
    return c;
  }
};

const ExtractFixture& extract_fixture() {
  static const ExtractFixture f;
  return f;
}

void BM_DyadSeries(benchmark::State& state) {
  const auto& f = extract_fixture();
  DyadSeries out;
  for (auto _ : state) {
    build_dyad_series(*f.grids.find(f.dyads[0].a), *f.grids.find(f.dyads[0].b), f.ctx, out);
    benchmark::DoNotOptimize(out.distance.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.grids.bins->size()));
}
BENCHMARK(BM_DyadSeries);

void BM_ExtractDyad(benchmark::State& state) {
  const auto& f = extract_fixture();
  const ExtractionPlan plan(*f.grids.bins, f.cohort.study, FeatureSchema{});
  const DyadSeries s = build_dyad_series(*f.grids.find(f.dyads[0].a), *f.grids.find(f.dyads[0].b), f.ctx);
  std::vector<double> row(plan.schema().column_count());
  for (auto _ : state) {
    extract_row(s, plan, Period::kP1, row);
    extract_row(s, plan, Period::kP2, row);
    benchmark::DoNotOptimize(row.data());
  }
}
BENCHMARK(BM_ExtractDyad)->Unit(benchmark::kMillisecond);

void BM_ForestFit(benchmark::State& state) {
  Rng rng(3, "bench");
  const std::size_t n = 1000, p = static_cast<std::size_t>(state.range(0));
  Dataset d(n, std::vector<std::string>(p, "f"));
  for (std::size_t r = 0; r < n; ++r) {
    d.labels()[r] = rng.bernoulli(0.3);
    for (std::size_t c = 0; c < p; ++c) d.set(r, c, rng.bernoulli(0.1) ? kMissing : rng.normal(d.labels()[r] * 0.3, 1));
  }
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  ForestParams fp;
  fp.trees = 20;
  for (auto _ : state) benchmark::DoNotOptimize(RandomForest::fit(d, rows, fp, 1).trees().size());
}
BENCHMARK(BM_ForestFit)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
