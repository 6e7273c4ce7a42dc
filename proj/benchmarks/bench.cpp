#include <benchmark/benchmark.h>

#include "martlab/decompose.hpp"
#include "martlab/verify.hpp"

namespace {

using namespace martlab;

void BM_TreeMartingale(benchmark::State& state) {
    const NormedSpace space(3, 2.0);
    const int depth = static_cast<int>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        AdaptedProcess m = genRandomTreeMartingale(seed++, depth, 2, space);
        benchmark::DoNotOptimize(m.values.back());
    }
}
BENCHMARK(BM_TreeMartingale)->Arg(6)->Arg(8)->Arg(10);

void BM_Gundy(benchmark::State& state) {
    const NormedSpace space(3, 2.0);
    const AdaptedProcess m =
        genRandomTreeMartingale(7, static_cast<int>(state.range(0)), 2, space);
    const double e = treeMeanNorm(m, m.levelCount() - 1, space);
    for (auto _ : state) {
        TreeGundyTriple g = gundy(m, e, space);
        benchmark::DoNotOptimize(g.m3.values.back());
    }
}
BENCHMARK(BM_Gundy)->Arg(6)->Arg(8)->Arg(10);

void BM_HitAndFreezeTransform(benchmark::State& state) {
    const NormedSpace space(3, 2.0);
    const AdaptedProcess m =
        genRandomTreeMartingale(11, static_cast<int>(state.range(0)), 2, space);
    const double e = treeMeanNorm(m, m.levelCount() - 1, space);
    for (auto _ : state) {
        TransformCoeffs c = hitAndFreezeCoeffs(m, e, space);
        AdaptedProcess tm = applyTransform(m, c);
        benchmark::DoNotOptimize(tm.values.back());
    }
}
BENCHMARK(BM_HitAndFreezeTransform)->Arg(6)->Arg(8)->Arg(10);

void BM_CompositePath(benchmark::State& state) {
    CompositeModel model;
    model.grid = TimeGrid::regular(1.0, static_cast<std::size_t>(state.range(0)));
    model.space = NormedSpace(3, 2.0);
    model.cont = ContinuousDriverSpec{1.0, std::nullopt};
    MarkLaw marks;
    marks.points = {{1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}};
    marks.weights = {0.5, 0.5};
    model.poisson = CompensatorModel{3.0, marks};
    std::uint64_t i = 0;
    for (auto _ : state) {
        LabeledPath p = genComposite(model, 42, i++);
        benchmark::DoNotOptimize(p.steps.back());
    }
}
BENCHMARK(BM_CompositePath)->Arg(100)->Arg(400);

void BM_EmbeddingPathStats(benchmark::State& state) {
    const ProbeWitness w = haarDualWitness(static_cast<int>(state.range(0)));
    BurkholderEmbeddingSpec spec;
    spec.pw = w.pw;
    spec.space = NormedSpace(w.pw.dim(), NormedSpace::infinity());
    spec.a.resize(w.coeff.size());
    for (std::size_t n = 0; n < w.coeff.size(); ++n) spec.a[n] = w.coeff[n] >= 0.5 ? 1 : 0;
    std::uint64_t i = 0;
    for (auto _ : state) {
        EmbeddingPathStats st = embeddingPathStats(spec, 5, i++);
        benchmark::DoNotOptimize(st);
    }
}
BENCHMARK(BM_EmbeddingPathStats)->Arg(6)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
