#include <benchmark/benchmark.h>

#include "acml/classify.hpp"

using namespace acml;

namespace {

AlmostContactStructure sasakian_flat() {
  AdaptedChart chart = AdaptedChart::from_exprs(3, {"-2*x2", "0"});
  auto f = [](const char* s) { return ScalarField::from_expr(Expr::parse(s, 3)); };
  std::vector<ScalarField> g = {f("1"), f("0"), f("0"), f("1")};
  std::vector<ScalarField> phi = {f("0"), f("1"), f("-1"), f("0")};
  return AlmostContactStructure(chart, AdmissibleTensorField(chart, 0, 2, g),
                                AdmissibleTensorField(chart, 1, 1, phi));
}

void BM_expr_jet(benchmark::State& state) {
  const Expr e = Expr::parse("sin(exp(x1)+x2^2)*sqrt(2+cos(x3))", 3);
  const Point p{0.3, -0.4, 0.8};
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(e.jet(p, order));
}
BENCHMARK(BM_expr_jet)->Arg(0)->Arg(1)->Arg(2)->Arg(3);

void BM_levi_civita_point(benchmark::State& state) {
  const auto s = sasakian_flat();
  const FrameConnection lc = levi_civita_adapted(s);
  const Point p{0.2, 0.4, -0.1};
  EvalCache cache;
  for (auto _ : state) benchmark::DoNotOptimize(lc.values(p, &cache));
}
BENCHMARK(BM_levi_civita_point);

void BM_classify_sweep(benchmark::State& state) {
  const auto s = sasakian_flat();
  SampleSpec spec;
  spec.box.assign(3, {-1.0, 1.0});
  spec.count = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(classify(s, spec));
}
BENCHMARK(BM_classify_sweep)->Arg(25)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
