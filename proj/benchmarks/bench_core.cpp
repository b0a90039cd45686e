#include <benchmark/benchmark.h>

#include "sectoria/absorption.hpp"
#include "sectoria/scenario.hpp"
#include "sectoria/semigroups.hpp"
#include "sectoria/series.hpp"

using namespace sectoria;

namespace {

void bm_orthonormalize(benchmark::State& state) {
  const Index d = state.range(0);
  Rng rng(1);
  HSpace h(d);
  const Matrix spanning = rng.cnormal_matrix(d, d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Subspace::orthonormalize(h, spanning));
  }
}
BENCHMARK(bm_orthonormalize)->Arg(8)->Arg(32)->Arg(128);

void bm_graph_of_closed_form(benchmark::State& state) {
  const Index d = state.range(0);
  Rng rng(2);
  HSpace h(d);
  const SesqForm a = gen::vertex0_form(rng, h, d / 2, 0.7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(graph_of_closed_form(a));
  }
}
BENCHMARK(bm_graph_of_closed_form)->Arg(8)->Arg(16)->Arg(32);

void bm_semigroup(benchmark::State& state) {
  const Index d = state.range(0);
  Rng rng(3);
  HSpace h(d);
  const LinearRelation a = gen::m_sectorial_relation(rng, h, 0.7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(semigroup(a, 1.0));
  }
}
BENCHMARK(bm_semigroup)->Arg(8)->Arg(16)->Arg(32);

void bm_resolvent_power(benchmark::State& state) {
  Rng rng(4);
  HSpace h(8);
  const LinearRelation a = gen::m_sectorial_relation(rng, h, 0.7);
  const long n = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(resolvent_power_approx(a, 1.0, n));
  }
}
BENCHMARK(bm_resolvent_power)->Arg(1 << 6)->Arg(1 << 12)->Arg(1 << 20);

void bm_tower_build(benchmark::State& state) {
  Rng rng(5);
  HSpace h(state.range(0));
  const FormSequence seq = gen::form_sequence(rng, h, 4, 0.8, GeometricTail{0.5});
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_tower(seq, 4));
  }
}
BENCHMARK(bm_tower_build)->Arg(6)->Arg(12);

void bm_example43(benchmark::State& state) {
  Rng rng(6);
  HSpace h(state.range(0));
  const Vector phi = rng.unit_vector(h);
  for (auto _ : state) {
    benchmark::DoNotOptimize(example43_scenario(static_cast<int>(state.range(0)), phi));
  }
}
BENCHMARK(bm_example43)->Arg(4)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
