// Micro-benchmarks for the planning kernels. The headline comparison is the
// score-sorted expectation against the brute-force product enumeration: the
// former stays polynomial in the action count, the latter does not.

#include <benchmark/benchmark.h>

#include "mdplook/augment.hpp"
#include "mdplook/onestep.hpp"
#include "mdplook/planners.hpp"
#include "support/gen.hpp"

using namespace mdplook;

namespace {

MdpF instance(int states, int actions, std::uint64_t seed) {
  Rng rng(seed);
  return testgen::random_mdp(rng, states, actions);
}

ScoreMatrix<double> scores(int states, int actions, std::uint64_t seed) {
  Rng rng(seed);
  ScoreMatrix<double> u(states, std::vector<double>(actions));
  for (auto& row : u)
    for (auto& x : row) x = rng.uniform(-1.0, 1.0);
  return u;
}

}  // namespace

static void BM_expected_max_sorted(benchmark::State& st) {
  const int S = static_cast<int>(st.range(0));
  const int A = static_cast<int>(st.range(1));
  const MdpF mdp = instance(S, A, 11);
  const auto u = scores(S, A, 12);
  for (auto _ : st) benchmark::DoNotOptimize(expected_max_sorted(mdp, 0, u));
}
BENCHMARK(BM_expected_max_sorted)
    ->Args({4, 2})
    ->Args({4, 6})
    ->Args({16, 2})
    ->Args({16, 6})
    ->Args({64, 2})
    ->Args({64, 6})
    ->Args({256, 6});

static void BM_expected_max_bruteforce(benchmark::State& st) {
  const int S = static_cast<int>(st.range(0));
  const int A = static_cast<int>(st.range(1));
  const MdpF mdp = instance(S, A, 11);
  const auto u = scores(S, A, 12);
  for (auto _ : st) benchmark::DoNotOptimize(expected_max_bruteforce(mdp, 0, u));
}
// S^A product states: keep the exponent where it finishes
BENCHMARK(BM_expected_max_bruteforce)
    ->Args({4, 2})
    ->Args({4, 6})
    ->Args({16, 2})
    ->Args({16, 4})
    ->Args({64, 2})
    ->Args({64, 3});

static void BM_event_probabilities(benchmark::State& st) {
  const int S = static_cast<int>(st.range(0));
  const int A = static_cast<int>(st.range(1));
  const MdpF mdp = instance(S, A, 11);
  const auto u = scores(S, A, 12);
  const OrderingList m = make_score_ordering(u, S, A);
  for (auto _ : st) benchmark::DoNotOptimize(event_probabilities(mdp, 0, m));
}
BENCHMARK(BM_event_probabilities)->Args({16, 4})->Args({64, 4})->Args({256, 4});

static void BM_onestep_vi(benchmark::State& st) {
  const int S = static_cast<int>(st.range(0));
  const MdpF mdp = instance(S, 3, 21);
  for (auto _ : st) benchmark::DoNotOptimize(solve_onestep_discounted(mdp, 0.9, 1e-8));
}
BENCHMARK(BM_onestep_vi)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

static void BM_onestep_cg(benchmark::State& st) {
  const int S = static_cast<int>(st.range(0));
  const MdpF mdp = instance(S, 3, 21);
  for (auto _ : st) benchmark::DoNotOptimize(solve_onestep_discounted_cg(mdp, 0.9));
}
// cut counts grow quickly with S; keep where a run stays interactive
BENCHMARK(BM_onestep_cg)->Arg(4)->Arg(8);

static void BM_onestep_average(benchmark::State& st) {
  const int S = static_cast<int>(st.range(0));
  const MdpF mdp = instance(S, 3, 21);
  for (auto _ : st) benchmark::DoNotOptimize(solve_onestep_average(mdp, 1e-8));
}
BENCHMARK(BM_onestep_average)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

static void BM_augment_build(benchmark::State& st) {
  const int depth = static_cast<int>(st.range(0));
  const MdpF mdp = instance(3, 2, 31);
  const std::vector<int> roots = {0};
  for (auto _ : st) {
    const auto aug = build_augmented_mdp(mdp, roots, depth);
    benchmark::DoNotOptimize(aug.mdp.num_states());
  }
}
// the dense augmented kernel is quadratic in the tuple count, so depth 3 on
// a full-support instance is already out of interactive reach
BENCHMARK(BM_augment_build)->Arg(1)->Arg(2);

static void BM_discounted_vi(benchmark::State& st) {
  const int S = static_cast<int>(st.range(0));
  const MdpF mdp = instance(S, 3, 41);
  for (auto _ : st) benchmark::DoNotOptimize(value_iteration_discounted(mdp, 0.9, 1e-8));
}
BENCHMARK(BM_discounted_vi)->Arg(16)->Arg(64)->Arg(256);

static void BM_average_halflazy(benchmark::State& st) {
  const int S = static_cast<int>(st.range(0));
  const MdpF mdp = instance(S, 3, 41);
  for (auto _ : st) benchmark::DoNotOptimize(average_reward_solve(mdp, 1e-8));
}
BENCHMARK(BM_average_halflazy)->Arg(16)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
