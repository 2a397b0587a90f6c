#include <benchmark/benchmark.h>

#include <numeric>
#include <optional>

#include "trailnet/fixed_point.hpp"
#include "trailnet/oracle.hpp"
#include "trailnet/stability.hpp"

using namespace trailnet;

namespace {

// First generated instance with exactly `contracts` contracts, else the largest seen.
GeneratedInstance instance(const std::string& profile, std::size_t contracts) {
  GeneratorLimits lim;
  lim.max_agents = contracts / 2 + 2;
  lim.max_contracts = contracts;
  std::optional<GeneratedInstance> best;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    auto g = generate_instance(seed, profile, lim);
    const std::size_t n = g.market.network().contract_count();
    if (n == contracts) return g;
    if (!best || n > best->market.network().contract_count()) best = std::move(g);
  }
  return std::move(*best);
}

// A chain of n contracts between alternating agents, all unit demand.
Market long_line(std::size_t n) {
  NetworkDescription d;
  for (std::size_t i = 0; i <= n; ++i) d.agents.push_back("a" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i)
    d.contracts.push_back({"x" + std::to_string(i), d.agents[i], d.agents[i + 1], {}, {}});
  std::vector<ChoiceSpec> specs;
  for (std::size_t i = 0; i <= n; ++i) {
    std::vector<ContractId> up, down;
    if (i > 0) up.push_back("x" + std::to_string(i - 1));
    if (i < n) down.push_back("x" + std::to_string(i));
    specs.push_back(SeparableIntensitySpec{up, down});
  }
  return Market::from_specs(validate_network(d), std::move(specs));
}

}  // namespace

static void BM_PhiIterate(benchmark::State& state) {
  const Market m = long_line(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(buyer_optimal(m).outcome);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PhiIterate)->RangeMultiplier(2)->Range(4, 64)->Complexity();

static void BM_EnumerateFixedPoints(benchmark::State& state) {
  const auto inst = instance("ladlas", static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_fixed_points(inst.market).size());
  state.counters["contracts"] = static_cast<double>(inst.market.network().contract_count());
}
BENCHMARK(BM_EnumerateFixedPoints)->DenseRange(6, 12, 2);

static void BM_FindBlockingSet(benchmark::State& state) {
  const auto inst = instance("fsirc", static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(find_blocking_set(inst.market, {}).stable);
  state.counters["contracts"] = static_cast<double>(inst.market.network().contract_count());
}
BENCHMARK(BM_FindBlockingSet)->DenseRange(6, 14, 4);

static void BM_FindBlockingTrail(benchmark::State& state) {
  const auto inst = instance("fsirc", static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(find_blocking_trail(inst.market, {}).stable);
  state.counters["contracts"] = static_cast<double>(inst.market.network().contract_count());
}
BENCHMARK(BM_FindBlockingTrail)->DenseRange(6, 14, 4);

static void BM_BruteForceSet(benchmark::State& state) {
  const auto inst = instance("fsirc", static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_stable(inst.market, Notion::set).size());
  state.counters["contracts"] = static_cast<double>(inst.market.network().contract_count());
}
BENCHMARK(BM_BruteForceSet)->DenseRange(4, 8, 2);

static void BM_PartitionReduction(benchmark::State& state) {
  std::vector<long long> w(static_cast<std::size_t>(state.range(0)));
  std::iota(w.begin(), w.end(), 1);
  const Market m = partition_to_gs(w);
  for (auto _ : state) benchmark::DoNotOptimize(find_blocking_set(m, {}).stable);
}
BENCHMARK(BM_PartitionReduction)->DenseRange(4, 12, 4);

static void BM_NeedleProbe(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(probe_needle(n, std::nullopt).evaluations);
}
BENCHMARK(BM_NeedleProbe)->DenseRange(2, 6, 2);

BENCHMARK_MAIN();
