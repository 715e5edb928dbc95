// Serial against OpenMP variants of the hot kernels.

#include "threatnet/absorbing_chain.hpp"
#include "threatnet/generators.hpp"
#include "threatnet/harmonic.hpp"
#include "threatnet/kernels.hpp"
#include "threatnet/priors.hpp"
#include "threatnet/spacetime.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <random>

using namespace threatnet;

namespace {

// Connected sparse graph with mean degree about 8.
Graph ring_with_chords(std::size_t n) {
  std::mt19937_64 re(1);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<EdgeRecord> rows;
  for (std::size_t i = 0; i < n; ++i) rows.push_back({i, (i + 1) % n, 1.0, {}, {}});
  for (std::size_t k = 0; k < 3 * n; ++k) {
    const std::size_t a = pick(re);
    const std::size_t b = pick(re);
    if (a != b) rows.push_back({a, b, 1.0, {}, {}});
  }
  return build_graph(n, rows);
}

struct Setup {
  Graph graph;
  std::vector<double> psi;
  SparseMatrix p;
  ObservationSet obs = ObservationSet::single(0, 1.0);

  explicit Setup(std::size_t n) : graph(ring_with_chords(n)) {
    psi = compute_prior(graph, {PriorKind::dwtp}, obs).psi;
    p = propagation_matrix(graph, psi);
  }
};

const Setup& setup(std::size_t n) {
  static std::map<std::size_t, Setup> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Setup(n)).first;
  return it->second;
}

template <bool Parallel>
void BM_Sweep(benchmark::State& state) {
  const auto& s = setup(static_cast<std::size_t>(state.range(0)));
  const auto v = kernels::view(s.p);
  std::vector<double> b(s.graph.order(), 0.0);
  std::vector<double> x(s.graph.order(), 0.5);
  std::vector<double> y(s.graph.order());
  for (auto _ : state) {
    const double d = Parallel ? kernels::fixed_point_sweep_parallel(v, b, x, y)
                              : kernels::fixed_point_sweep_serial(v, b, x, y);
    benchmark::DoNotOptimize(d);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.p.nonZeros()));
}

template <bool Parallel>
void BM_PathLengths(benchmark::State& state) {
  const auto& s = setup(static_cast<std::size_t>(state.range(0)));
  const auto v = kernels::view(s.graph.adjacency());
  for (auto _ : state) {
    const auto r = Parallel ? kernels::path_length_sums_parallel(v) : kernels::path_length_sums_serial(v);
    benchmark::DoNotOptimize(r.total);
  }
}

template <bool Parallel>
void BM_Walks(benchmark::State& state) {
  const auto& s = setup(static_cast<std::size_t>(state.range(0)));
  const auto table = build_absorbing_chain(s.graph, s.psi, s.obs).walk_table();
  const std::vector<double> values{1.0, 0.0};
  for (auto _ : state) {
    const auto r = Parallel ? kernels::random_walks_parallel(table, values, 100, 3, 1000000)
                            : kernels::random_walks_serial(table, values, 100, 3, 1000000);
    benchmark::DoNotOptimize(r.mean.data());
  }
}

template <bool Parallel>
void BM_SpaceTimeAssembly(benchmark::State& state) {
  const auto net = generate_sbm(sbm_reference(2.0), 1);
  const double rate = default_rate(net.graph);
  const TimeGrid grid = make_grid(0.0, 1.0, 0.01);
  SpaceTimeOptions o;
  o.parallel = Parallel;
  for (auto _ : state) {
    const auto sys = assemble_spacetime(net.graph, grid, std::vector<double>{rate}, o);
    benchmark::DoNotOptimize(sys.adjacency.nonZeros());
  }
}

}  // namespace

BENCHMARK(BM_Sweep<false>)->Arg(10000)->Arg(100000);
BENCHMARK(BM_Sweep<true>)->Arg(10000)->Arg(100000);
BENCHMARK(BM_PathLengths<false>)->Arg(2000);
BENCHMARK(BM_PathLengths<true>)->Arg(2000);
BENCHMARK(BM_Walks<false>)->Arg(2000);
BENCHMARK(BM_Walks<true>)->Arg(2000);
BENCHMARK(BM_SpaceTimeAssembly<false>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpaceTimeAssembly<true>)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
