#include <benchmark/benchmark.h>

#include <numbers>
#include <vector>

#include "chiralchain/dynamics.hpp"
#include "chiralchain/geometry.hpp"
#include "chiralchain/hamiltonian.hpp"
#include "chiralchain/observables.hpp"

namespace {

constexpr double pi = std::numbers::pi;

chiralchain::LatticeGeometry trap_lattice() {
  return chiralchain::build_lattice({{29, pi / 2}, {40, pi}, {30, pi / 2}});
}

void BM_BuildSingle(benchmark::State& state) {
  const auto lattice = trap_lattice();
  const auto coupling = chiralchain::CouplingParams::from_directionality(0.2);
  for (auto _ : state) {
    auto h = chiralchain::build_single(lattice, coupling);
    benchmark::DoNotOptimize(h.matrix);
  }
}
BENCHMARK(BM_BuildSingle);

void BM_EvolveHundredAtoms(benchmark::State& state) {
  const auto lattice = trap_lattice();
  const auto coupling = chiralchain::CouplingParams::from_directionality(0.2);
  const auto single = chiralchain::build_single(lattice, coupling);
  const auto a0 = chiralchain::single_site_state(lattice.size(), 50);
  std::vector<double> times;
  for (int k = 0; k <= 200; ++k) times.push_back(static_cast<double>(k) * 0.5);
  for (auto _ : state) {
    auto trace = chiralchain::evolve(single.matrix, a0, times);
    benchmark::DoNotOptimize(trace.amplitudes);
  }
}
BENCHMARK(BM_EvolveHundredAtoms);

void BM_SteadyState(benchmark::State& state) {
  const auto lattice = chiralchain::build_lattice({{11, pi / 3}, {12, pi / 5}});
  const auto coupling = chiralchain::CouplingParams::from_directionality(0.5);
  const auto single = chiralchain::build_single(lattice, coupling);
  const auto drive = chiralchain::uniform_drive(lattice.size());
  for (auto _ : state) {
    auto a = chiralchain::steady_state(single.matrix, drive);
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_SteadyState);

void BM_BuildDoublyExcited(benchmark::State& state) {
  const auto lattice = chiralchain::build_lattice({{14, pi / 2}, {15, pi}});
  const auto coupling = chiralchain::CouplingParams::from_directionality(0.5);
  const auto single = chiralchain::build_single(lattice, coupling);
  for (auto _ : state) {
    chiralchain::FockBasis basis(lattice.size(), 2);
    auto lifted = chiralchain::build_multi(single, basis);
    benchmark::DoNotOptimize(lifted);
  }
}
BENCHMARK(BM_BuildDoublyExcited);

void BM_SitePopulations(benchmark::State& state) {
  const auto lattice = trap_lattice();
  const auto coupling = chiralchain::CouplingParams::from_directionality(0.2);
  const auto single = chiralchain::build_single(lattice, coupling);
  const auto a0 = chiralchain::single_site_state(lattice.size(), 50);
  std::vector<double> times;
  for (int k = 0; k <= 3000; ++k) times.push_back(static_cast<double>(k) * 0.5);
  const auto trace = chiralchain::evolve(single.matrix, a0, times);
  for (auto _ : state) {
    auto pops = chiralchain::site_populations(trace);
    benchmark::DoNotOptimize(pops);
  }
}
BENCHMARK(BM_SitePopulations);

}  // namespace

BENCHMARK_MAIN();
