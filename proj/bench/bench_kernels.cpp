// Copyright 2026 The mtd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference vs OpenMP kernels on the generated example system.
// Results only differ when more than one core is available.

#include <benchmark/benchmark.h>

#include "mtd/scenario.hpp"

using namespace mtd;

namespace {

struct Fixture {
  ResolvedSystem sys = resolve_system(ScenarioConfig{});
  std::vector<SensorDecomposition> decomps = decompose_all(sys.targets, sys.noise);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::Serial : Exec::Parallel;
}

void BM_BankUpdate(benchmark::State& state) {
  const Fixture& f = fixture();
  FilterBank bank(f.sys.noise, f.decomps, Vector::Zero(f.sys.targets.n()));
  RandomStream noise(1);
  const Exec exec = exec_of(state);
  for (auto _ : state) {
    bank.update(0, noise.normal_vector(f.sys.targets.m()), exec);
    bank.predict(noise.normal_vector(f.sys.targets.n()));
  }
}
BENCHMARK(BM_BankUpdate)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_Fuse(benchmark::State& state) {
  const Fixture& f = fixture();
  FilterBank bank(f.sys.noise, f.decomps, Vector::Zero(f.sys.targets.n()));
  RandomStream noise(1);
  for (int k = 0; k < 20; ++k) {
    bank.update(0, noise.normal_vector(f.sys.targets.m()));
    bank.predict();
  }
  bank.update(0, noise.normal_vector(f.sys.targets.m()));
  const FusionModel fusion(f.decomps, bank.active_sensors(), 1e-6);
  RandomStream eta(2);
  const Exec exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(fusion.fuse(bank, eta, exec));
}
BENCHMARK(BM_Fuse)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_MonteCarlo(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.horizon = 60;
  const Exec exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo(cfg, 4, exec, false));
}
BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
