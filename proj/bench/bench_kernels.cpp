// Copyright 2026 The catbij Authors.
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

#include <benchmark/benchmark.h>

#include <random>

#include "catbij/analysis.hpp"
#include "catbij/native_executor.hpp"
#include "catbij/problem.hpp"

using namespace catbij;

namespace {

ExecutionRequest bjs_request(int n) {
    ExecutionRequest r;
    r.source = "# kernel: bjs\ndef bijection(path):\n    return path\n";
    r.inputs = find_problem("dyck_to_av321").domain_at(n);
    return r;
}

Matrix random_rows(std::size_t m, std::size_t d) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    Matrix rows(m, std::vector<double>(d));
    for (auto& r : rows)
        for (double& x : r) x = u(rng);
    return rows;
}

void BM_ExecuteSerial(benchmark::State& state) {
    NativeExecutor exec;
    const auto req = bjs_request(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(exec.execute_serial(req));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * req.inputs.size()));
}

void BM_ExecuteParallel(benchmark::State& state) {
    NativeExecutor exec;
    const auto req = bjs_request(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(exec.execute_parallel(req));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * req.inputs.size()));
}

void BM_CovarianceSerial(benchmark::State& state) {
    const auto rows = random_rows(static_cast<std::size_t>(state.range(0)), 512);
    for (auto _ : state) benchmark::DoNotOptimize(covariance_serial(rows));
}

void BM_CovarianceParallel(benchmark::State& state) {
    const auto rows = random_rows(static_cast<std::size_t>(state.range(0)), 512);
    for (auto _ : state) benchmark::DoNotOptimize(covariance_parallel(rows));
}

}  // namespace

BENCHMARK(BM_ExecuteSerial)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExecuteParallel)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CovarianceSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CovarianceParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
