/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "peclsim/analog_model.hpp"
#include "peclsim/eye_analysis.hpp"
#include "peclsim/harness.hpp"
#include "peclsim/pattern_gen.hpp"
#include "peclsim/serializer.hpp"

#include <benchmark/benchmark.h>

using namespace peclsim;

namespace {

EdgeSequence prbs_edges(std::size_t n, double rate, double dj_pp) {
    const auto bits = prbs_generate(LfsrSpec::prbs7(), n, rate);
    return inject_jitter(place_edges(bits, EdgeProgram{}), JitterConfig{0.0, dj_pp, 1});
}

void BM_Prbs(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(prbs_generate(LfsrSpec::prbs7(), n, 5e9));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Prbs)->Arg(1 << 10)->Arg(1 << 16);

void BM_TwoStageMux(benchmark::State& state) {
    const auto bits = prbs_generate(LfsrSpec::prbs7(), static_cast<std::size_t>(state.range(0)), 5e9);
    for (auto _ : state)
        benchmark::DoNotOptimize(serialize_two_stage(split_two_stage(bits)));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TwoStageMux)->Arg(1 << 14);

void BM_Render(benchmark::State& state) {
    const auto edges = prbs_edges(static_cast<std::size_t>(state.range(0)), 5e9, 30.0);
    const LevelConfig lv;
    for (auto _ : state)
        benchmark::DoNotOptimize(render_waveform(edges, lv, 1.0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Render)->Arg(1 << 10)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

void BM_FoldEye(benchmark::State& state) {
    const auto w = render_waveform(prbs_edges(static_cast<std::size_t>(state.range(0)), 5e9, 30.0), LevelConfig{}, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(fold_eye(w, 200.0, 2000.0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FoldEye)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

void BM_EyeMetrics(benchmark::State& state) {
    const auto w = render_waveform(prbs_edges(static_cast<std::size_t>(state.range(0)), 5e9, 30.0), LevelConfig{}, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(compute_eye_metrics(w, 200.0));
}
BENCHMARK(BM_EyeMetrics)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

void BM_Loopback(benchmark::State& state) {
    ScenarioConfig cfg;
    cfg.n_bits = static_cast<std::size_t>(state.range(0));
    cfg.jitter.dj_pp = 50.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_loopback(cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Loopback)->Arg(1 << 12)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
