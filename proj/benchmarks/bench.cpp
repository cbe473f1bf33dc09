// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <benchmark/benchmark.h>

#include "irsnoma/beamforming.hpp"
#include "irsnoma/driver.hpp"
#include "irsnoma/experiments.hpp"
#include "irsnoma/phase.hpp"

namespace {

using namespace irsnoma;

struct Instance {
    SystemConfig cfg;
    Realization r;
    ChannelSet ordered;
    CRowVector h1, h2;
};

Instance make(int m, int n, std::uint64_t seed) {
    ExperimentSpec spec = ExperimentSpec::defaults();
    Instance in;
    in.cfg = spec.system;
    in.cfg.num_antennas = m;
    in.cfg.num_elements = n;
    in.r = make_realization(in.cfg, spec.channel, seed);
    in.ordered = in.r.channel.reordered(order_users(in.r.channel, in.r.theta0));
    in.h1 = effective_channel(in.ordered, in.r.theta0, 0);
    in.h2 = effective_channel(in.ordered, in.r.theta0, 1);
    return in;
}

void BM_ScaSubproblem(benchmark::State& state) {
    const Instance in = make(static_cast<int>(state.range(0)), 20, 1);
    const BeamformingState w0 = init_feasible(in.h1, in.h2, in.cfg);
    const ScaPoint point{init_slacks(w0, in.h1, in.h2, in.cfg), w0};
    for (auto _ : state) {
        const Subproblem sp = build_subproblem(point, in.h1, in.h2, in.cfg);
        benchmark::DoNotOptimize(solve(sp.program));
    }
}
BENCHMARK(BM_ScaSubproblem)->Arg(4)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_ScaLoop(benchmark::State& state) {
    const Instance in = make(4, 20, 1);
    for (auto _ : state) benchmark::DoNotOptimize(solve_sca(in.h1, in.h2, in.cfg));
}
BENCHMARK(BM_ScaLoop)->Unit(benchmark::kMillisecond);

void BM_PhaseRelaxation(benchmark::State& state) {
    const Instance in = make(4, static_cast<int>(state.range(0)), 1);
    const ScaResult sca = solve_sca(in.h1, in.h2, in.cfg);
    const AMatrixSet aset = build_a(in.ordered, sca.state);
    for (auto _ : state) benchmark::DoNotOptimize(solve_sdr(aset, in.cfg));
}
BENCHMARK(BM_PhaseRelaxation)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Randomization(benchmark::State& state) {
    const Instance in = make(4, 20, 1);
    const ScaResult sca = solve_sca(in.h1, in.h2, in.cfg);
    const AMatrixSet aset = build_a(in.ordered, sca.state);
    const CMatrix V = CMatrix::Identity(20, 20);
    SystemConfig open = in.cfg;
    open.sinr_min = {0.0, 0.0};
    RandomizationSettings rs;
    rs.patience = rs.candidates;
    for (auto _ : state) {
        Rng rng(7);
        benchmark::DoNotOptimize(recover_rank_one(V, aset, open, rng, rs));
    }
}
BENCHMARK(BM_Randomization)->Unit(benchmark::kMillisecond);

void BM_FullRun(benchmark::State& state) {
    const Instance in = make(4, static_cast<int>(state.range(0)), 1);
    for (auto _ : state) {
        Rng rng = randomization_stream(1);
        benchmark::DoNotOptimize(run(in.cfg, in.r.channel, in.r.theta0, rng));
    }
}
BENCHMARK(BM_FullRun)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
