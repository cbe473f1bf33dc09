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

#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "irsnoma/baselines.hpp"
#include "irsnoma/driver.hpp"

using namespace irsnoma;

namespace {

SystemConfig single(int n) {
    SystemConfig cfg;
    cfg.num_antennas = 1;
    cfg.num_elements = n;
    cfg.noise_power = 0.1;
    cfg.sinr_min = {1.0, 1.0};
    cfg.p_max = 1.0;
    cfg.amp_efficiency = 1.0;
    cfg.p_dynamic = 0.0;
    cfg.p_static = 0.1;
    return cfg;
}

// Oracle EE of reference_instance(0) at 8 levels and a 200-point power grid,
// computed with the independent joint-grid oracle and frozen.
constexpr double kReferenceOracleEe = 7.32630262345;

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("scheme names round-trip") {
    for (Scheme s : {Scheme::proposed, Scheme::random_phase, Scheme::oma}) CHECK(parse_scheme(to_string(s)) == s);
    CHECK_THROWS_AS(parse_scheme("noma"), ConfigError);
}

TEST_CASE("random-phase scheme is deterministic and dominated by the proposed scheme") {
    int feasible = 0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const testing::SimInstance in = testing::sim_instance(seed);
        const BaselineResult a = random_phase_noma(in.cfg, in.r.channel, in.r.theta0);
        const BaselineResult b = random_phase_noma(in.cfg, in.r.channel, in.r.theta0);
        CHECK(a.ee == b.ee);
        if (!a.feasible) continue;
        ++feasible;
        Rng rng = randomization_stream(seed);
        const SolveReport rep = run(in.cfg, in.r.channel, in.r.theta0, rng);
        CHECK(rep.feasible());
        CHECK(a.ee <= rep.final.ee + 1e-6);
        CHECK(a.ee == doctest::Approx(rep.ee_trajectory.front()).epsilon(1e-12));
    }
    CHECK(feasible == 8);
    const testing::SimInstance in = testing::sim_instance(0);
    Rng r1(5), r2(5);
    CHECK(random_phase_noma(in.cfg, in.r.channel, r1).ee == random_phase_noma(in.cfg, in.r.channel, r2).ee);
}

TEST_CASE("phases are immaterial with one element and one antenna") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ReferenceInstance ref = reference_instance(seed);
        SystemConfig cfg = ref.cfg;
        cfg.num_elements = 1;
        ChannelSet ch;
        ch.G = ref.realization.channel.G.topRows(1);
        ch.h_r = {ref.realization.channel.h_r[0].head(1) * 3.0, ref.realization.channel.h_r[1].head(1) * 3.0};
        Rng t(seed);
        const PhaseState theta = default_theta0(1, t);
        const BaselineResult rp = random_phase_noma(cfg, ch, theta);
        Rng rng(seed);
        const SolveReport rep = run(cfg, ch, theta, rng);
        if (!rp.feasible) {
            CHECK_FALSE(rep.feasible());
            continue;
        }
        CHECK(rep.final.ee == doctest::Approx(rp.ee).epsilon(0.01));
    }
}

TEST_CASE("slot power search matches a grid") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        SystemConfig cfg = single(1);
        cfg.amp_efficiency = rng.uniform(0.3, 1.0);
        cfg.p_static = std::exp(rng.uniform(-6.0, 0.0));
        cfg.noise_power = std::exp(rng.uniform(-5.0, 0.0));
        const double gain = std::exp(rng.uniform(-3.0, 3.0));
        const double lo = rng.uniform(0.0, 0.2), hi = lo + rng.uniform(0.1, 2.0);
        const double p = best_slot_power(gain, lo, hi, cfg);
        CHECK(p >= lo);
        CHECK(p <= hi);
        const double ee = std::log2(1.0 + p * gain / cfg.noise_power) / (p / cfg.amp_efficiency + cfg.circuit_power());
        const double ref =
            oracle::slot_power_grid(gain, lo, hi, cfg.noise_power, cfg.amp_efficiency, cfg.circuit_power(), 10000);
        CHECK(ee >= ref * (1.0 - 1e-3));
        CHECK(ee <= ref * (1.0 + 1e-3));
    }
}

TEST_CASE("single-user relaxation") {
    Rng rng(3);
    const CVector a = CVector::Constant(1, cplx(0.3, -0.4));
    const PhaseState p = single_user_phase(a, rng);
    CHECK(p.size() == 1);
    CHECK(std::abs(std::abs(p.v()[0]) - 1.0) < 1e-12);
    CHECK(std::norm(sdr_vector(p).dot(a)) == doctest::Approx(0.25));

    for (int trial = 0; trial < 10; ++trial) {
        const CVector b = testing::random_cvector(6, rng);
        const PhaseState q = single_user_phase(b, rng);
        CHECK(std::abs(sdr_vector(q).dot(b)) == doctest::Approx(b.cwiseAbs().sum()).epsilon(1e-6));
    }
}

TEST_CASE("orthogonal slots") {
    SystemConfig cfg = single(1);
    cfg.sinr_min = {1.0, 0.0};
    ChannelSet ch;
    ch.G = CMatrix::Ones(1, 1);
    ch.h_r = {CVector::Constant(1, 2.0), CVector::Zero(1)};
    Rng rng(1);
    const BaselineResult r = oma_tdma(cfg, ch, rng);
    REQUIRE(r.feasible);
    const OmaSlot& s = r.slots[0];
    CHECK(s.gain == doctest::Approx(4.0));
    CHECK(s.rate == doctest::Approx(std::log2(1.0 + s.power * 4.0 / cfg.noise_power)));
    CHECK(r.slots[1].rate == 0.0);
    CHECK(r.slots[1].power == 0.0);
    CHECK(r.ee == doctest::Approx(0.5 * s.rate / (0.5 * s.power / cfg.amp_efficiency + cfg.circuit_power())));
    CHECK(r.rates.r1 == doctest::Approx(0.5 * s.rate));

    cfg.sinr_min = {1.0, 1.0};
    Rng rng2(1);
    const BaselineResult inf = oma_tdma(cfg, ch, rng2);
    CHECK_FALSE(inf.feasible);
    CHECK_FALSE(inf.message.empty());
}

TEST_CASE("orthogonal scheme is deterministic and feasible at simulation defaults") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const testing::SimInstance in = testing::sim_instance(seed);
        Rng a = baseline_stream(seed), b = baseline_stream(seed);
        const BaselineResult x = oma_tdma(in.cfg, in.r.channel, a), y = oma_tdma(in.cfg, in.r.channel, b);
        CHECK(x.ee == y.ee);
        REQUIRE(x.feasible);
        for (int k = 0; k < 2; ++k) {
            const OmaSlot& s = x.slots[k];
            CHECK(s.rate >= in.cfg.rate_min(k) - 1e-9);
            CHECK(s.power <= in.cfg.p_max * (1.0 + 1e-12));
            const CRowVector h = effective_channel(in.r.channel, s.phase, k);
            CHECK(std::norm((h * s.w).value()) == doctest::Approx(s.power * s.gain).epsilon(1e-9));
        }
    }
    SystemConfig cfg = testing::sim_instance(0).cfg;
    OmaSettings bad;
    bad.slot_fraction = {0.7, 0.7};
    Rng rng(1);
    CHECK_THROWS_AS(oma_tdma(cfg, testing::sim_instance(0).r.channel, rng, bad), ConfigError);
}

TEST_CASE("oracle limits and reductions") {
    SystemConfig cfg = single(1);
    cfg.sinr_min = {0.0, 0.0};
    ChannelSet ch;
    ch.G = CMatrix::Ones(1, 1);
    ch.h_r = {CVector::Ones(1), CVector::Constant(1, 0.5)};
    double prev = std::numeric_limits<double>::infinity();
    for (double pm : {1.0, 1e-2, 1e-4, 1e-6}) {
        cfg.p_max = pm;
        const double e = brute_force_oracle(cfg, ch, 1, 100);
        CHECK(e <= prev);
        prev = e;
    }
    CHECK(prev < 1e-3);

    cfg = single(1);
    const double e = brute_force_oracle(cfg, ch, 4, 400);
    const double ref = oracle::ee_power_grid(1.0, 0.25, cfg.noise_power, 1.0, 1.0, 1.0, 1.0, cfg.circuit_power(),
                                             1.0 / 400);
    CHECK(e == doctest::Approx(ref).epsilon(1e-9));

    cfg.sinr_min = {1e6, 1e6};
    CHECK(brute_force_oracle(cfg, ch, 2, 10) == -std::numeric_limits<double>::infinity());

    SystemConfig m2 = single(1);
    m2.num_antennas = 2;
    ChannelSet c2;
    c2.G = CMatrix::Ones(1, 2);
    c2.h_r = ch.h_r;
    CHECK_THROWS_AS(brute_force_oracle(m2, c2, 2, 10), DimensionError);
    CHECK_THROWS_AS(brute_force_oracle(single(1), ch, 9, 10), DimensionError);
}

TEST_CASE("oracle EE is nondecreasing under refinement") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const ReferenceInstance ref = reference_instance(seed);
        double prev = -std::numeric_limits<double>::infinity();
        for (int levels : {2, 4, 8}) {
            const double e = brute_force_oracle(ref.cfg, ref.realization.channel, levels, 100);
            CHECK(e >= prev);
            prev = e;
        }
        prev = -std::numeric_limits<double>::infinity();
        for (int grid : {50, 100, 200, 400}) {
            const double e = brute_force_oracle(ref.cfg, ref.realization.channel, 8, grid);
            CHECK(e >= prev);
            prev = e;
        }
    }
}

TEST_CASE("reference oracle fixture") {
    const ReferenceInstance ref = reference_instance(0);
    const Realization& r = ref.realization;
    const double lib = brute_force_oracle(ref.cfg, r.channel, 8, 200);
    const double ind = oracle::joint_grid(testing::rows_of(r.channel.G),
                                          {testing::to_std(r.channel.h_r[0]), testing::to_std(r.channel.h_r[1])},
                                          ref.cfg.noise_power, ref.cfg.sinr_min[0], ref.cfg.sinr_min[1], ref.cfg.p_max,
                                          ref.cfg.amp_efficiency, ref.cfg.circuit_power(), 8, 200);
    CHECK(lib == doctest::Approx(ind).epsilon(1e-12));
    CHECK(lib == doctest::Approx(kReferenceOracleEe).epsilon(1e-8));
}

}
