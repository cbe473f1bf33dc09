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

#include "irsnoma/driver.hpp"

#include <chrono>
#include <numbers>
#include <ostream>

namespace irsnoma {

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::converged: return "converged";
        case RunStatus::sdr_infeasible_stop: return "sdr_infeasible_stop";
        case RunStatus::max_iters: return "max_iters";
        case RunStatus::init_infeasible: return "init_infeasible";
    }
    return "unknown";
}

double SolveReport::rank_one_fraction() const {
    return sdr_solves > 0 ? static_cast<double>(rank_one_solves) / sdr_solves : 0.0;
}

PhaseState default_theta0(int n, Rng& rng) {
    RVector theta(n);
    for (int i = 0; i < n; ++i) theta[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return PhaseState::from_angles(theta);
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void log_record(std::ostream* os, const OuterRecord& r) {
    if (!os) return;
    auto old = os->precision(9);
    *os << "irsnoma.driver l=" << r.iteration << " ee=" << r.ee << " inner=" << r.inner_iters
        << " sca=" << to_string(r.sca_status);
    if (r.has_phase_step)
        *os << " rank_one=" << r.rank_one << " eig_ratio=" << r.eig_ratio << " randomized=" << r.randomized
            << " order_premise=" << r.order_premise << " accepted=" << r.accepted;
    *os << '\n';
    os->precision(old);
}

void log_event(std::ostream* os, int l, const std::string& what) {
    if (os) *os << "irsnoma.driver l=" << l << " event=" << what << '\n';
}

}  // namespace

SolveReport run(const SystemConfig& cfg, const ChannelSet& channel, const PhaseState& theta0, Rng& rng,
                const DriverSettings& settings) {
    cfg.validate();
    channel.validate(cfg);
    if (theta0.size() != cfg.num_elements) throw DimensionError("theta0 length does not match num_elements");
    const auto start = Clock::now();

    SolveReport rep;
    rep.order = order_users(channel, theta0, cfg.ordering_norm);
    const ChannelSet ch = channel.reordered(rep.order);
    PhaseState phase = theta0;

    auto finish = [&](RunStatus s) {
        rep.status = s;
        rep.phase = phase;
        if (s != RunStatus::init_infeasible) rep.final = evaluate(ch, phase.v(), rep.w, cfg);
        rep.timings.total = since(start);
        return rep;
    };

    ScaResult sca;
    {
        const auto t0 = Clock::now();
        try {
            sca = solve_sca(effective_channel(ch, phase, 0), effective_channel(ch, phase, 1), cfg, std::nullopt,
                            settings.sca);
        } catch (const InfeasibleRealization& e) {
            rep.message = e.what();
            rep.timings.sca += since(t0);
            log_event(settings.log, 1, "init_infeasible");
            return finish(RunStatus::init_infeasible);
        }
        rep.timings.sca += since(t0);
    }
    rep.w = sca.state;
    double ee = evaluate(ch, phase.v(), rep.w, cfg).ee;
    {
        OuterRecord r;
        r.iteration = 1;
        r.ee = ee;
        r.inner_iters = sca.iterations;
        r.sca_status = sca.status;
        r.sca_rejected = sca.rejected;
        r.t_trajectory = sca.t_trajectory;
        rep.records.push_back(r);
        rep.ee_trajectory.push_back(ee);
        rep.inner_iters.push_back(sca.iterations);
        log_record(settings.log, r);
    }

    for (int l = 2; l <= cfg.max_outer_iters; ++l) {
        OuterRecord r;
        r.iteration = l;
        r.has_phase_step = true;
        PhaseResult pr;
        {
            const auto t0 = Clock::now();
            try {
                pr = solve_phase(ch, rep.w, cfg, rng, settings.phase);
            } catch (const SdrInfeasible& e) {
                rep.timings.sdr += since(t0);
                rep.message = e.what();
                log_event(settings.log, l, "sdr_infeasible");
                return finish(RunStatus::sdr_infeasible_stop);
            }
            rep.timings.sdr += since(t0);
        }
        ++rep.sdr_solves;
        if (pr.rank_one) ++rep.rank_one_solves;
        r.rank_one = pr.rank_one;
        r.randomized = pr.randomized;
        r.eig_ratio = pr.eig_ratio;
        r.z2 = pr.z2;
        r.z2_achieved = pr.z2_achieved;
        r.k1_slack = pr.k1_slack;
        r.order_premise = pr.order_premise;
        if (!pr.order_premise) {
            ++rep.order_premise_violations;
            log_event(settings.log, l, "order_premise_violated");
        }
        r.phase_qos_ok = check_solution(rep.w, pr.phase.v(), cfg, ch).qos_ok;

        const CRowVector h1 = effective_channel(ch, pr.phase, 0);
        const CRowVector h2 = effective_channel(ch, pr.phase, 1);
        ScaResult next;
        bool solved = true;
        {
            const auto t0 = Clock::now();
            try {
                next = solve_sca(h1, h2, cfg, rep.w, settings.sca);
            } catch (const std::exception& e) {
                solved = false;
                rep.message = e.what();
            }
            rep.timings.sca += since(t0);
        }
        double ee_new = 0.0;
        bool feasible = false;
        if (solved) {
            r.inner_iters = next.iterations;
            r.sca_status = next.status;
            r.sca_rejected = next.rejected;
            r.t_trajectory = next.t_trajectory;
            const FeasibilityReport fr = check_solution(next.state, pr.phase.v(), cfg, ch);
            ee_new = fr.eval.ee;
            feasible = fr.ok();
        }
        r.ee = ee_new;
        r.accepted = solved && feasible && ee_new >= ee * (1.0 - settings.guard_tol);
        rep.records.push_back(r);
        log_record(settings.log, r);
        if (!r.accepted) {
            ++rep.guard_rejections;
            log_event(settings.log, l, "phase_update_rejected");
            return finish(RunStatus::converged);
        }

        phase = pr.phase;
        rep.w = next.state;
        rep.ee_trajectory.push_back(ee_new);
        rep.inner_iters.push_back(next.iterations);
        const double prev = ee;
        ee = ee_new;
        if (ee - prev < cfg.outer_tol * std::abs(prev)) return finish(RunStatus::converged);
    }
    return finish(RunStatus::max_iters);
}

}  // namespace irsnoma
