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

#ifndef IRSNOMA_DRIVER_HPP
#define IRSNOMA_DRIVER_HPP

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "irsnoma/beamforming.hpp"
#include "irsnoma/model.hpp"
#include "irsnoma/phase.hpp"
#include "irsnoma/rng.hpp"

/// Alternating optimization: SCA beamforming for fixed phases, then SDR
/// phases for fixed beamformers, until the energy efficiency stalls or the
/// phase relaxation becomes infeasible.
namespace irsnoma {

enum class RunStatus { converged, sdr_infeasible_stop, max_iters, init_infeasible };

std::string to_string(RunStatus s);

/// One phase step followed by one beamforming step.
struct OuterRecord {
    int iteration = 0;
    double ee = 0.0;             // after the beamforming step (candidate value when rejected)
    int inner_iters = 0;
    ScaStatus sca_status = ScaStatus::converged;
    int sca_rejected = 0;
    std::vector<double> t_trajectory;
    bool has_phase_step = false;
    bool rank_one = false;
    bool randomized = false;
    double eig_ratio = 0.0;
    double z2 = 0.0;
    double z2_achieved = 0.0;
    bool phase_qos_ok = true;  // recovered phases meet the QoS targets for the previous w
    bool order_premise = true;
    bool k1_slack = false;
    bool accepted = true;
};

struct Timings {
    double total = 0.0;
    double sca = 0.0;
    double sdr = 0.0;
};

struct SolveReport {
    RunStatus status = RunStatus::converged;
    std::string message;
    std::array<int, 2> order{0, 1};  // order[0] is the strong user, in input labels
    std::vector<double> ee_trajectory;
    std::vector<int> inner_iters;
    std::vector<OuterRecord> records;
    BeamformingState w;  // in decoding order
    PhaseState phase;
    Evaluation final;
    int sdr_solves = 0;
    int rank_one_solves = 0;
    int guard_rejections = 0;
    int order_premise_violations = 0;
    Timings timings;

    int outer_iters() const { return static_cast<int>(ee_trajectory.size()); }
    double rank_one_fraction() const;
    bool feasible() const { return status != RunStatus::init_infeasible; }
};

struct DriverSettings {
    ScaSettings sca;
    PhaseSettings phase;
    /// Relative EE drop above which a phase update is rejected.
    double guard_tol = 1e-6;
    /// Structured per-iteration log lines, or nullptr.
    std::ostream* log = nullptr;
};

/// theta_n uniform on [0, 2 pi).
PhaseState default_theta0(int n, Rng& rng);

/// Runs the alternating optimization from theta0. The decoding order is
/// fixed by order_users under theta0; `channel` is in input labels and
/// the report's w is in decoding order.
SolveReport run(const SystemConfig& cfg, const ChannelSet& channel, const PhaseState& theta0, Rng& rng,
                const DriverSettings& settings = {});

}  // namespace irsnoma

#endif  // IRSNOMA_DRIVER_HPP
