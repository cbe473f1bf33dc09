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

#ifndef IRSNOMA_BASELINES_HPP
#define IRSNOMA_BASELINES_HPP

#include <array>
#include <optional>
#include <string>

#include "irsnoma/beamforming.hpp"
#include "irsnoma/model.hpp"
#include "irsnoma/phase.hpp"
#include "irsnoma/rng.hpp"

/// Comparison schemes: NOMA with random reflection phases, IRS-aided
/// orthogonal access by time division, and an exhaustive single-antenna oracle.
namespace irsnoma {

enum class Scheme { proposed, random_phase, oma };

std::string to_string(Scheme s);
/// Throws ConfigError on an unknown name.
Scheme parse_scheme(const std::string& name);

/// One time slot of the orthogonal scheme, serving one user alone.
struct OmaSlot {
    bool feasible = false;
    PhaseState phase;
    CVector w;
    double gain = 0.0;   // |h^H Theta G w / ||w|| |^2
    double power = 0.0;  // W
    double rate = 0.0;   // bits/s/Hz within the slot
    double slot_ee = 0.0;
};

struct BaselineResult {
    Scheme scheme = Scheme::random_phase;
    bool feasible = false;
    std::string message;
    double ee = 0.0;
    Rates rates;         // time-averaged for the orthogonal scheme
    double power = 0.0;  // time-averaged transmit power, W
    int inner_iters = 0;
    PhaseState phase;                       // random-phase scheme
    BeamformingState w;                     // random-phase scheme, in decoding order
    std::array<OmaSlot, 2> slots;           // orthogonal scheme, input labels
};

/// Draws theta uniformly once and optimizes only the beamformers.
BaselineResult random_phase_noma(const SystemConfig& cfg, const ChannelSet& channel, Rng& rng,
                                 const ScaSettings& settings = {});
BaselineResult random_phase_noma(const SystemConfig& cfg, const ChannelSet& channel, const PhaseState& theta,
                                 const ScaSettings& settings = {});

struct OmaSettings {
    std::array<double, 2> slot_fraction{0.5, 0.5};
    int alternations = 10;
    double alternation_tol = 1e-6;
    double search_tol = 1e-10;  // relative width of the final power bracket
    SolverSettings solver;
    RandomizationSettings randomization;
};

/// Maximizes R / (p / eta + P_c) over p in [p_lo, p_hi] for R = log2(1 + p g / sigma^2)
/// by golden-section search; the objective is quasi-concave in p.
double best_slot_power(double gain, double p_lo, double p_hi, const SystemConfig& cfg, double rel_tol = 1e-10);

/// Single-user relaxation max |u^H a|^2 over diag(V) = 1, V >= 0, with rank-one recovery.
PhaseState single_user_phase(const CVector& a, Rng& rng, const OmaSettings& settings = {});

/// Equal-time TDMA: in slot k only user k is served, with phases from the
/// single-user relaxation alternated with the matched filter, and the slot
/// power maximizing the slot energy efficiency subject to R_k >= R_k,min.
/// EE = sum_k tau_k R_k / ((1 / eta) sum_k tau_k p_k + P_c).
BaselineResult oma_tdma(const SystemConfig& cfg, const ChannelSet& channel, Rng& rng,
                        const OmaSettings& settings = {});

/// Exhaustive search for M = 1 over phase_levels^N quantized phases and the
/// power grid p_k = i_k P_max / power_grid with p_1 + p_2 <= P_max. Users are
/// ordered under each phase candidate. Returns the best QoS-feasible EE, or
/// -infinity. Throws DimensionError unless M = 1, N <= 3, phase_levels <= 8.
double brute_force_oracle(const SystemConfig& cfg, const ChannelSet& channel, int phase_levels, int power_grid);

}  // namespace irsnoma

#endif  // IRSNOMA_BASELINES_HPP
