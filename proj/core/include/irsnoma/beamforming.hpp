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

#ifndef IRSNOMA_BEAMFORMING_HPP
#define IRSNOMA_BEAMFORMING_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "irsnoma/conic.hpp"
#include "irsnoma/model.hpp"

/// Transmit beamforming for fixed effective channels: a minimum-power
/// feasibility start followed by successive convex approximation of the
/// energy-efficiency epigraph problem.
///
/// Subproblems are posed in normalized units: w / sqrt(P_max), h sqrt(P_max) / sigma,
/// beta / sigma^2, rho / P_max and t P_max, so that noise and budget are both 1.
namespace irsnoma {

class InfeasibleRealization : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Expansion point of one SCA step.
struct ScaPoint {
    SlackIterate slack;
    BeamformingState w;
};

/// Smallest gamma used when forming Taylor coefficients.
inline constexpr double kGammaFloor = 1.0 + 1e-6;

/// First-order expansion of sqrt((gamma - 1) beta) about (gamma0, beta0),
/// after clamping gamma0 to kGammaFloor and beta0 to a positive value.
struct TaylorSqrt {
    double value0 = 0.0;   // sqrt((gamma0 - 1) beta0)
    double d_gamma = 0.0;  // 0.5 sqrt(beta0 / (gamma0 - 1))
    double d_beta = 0.0;   // 0.5 sqrt((gamma0 - 1) / beta0)
    double gamma0 = 0.0;
    double beta0 = 0.0;

    static TaylorSqrt at(double gamma0, double beta0);
    double operator()(double gamma, double beta) const {
        return value0 + d_gamma * (gamma - gamma0) + d_beta * (beta - beta0);
    }
};

double taylor_sqrt(double gamma, double beta, double gamma0, double beta0);
/// Expansion for pair kSinrPairs[pair] about `point`.
double taylor_sqrt(double gamma, double beta, const ScaPoint& point, int pair);
/// t0 rho0 + rho0 (t - t0) + t0 (rho - rho0).
double taylor_bilinear(double t, double rho, double t0, double rho0);
double taylor_bilinear(double t, double rho, const ScaPoint& point);

struct InitSettings {
    SolverSettings solver;
};

/// Minimum-power beamformers meeting both QoS targets with
/// Re(h_i w_k) >= 0 and Im(h_i w_k) = 0 for the three decoding pairs.
/// Throws InfeasibleRealization when the targets need more than P_max.
BeamformingState init_feasible(const CRowVector& h1, const CRowVector& h2, const SystemConfig& cfg,
                               const InitSettings& settings = {});

/// Slacks at equality for a feasible w0; t0 = sum_k log2(gamma_k) / rho0.
SlackIterate init_slacks(const BeamformingState& w0, const CRowVector& h1, const CRowVector& h2,
                         const SystemConfig& cfg);

/// Variable indices of a subproblem built by build_subproblem.
struct ScaLayout {
    ComplexVar w1, w2;
    int t = -1, rho = -1;
    int gamma[2] = {-1, -1};
    int delta[2] = {-1, -1};
    int beta[2] = {-1, -1};  // pairs (0,1) and (1,1); the (0,0) term is the noise power
};

struct Subproblem {
    ConicProgram program;
    ScaLayout layout;
};

Subproblem build_subproblem(const ScaPoint& point, const CRowVector& h1, const CRowVector& h2,
                            const SystemConfig& cfg);

/// Decodes an optimal subproblem solution into physical units.
ScaPoint decode_subproblem(const RVector& x, const ScaLayout& layout, const SystemConfig& cfg);

/// Largest normalized violation of the exact (non-linearized) constraints
/// other than the t rho <= sum delta coupling; 0 when all hold.
double exact_violation(const ScaPoint& point, const CRowVector& h1, const CRowVector& h2,
                       const SystemConfig& cfg);

/// Rotates w_1 so h1 w1 is real nonnegative and w_2 so h2 w2 is.
BeamformingState align_phases(const BeamformingState& w, const CRowVector& h1, const CRowVector& h2);

enum class ScaStatus { converged, max_iters, rejected_step, solver_failure };

std::string to_string(ScaStatus s);

struct ScaResult {
    BeamformingState state;  // carries the final slack iterate
    std::vector<double> t_trajectory;
    std::vector<double> surrogate_gap;  // |t rho - sum delta| per accepted iterate
    ScaStatus status = ScaStatus::converged;
    int iterations = 0;      // subproblems solved
    int rejected = 0;        // subproblem solutions discarded for lowering t
    double ee = 0.0;         // recomputed from w
    std::string message;
};

struct ScaSettings {
    SolverSettings solver;
    InitSettings init;
};

/// Runs the SCA loop from init_feasible, or from `warm` when given.
/// Only iterates that do not lower t are accepted; the loop stops when the
/// relative increment of t is at most cfg.sca_tol.
ScaResult solve_sca(const CRowVector& h1, const CRowVector& h2, const SystemConfig& cfg,
                    const std::optional<BeamformingState>& warm = std::nullopt,
                    const ScaSettings& settings = {});

}  // namespace irsnoma

#endif  // IRSNOMA_BEAMFORMING_HPP
