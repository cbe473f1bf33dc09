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

#ifndef IRSNOMA_PHASE_HPP
#define IRSNOMA_PHASE_HPP

#include <array>
#include <stdexcept>
#include <string>

#include "irsnoma/conic.hpp"
#include "irsnoma/model.hpp"
#include "irsnoma/rng.hpp"

/// Reflection-phase optimization for fixed beamformers by semidefinite
/// relaxation of the lifted matrix V = u u^H.
///
/// With a_{k,j} = diag(h_{k,r}^H) G w_j the cascaded term is
/// h_{k,r}^H diag(v) G w_j = u^H a_{k,j} for u = conj(v); the relaxation is
/// posed over u, and solve_phase converts back to reflection coefficients.
namespace irsnoma {

class SdrInfeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoFeasibleCandidate : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AMatrixSet {
    std::array<std::array<CVector, 2>, 2> a;  // a[k][j]

    int size() const { return static_cast<int>(a[0][0].size()); }
    /// a[k][j] a[k][j]^H.
    CMatrix matrix(int k, int j) const;
    /// u^H a[k][j].
    cplx inner(const CVector& u, int k, int j) const;
};

AMatrixSet build_a(const ChannelSet& channel, const BeamformingState& w);

/// SDR vector of a phase state and back.
CVector sdr_vector(const PhaseState& phase);
PhaseState phase_from_sdr(const CVector& u);

/// The relaxation  max z2  s.t.  Tr(V A_k1) + Tr(V A_k2) >= z2 sigma^2,
/// Tr(V A_11) >= G1 sigma^2,  Tr(V A_k2) >= G2 (Tr(V A_k1) + sigma^2),
/// diag(V) = 1,  V >= 0,
/// posed through its Lagrangian dual
///   min sum(y) - nu G1 / c - (G2 / c)(xi_1 + xi_2)
///   s.t. lambda_1 + lambda_2 = 1,  lambda, nu, xi >= 0,
///        Diag(y) - sum_k lambda_k (B_k1 + B_k2) - nu B_11 - sum_k xi_k (B_k2 - G2 B_k1) >= 0
/// with B = A / (c sigma^2). V is the multiplier of the matrix inequality and z2 = c * value.
struct SdrProgram {
    ConicProgram program;
    int n = 0;
    double scale = 1.0;  // c
    int psd_block = -1;
    int y = -1, lambda = -1, nu = -1, xi = -1;
};

SdrProgram build_sdr(const AMatrixSet& aset, const SystemConfig& cfg);

struct SdrResult {
    CMatrix V;
    double z2 = 0.0;
    RVector eigenvalues;  // descending
    double eig_ratio = 0.0;
    bool rank_one = false;
    SolverStats stats;
};

inline constexpr double kRankOneTol = 1e-6;

/// Throws SdrInfeasible when the relaxation has no feasible point or cannot be solved.
SdrResult solve_sdr(const AMatrixSet& aset, const SystemConfig& cfg, const SolverSettings& settings = {});

/// min_k sum_j |u^H a_kj|^2 / sigma^2.
double phase_objective(const CVector& u, const AMatrixSet& aset, const SystemConfig& cfg);
/// QoS of the phase problem at fixed w (rates of w under u), with slack `tol` in bits.
bool phase_feasible(const CVector& u, const AMatrixSet& aset, const SystemConfig& cfg, double tol = 0.0);

struct RandomizationSettings {
    int candidates = 1000;
    int patience = 100;  // consecutive non-improving feasible candidates
};

struct Recovery {
    PhaseState u;  // SDR vector, first entry real positive
    bool rank_one = false;
    bool randomized = false;
    int candidates = 0;
    double objective = 0.0;
};

/// Rank-one recovery: the phase of the principal eigenvector when
/// lambda_2 / lambda_1 <= kRankOneTol, otherwise Gaussian randomization over
/// V^{1/2} r (the principal eigenvector is candidate 0). Throws
/// NoFeasibleCandidate when no candidate meets the QoS constraints.
Recovery recover_rank_one(const CMatrix& V, const AMatrixSet& aset, const SystemConfig& cfg, Rng& rng,
                          const RandomizationSettings& settings = {});
PhaseState extract_rank_one(const CMatrix& V, const AMatrixSet& aset, const SystemConfig& cfg, Rng& rng,
                            const RandomizationSettings& settings = {});

struct PhaseSettings {
    SolverSettings solver;
    RandomizationSettings randomization;
};

struct PhaseResult {
    PhaseState phase;  // reflection coefficients
    double z2 = 0.0;           // relaxation value
    double z2_achieved = 0.0;  // phase_objective of the recovered vector
    double eig_ratio = 0.0;
    bool rank_one = false;
    bool randomized = false;
    int candidates = 0;
    bool k1_slack = false;        // the k = 1 sum-term constraint is inactive
    bool order_premise = true;    // |h_1 w_2|^2 >= |h_2 w_2|^2 under the new phases
    double sdr_seconds = 0.0;
};

/// Solves the relaxation for fixed w and recovers a feasible phase vector.
/// `channel` must already be in decoding order.
PhaseResult solve_phase(const ChannelSet& channel, const BeamformingState& w, const SystemConfig& cfg, Rng& rng,
                        const PhaseSettings& settings = {});

}  // namespace irsnoma

#endif  // IRSNOMA_PHASE_HPP
