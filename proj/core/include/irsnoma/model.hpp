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

#ifndef IRSNOMA_MODEL_HPP
#define IRSNOMA_MODEL_HPP

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

/// Physical-layer quantities of a two-user downlink MISO IRS-NOMA link.
///
/// Users are indexed 0 and 1 in code. User 0 is the strong user (first in
/// the channel-gain ordering) that decodes and cancels user 1's message
/// before decoding its own; user 1 treats user 0's signal as interference.
/// All powers are in watts; dBm only appears at the config boundary.
namespace irsnoma {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);
double linear_to_db(double linear);

/// Norm used to rank the two users by effective-channel strength.
enum class OrderingNorm { euclidean, sum_abs };

struct SystemConfig {
    int num_antennas = 4;      // M
    int num_elements = 20;     // N
    double amp_efficiency = 0.6;
    double p_max = 0.01;       // W
    double p_dynamic = 0.0;    // W per antenna
    double p_static = 0.01;    // W
    /// When set, replaces M * p_dynamic + p_static.
    std::optional<double> p_circuit_override;
    double noise_power = 1e-11;  // W
    std::array<double, 2> sinr_min{10.0, 10.0};  // linear
    double sca_tol = 1e-3;
    double outer_tol = 1e-3;
    int max_inner_iters = 100;
    int max_outer_iters = 20;
    OrderingNorm ordering_norm = OrderingNorm::euclidean;

    double circuit_power() const;
    /// Minimum rate of user k in bits/s/Hz, derived from sinr_min.
    double rate_min(int k) const;
    /// Throws ConfigError on any out-of-range field.
    void validate() const;

    /// M=4, N=20, eta=0.6, P_max = P_c = 10 dBm, noise -80 dBm, 10 dB QoS.
    static SystemConfig simulation_defaults();
};

struct Geometry {
    double d_bi = 40.0;
    std::array<double, 2> d_iu{10.0, 20.0};
    double alpha_bi = 2.2;
    double alpha_iu = 2.5;
};

/// BS->IRS matrix G (N x M) and IRS->user vectors h_r[k] (length N).
/// The cascaded channel of user k is h_r[k]^H * diag(v) * G.
struct ChannelSet {
    CMatrix G;
    std::array<CVector, 2> h_r;
    Geometry geometry;

    int num_elements() const { return static_cast<int>(G.rows()); }
    int num_antennas() const { return static_cast<int>(G.cols()); }
    void validate() const;
    void validate(const SystemConfig& cfg) const;
    /// Returns the channel with users relabelled by `order` (order[0] becomes user 0).
    ChannelSet reordered(const std::array<int, 2>& order) const;
};

/// Unit-modulus IRS reflection coefficients v_n = exp(j theta_n), the
/// diagonal of the reflection matrix.
class PhaseState {
public:
    static constexpr double kModulusTol = 1e-8;

    PhaseState() = default;
    /// Throws std::invalid_argument if any |v_n| deviates from 1 by more than 1e-8.
    explicit PhaseState(CVector v);
    static PhaseState from_angles(const RVector& theta);
    /// Projects each entry onto the unit circle; zero entries map to 1.
    static PhaseState project(const CVector& raw);

    const CVector& v() const { return v_; }
    int size() const { return static_cast<int>(v_.size()); }
    /// Phases in [0, 2 pi).
    RVector angles() const;

private:
    CVector v_;
};

/// Slack iterate of the beamforming subproblem. beta is indexed by
/// kSinrPairs; beta[0] (the (1,1) pair) is always the noise power.
struct SlackIterate {
    double t = 0.0;
    double rho = 0.0;
    std::array<double, 2> gamma{1.0, 1.0};
    std::array<double, 2> delta{0.0, 0.0};
    std::array<double, 3> beta{0.0, 0.0, 0.0};
};

/// (i, k): decoder i, message of user k, i <= k.
struct SinrPair {
    int i;
    int k;
};
inline constexpr std::array<SinrPair, 3> kSinrPairs{{{0, 0}, {0, 1}, {1, 1}}};

struct BeamformingState {
    std::array<CVector, 2> w;
    std::optional<SlackIterate> slack;

    double total_power() const;
    static BeamformingState zeros(int num_antennas);
};

struct Sinrs {
    double gamma_1 = 0.0;   // user 0 own message after SIC
    double gamma_21 = 0.0;  // user 1's message decoded at user 0
    double gamma_22 = 0.0;  // user 1's message decoded at user 1
};

struct Rates {
    double r1 = 0.0;
    double r2 = 0.0;
    double sum() const { return r1 + r2; }
};

CRowVector effective_channel(const ChannelSet& channel, const PhaseState& phase, int k);
CRowVector effective_channel(const ChannelSet& channel, const CVector& v, int k);

Sinrs sinr_all(const CRowVector& h1, const CRowVector& h2, const BeamformingState& w,
               double noise_power);
Rates rates(const Sinrs& s);
double energy_efficiency(const BeamformingState& w, double sum_rate, const SystemConfig& cfg);

/// Returns {strong, weak}; ties keep the original order.
std::array<int, 2> order_users(const ChannelSet& channel, const PhaseState& phase,
                               OrderingNorm norm = OrderingNorm::euclidean);

struct Evaluation {
    Sinrs sinrs;
    Rates rates;
    double power = 0.0;
    double ee = 0.0;
};

Evaluation evaluate(const ChannelSet& channel, const CVector& v, const BeamformingState& w,
                    const SystemConfig& cfg);

struct FeasibilityReport {
    static constexpr double kRateTol = 1e-6;
    static constexpr double kPowerTol = 1e-9;

    Evaluation eval;
    std::array<double, 2> rate_shortfall{0.0, 0.0};  // max(0, R_min - R_k)
    double power_excess = 0.0;                       // max(0, power - P_max)
    double modulus_error = 0.0;                      // max_n ||v_n| - 1|
    bool qos_ok = true;
    bool power_ok = true;
    bool unit_modulus_ok = true;

    bool ok() const { return qos_ok && power_ok && unit_modulus_ok; }
    std::string describe() const;
};

/// Post-hoc verification from raw (w, v); EE is recomputed, never taken from slack.
FeasibilityReport check_solution(const BeamformingState& w, const CVector& v,
                                 const SystemConfig& cfg, const ChannelSet& channel);

}  // namespace irsnoma

#endif  // IRSNOMA_MODEL_HPP
