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

#include "irsnoma/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace irsnoma {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double SystemConfig::circuit_power() const {
    if (p_circuit_override) return *p_circuit_override;
    return num_antennas * p_dynamic + p_static;
}

double SystemConfig::rate_min(int k) const { return std::log2(1.0 + sinr_min.at(k)); }

void SystemConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("invalid system config: " + what); };
    if (num_antennas < 1) fail("num_antennas must be >= 1");
    if (num_elements < 1) fail("num_elements must be >= 1");
    if (!(amp_efficiency > 0.0 && amp_efficiency <= 1.0)) fail("amp_efficiency must lie in (0, 1]");
    if (!(p_max > 0.0)) fail("p_max must be > 0");
    if (!(p_dynamic >= 0.0)) fail("p_dynamic must be >= 0");
    if (!(p_static >= 0.0)) fail("p_static must be >= 0");
    if (p_circuit_override && !(*p_circuit_override >= 0.0)) fail("p_circuit must be >= 0");
    if (!(circuit_power() > 0.0)) fail("circuit power must be > 0");
    if (!(noise_power > 0.0)) fail("noise_power must be > 0");
    for (double g : sinr_min)
        if (!(g >= 0.0)) fail("sinr_min must be >= 0");
    if (!(sca_tol > 0.0)) fail("sca_tol must be > 0");
    if (!(outer_tol > 0.0)) fail("outer_tol must be > 0");
    if (max_inner_iters < 1) fail("max_inner_iters must be >= 1");
    if (max_outer_iters < 1) fail("max_outer_iters must be >= 1");
}

SystemConfig SystemConfig::simulation_defaults() {
    SystemConfig c;
    c.num_antennas = 4;
    c.num_elements = 20;
    c.amp_efficiency = 0.6;
    c.p_max = dbm_to_watts(10.0);
    c.p_dynamic = 0.0;
    c.p_static = dbm_to_watts(10.0);
    c.noise_power = dbm_to_watts(-80.0);
    c.sinr_min = {db_to_linear(10.0), db_to_linear(10.0)};
    return c;
}

void ChannelSet::validate() const {
    const auto n = G.rows();
    if (n < 1 || G.cols() < 1) throw DimensionError("G must be non-empty");
    for (int k = 0; k < 2; ++k)
        if (h_r[k].size() != n)
            throw DimensionError("h_r[" + std::to_string(k) + "] has length " +
                                 std::to_string(h_r[k].size()) + ", expected " + std::to_string(n));
}

void ChannelSet::validate(const SystemConfig& cfg) const {
    validate();
    if (num_elements() != cfg.num_elements || num_antennas() != cfg.num_antennas)
        throw DimensionError("channel is " + std::to_string(num_elements()) + "x" +
                             std::to_string(num_antennas()) + ", config expects " +
                             std::to_string(cfg.num_elements) + "x" + std::to_string(cfg.num_antennas));
}

ChannelSet ChannelSet::reordered(const std::array<int, 2>& order) const {
    ChannelSet out = *this;
    out.h_r = {h_r[order[0]], h_r[order[1]]};
    out.geometry.d_iu = {geometry.d_iu[order[0]], geometry.d_iu[order[1]]};
    return out;
}

PhaseState::PhaseState(CVector v) : v_(std::move(v)) {
    for (Eigen::Index n = 0; n < v_.size(); ++n)
        if (std::abs(std::abs(v_[n]) - 1.0) > kModulusTol)
            throw std::invalid_argument("phase entry " + std::to_string(n) + " has modulus " +
                                        std::to_string(std::abs(v_[n])));
}

PhaseState PhaseState::from_angles(const RVector& theta) {
    CVector v(theta.size());
    for (Eigen::Index n = 0; n < theta.size(); ++n) v[n] = std::polar(1.0, theta[n]);
    return PhaseState(std::move(v));
}

PhaseState PhaseState::project(const CVector& raw) {
    CVector v(raw.size());
    for (Eigen::Index n = 0; n < raw.size(); ++n) {
        const double m = std::abs(raw[n]);
        v[n] = m > 0.0 ? raw[n] / m : cplx(1.0, 0.0);
    }
    return PhaseState(std::move(v));
}

RVector PhaseState::angles() const {
    RVector th(v_.size());
    for (Eigen::Index n = 0; n < v_.size(); ++n) {
        double a = std::arg(v_[n]);
        if (a < 0.0) a += 2.0 * std::numbers::pi;
        if (a >= 2.0 * std::numbers::pi) a = 0.0;
        th[n] = a + 0.0;
    }
    return th;
}

double BeamformingState::total_power() const { return w[0].squaredNorm() + w[1].squaredNorm(); }

BeamformingState BeamformingState::zeros(int num_antennas) {
    BeamformingState s;
    s.w = {CVector::Zero(num_antennas), CVector::Zero(num_antennas)};
    return s;
}

CRowVector effective_channel(const ChannelSet& channel, const CVector& v, int k) {
    channel.validate();
    if (k < 0 || k > 1) throw DimensionError("user index must be 0 or 1");
    if (v.size() != channel.num_elements())
        throw DimensionError("phase vector has length " + std::to_string(v.size()) + ", expected " +
                             std::to_string(channel.num_elements()));
    const CVector weights = channel.h_r[k].conjugate().cwiseProduct(v);
    return weights.transpose() * channel.G;
}

CRowVector effective_channel(const ChannelSet& channel, const PhaseState& phase, int k) {
    return effective_channel(channel, phase.v(), k);
}

Sinrs sinr_all(const CRowVector& h1, const CRowVector& h2, const BeamformingState& w,
               double noise_power) {
    if (!(noise_power > 0.0)) throw std::invalid_argument("noise power must be > 0");
    const auto m = h1.size();
    if (h2.size() != m || w.w[0].size() != m || w.w[1].size() != m)
        throw DimensionError("effective channels and beamformers disagree in length");
    const double p11 = std::norm((h1 * w.w[0]).value());
    const double p12 = std::norm((h1 * w.w[1]).value());
    const double p21 = std::norm((h2 * w.w[0]).value());
    const double p22 = std::norm((h2 * w.w[1]).value());
    Sinrs s;
    s.gamma_1 = p11 / noise_power;
    s.gamma_21 = p12 / (p11 + noise_power);
    s.gamma_22 = p22 / (p21 + noise_power);
    return s;
}

Rates rates(const Sinrs& s) {
    Rates r;
    r.r1 = std::log2(1.0 + std::max(0.0, s.gamma_1));
    r.r2 = std::min(std::log2(1.0 + std::max(0.0, s.gamma_22)), std::log2(1.0 + std::max(0.0, s.gamma_21)));
    return r;
}

double energy_efficiency(const BeamformingState& w, double sum_rate, const SystemConfig& cfg) {
    const double denom = w.total_power() / cfg.amp_efficiency + cfg.circuit_power();
    return sum_rate / denom;
}

namespace {

double gain(const CRowVector& h, OrderingNorm norm) {
    switch (norm) {
        case OrderingNorm::sum_abs: return h.cwiseAbs().sum();
        case OrderingNorm::euclidean:
        default: return h.norm();
    }
}

}  // namespace

std::array<int, 2> order_users(const ChannelSet& channel, const PhaseState& phase, OrderingNorm norm) {
    const double g0 = gain(effective_channel(channel, phase, 0), norm);
    const double g1 = gain(effective_channel(channel, phase, 1), norm);
    if (g1 > g0) return {1, 0};
    return {0, 1};
}

Evaluation evaluate(const ChannelSet& channel, const CVector& v, const BeamformingState& w,
                    const SystemConfig& cfg) {
    Evaluation e;
    const CRowVector h1 = effective_channel(channel, v, 0);
    const CRowVector h2 = effective_channel(channel, v, 1);
    e.sinrs = sinr_all(h1, h2, w, cfg.noise_power);
    e.rates = rates(e.sinrs);
    e.power = w.total_power();
    e.ee = energy_efficiency(w, e.rates.sum(), cfg);
    return e;
}

FeasibilityReport check_solution(const BeamformingState& w, const CVector& v, const SystemConfig& cfg,
                                 const ChannelSet& channel) {
    FeasibilityReport rep;
    for (Eigen::Index n = 0; n < v.size(); ++n)
        rep.modulus_error = std::max(rep.modulus_error, std::abs(std::abs(v[n]) - 1.0));
    rep.unit_modulus_ok = rep.modulus_error <= PhaseState::kModulusTol;
    rep.eval = evaluate(channel, v, w, cfg);
    const std::array<double, 2> r{rep.eval.rates.r1, rep.eval.rates.r2};
    for (int k = 0; k < 2; ++k) {
        rep.rate_shortfall[k] = std::max(0.0, cfg.rate_min(k) - r[k]);
        if (rep.rate_shortfall[k] > FeasibilityReport::kRateTol) rep.qos_ok = false;
    }
    rep.power_excess = std::max(0.0, rep.eval.power - cfg.p_max);
    rep.power_ok = rep.power_excess <= FeasibilityReport::kPowerTol;
    return rep;
}

std::string FeasibilityReport::describe() const {
    std::ostringstream os;
    os.precision(9);
    if (ok()) {
        os << "feasible (ee=" << eval.ee << ")";
        return os.str();
    }
    const char* sep = "";
    for (int k = 0; k < 2; ++k)
        if (rate_shortfall[k] > kRateTol) {
            os << sep << "rate of user " << k << " short by " << rate_shortfall[k] << " bit/s/Hz";
            sep = "; ";
        }
    if (!power_ok) {
        os << sep << "power exceeds budget by " << power_excess << " W";
        sep = "; ";
    }
    if (!unit_modulus_ok) os << sep << "unit-modulus error " << modulus_error;
    return os.str();
}

}  // namespace irsnoma
