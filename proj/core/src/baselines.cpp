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

#include "irsnoma/baselines.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "irsnoma/driver.hpp"

namespace irsnoma {

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::proposed: return "proposed";
        case Scheme::random_phase: return "random_phase";
        case Scheme::oma: return "oma";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "proposed") return Scheme::proposed;
    if (name == "random_phase") return Scheme::random_phase;
    if (name == "oma") return Scheme::oma;
    throw ConfigError("unknown scheme '" + name + "' (expected proposed, random_phase or oma)");
}

BaselineResult random_phase_noma(const SystemConfig& cfg, const ChannelSet& channel, Rng& rng,
                                 const ScaSettings& settings) {
    return random_phase_noma(cfg, channel, default_theta0(cfg.num_elements, rng), settings);
}

BaselineResult random_phase_noma(const SystemConfig& cfg, const ChannelSet& channel, const PhaseState& theta,
                                 const ScaSettings& settings) {
    cfg.validate();
    channel.validate(cfg);
    BaselineResult out;
    out.scheme = Scheme::random_phase;
    out.phase = theta;
    const ChannelSet ch = channel.reordered(order_users(channel, theta, cfg.ordering_norm));
    const CRowVector h1 = effective_channel(ch, theta, 0);
    const CRowVector h2 = effective_channel(ch, theta, 1);
    try {
        const ScaResult res = solve_sca(h1, h2, cfg, std::nullopt, settings);
        out.w = res.state;
        out.inner_iters = res.iterations;
    } catch (const InfeasibleRealization& e) {
        out.message = e.what();
        return out;
    }
    const FeasibilityReport rep = check_solution(out.w, theta.v(), cfg, ch);
    out.feasible = rep.ok();
    if (!out.feasible) out.message = rep.describe();
    out.ee = rep.eval.ee;
    out.rates = rep.eval.rates;
    out.power = rep.eval.power;
    return out;
}

double best_slot_power(double gain, double p_lo, double p_hi, const SystemConfig& cfg, double rel_tol) {
    if (!(p_hi >= p_lo)) throw std::invalid_argument("empty power interval");
    auto ee = [&](double p) {
        return std::log2(1.0 + p * gain / cfg.noise_power) / (p / cfg.amp_efficiency + cfg.circuit_power());
    };
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = p_lo, b = p_hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = ee(x1), f2 = ee(x2);
    const double width = rel_tol * std::max(p_hi, std::numeric_limits<double>::min());
    while (b - a > width) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = ee(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = ee(x1);
        }
    }
    double best = 0.5 * (a + b);
    for (double p : {p_lo, p_hi})
        if (ee(p) > ee(best)) best = p;
    return best;
}

PhaseState single_user_phase(const CVector& a, Rng& rng, const OmaSettings& settings) {
    const int n = static_cast<int>(a.size());
    const double scale = a.squaredNorm();
    if (!(scale > 0.0)) return PhaseState(CVector::Ones(n));

    ConicProgram p;
    const int y = p.add_vars(n, "y");
    AffineExpr obj;
    for (int i = 0; i < n; ++i) obj.add(y + i, -1.0);
    p.maximize(obj);
    const RMatrix m = embed_hermitian(a * a.adjoint() / scale);
    const int side = 2 * n;
    std::vector<AffineExpr> rows(svec_dim(side));
    for (int j = 0; j < side; ++j)
        for (int i = j; i < side; ++i) {
            AffineExpr& r = rows[svec_index(side, i, j)];
            if (i == j) r.add(y + i % n, 1.0);
            r.constant = -(i == j ? 1.0 : std::sqrt(2.0)) * m(i, j);
        }
    const int block = p.add(ConeKind::psd, std::move(rows), "certificate");
    const ConicSolution sol = solve(p, settings.solver);
    if (!sol.ok()) throw std::runtime_error("single-user relaxation not solved: " + sol.stats.message);
    const CMatrix V = embed_hermitian_adjoint(smat(sol.duals[block]));

    AMatrixSet aset;
    aset.a[0] = {a, CVector::Zero(n)};
    aset.a[1] = {a, CVector::Zero(n)};
    SystemConfig unconstrained;
    unconstrained.num_elements = n;
    unconstrained.noise_power = 1.0;
    unconstrained.sinr_min = {0.0, 0.0};
    return phase_from_sdr(recover_rank_one(V, aset, unconstrained, rng, settings.randomization).u.v());
}

namespace {

OmaSlot solve_slot(const SystemConfig& cfg, const ChannelSet& channel, int k, Rng& rng, const OmaSettings& settings) {
    OmaSlot slot;
    PhaseState phase = default_theta0(cfg.num_elements, rng);
    CRowVector h = effective_channel(channel, phase, k);
    double gain = h.squaredNorm();
    for (int it = 0; it < settings.alternations; ++it) {
        if (!(gain > 0.0)) break;
        const CVector w = h.adjoint() / std::sqrt(gain);
        const CVector a = channel.h_r[k].conjugate().cwiseProduct(channel.G * w);
        const PhaseState next = single_user_phase(a, rng, settings);
        const CRowVector hn = effective_channel(channel, next, k);
        const double gn = hn.squaredNorm();
        if (!(gn > gain)) break;
        const bool done = gn - gain <= settings.alternation_tol * gain;
        phase = next;
        h = hn;
        gain = gn;
        if (done) break;
    }
    slot.phase = phase;
    slot.gain = gain;
    slot.w = gain > 0.0 ? CVector(h.adjoint() / std::sqrt(gain)) : CVector(CVector::Zero(cfg.num_antennas));
    const double p_min = gain > 0.0 ? cfg.sinr_min[k] * cfg.noise_power / gain
                                    : (cfg.sinr_min[k] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (!(p_min <= cfg.p_max)) return slot;
    slot.feasible = true;
    slot.power = gain > 0.0 ? best_slot_power(gain, p_min, cfg.p_max, cfg, settings.search_tol) : 0.0;
    slot.w *= std::sqrt(slot.power);
    slot.rate = std::log2(1.0 + slot.power * gain / cfg.noise_power);
    slot.slot_ee = slot.rate / (slot.power / cfg.amp_efficiency + cfg.circuit_power());
    return slot;
}

}  // namespace

BaselineResult oma_tdma(const SystemConfig& cfg, const ChannelSet& channel, Rng& rng, const OmaSettings& settings) {
    cfg.validate();
    channel.validate(cfg);
    const auto& tau = settings.slot_fraction;
    if (!(tau[0] >= 0.0 && tau[1] >= 0.0 && std::abs(tau[0] + tau[1] - 1.0) <= 1e-12))
        throw ConfigError("slot fractions must be nonnegative and sum to 1");
    BaselineResult out;
    out.scheme = Scheme::oma;
    for (int k = 0; k < 2; ++k) {
        Rng slot_rng = rng.derive(static_cast<std::uint64_t>(k));
        out.slots[k] = solve_slot(cfg, channel, k, slot_rng, settings);
    }
    out.feasible = out.slots[0].feasible && out.slots[1].feasible;
    if (!out.feasible) {
        out.message = std::string("QoS target of user ") + (out.slots[0].feasible ? "1" : "0") +
                      " exceeds the power budget in its slot";
        return out;
    }
    out.rates.r1 = tau[0] * out.slots[0].rate;
    out.rates.r2 = tau[1] * out.slots[1].rate;
    out.power = tau[0] * out.slots[0].power + tau[1] * out.slots[1].power;
    out.ee = out.rates.sum() / (out.power / cfg.amp_efficiency + cfg.circuit_power());
    return out;
}

double brute_force_oracle(const SystemConfig& cfg, const ChannelSet& channel, int phase_levels, int power_grid) {
    cfg.validate();
    channel.validate(cfg);
    if (cfg.num_antennas != 1) throw DimensionError("brute-force oracle requires M = 1");
    if (cfg.num_elements > 3) throw DimensionError("brute-force oracle requires N <= 3");
    if (phase_levels < 1 || phase_levels > 8) throw DimensionError("phase_levels must lie in [1, 8]");
    if (power_grid < 1) throw DimensionError("power_grid must be >= 1");

    const int n = cfg.num_elements;
    const double s2 = cfg.noise_power;
    const double r_min1 = cfg.rate_min(0) - FeasibilityReport::kRateTol;
    const double r_min2 = cfg.rate_min(1) - FeasibilityReport::kRateTol;
    double best = -std::numeric_limits<double>::infinity();
    int combos = 1;
    for (int i = 0; i < n; ++i) combos *= phase_levels;
    RVector theta(n);
    for (int c = 0; c < combos; ++c) {
        int code = c;
        for (int i = 0; i < n; ++i) {
            theta[i] = 2.0 * std::numbers::pi * (code % phase_levels) / phase_levels;
            code /= phase_levels;
        }
        const PhaseState phase = PhaseState::from_angles(theta);
        const auto order = order_users(channel, phase, cfg.ordering_norm);
        const double g1 = effective_channel(channel, phase, order[0]).squaredNorm();
        const double g2 = effective_channel(channel, phase, order[1]).squaredNorm();
        for (int i = 0; i <= power_grid; ++i) {
            const double p1 = cfg.p_max * i / power_grid;
            const double r1 = std::log2(1.0 + p1 * g1 / s2);
            if (r1 < r_min1) continue;
            for (int j = 0; i + j <= power_grid; ++j) {
                const double p2 = cfg.p_max * j / power_grid;
                const double r21 = std::log2(1.0 + p2 * g1 / (p1 * g1 + s2));
                const double r22 = std::log2(1.0 + p2 * g2 / (p1 * g2 + s2));
                const double r2 = std::min(r21, r22);
                if (r2 < r_min2) continue;
                const double ee = (r1 + r2) / ((p1 + p2) / cfg.amp_efficiency + cfg.circuit_power());
                best = std::max(best, ee);
            }
        }
    }
    return best;
}

}  // namespace irsnoma
