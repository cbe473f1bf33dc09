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

#include "irsnoma/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace irsnoma {

namespace {

constexpr double kLn2 = std::numbers::ln2;

struct Normalized {
    CVector a1, a2;  // Re(a^H w) = Re(h w) for the scaled channels
    double pc = 0.0;
    double eta = 1.0;
};

Normalized normalize(const CRowVector& h1, const CRowVector& h2, const SystemConfig& cfg) {
    if (h1.size() != h2.size()) throw DimensionError("effective channels differ in length");
    const double sc = std::sqrt(cfg.p_max / cfg.noise_power);
    Normalized n;
    n.a1 = (h1 * sc).adjoint();
    n.a2 = (h2 * sc).adjoint();
    n.pc = cfg.circuit_power() / cfg.p_max;
    n.eta = cfg.amp_efficiency;
    return n;
}

cplx inner(const CRowVector& h, const CVector& w) { return (h * w).value(); }

void clip_to_budget(BeamformingState& w, double p_max) {
    const double p = w.total_power();
    if (p > p_max) {
        const double s = std::sqrt(p_max / p);
        w.w[0] *= s;
        w.w[1] *= s;
    }
}

}  // namespace

std::string to_string(ScaStatus s) {
    switch (s) {
        case ScaStatus::converged: return "converged";
        case ScaStatus::max_iters: return "max_iters";
        case ScaStatus::solver_failure: return "solver_failure";
    }
    return "unknown";
}

TaylorSqrt TaylorSqrt::at(double gamma0, double beta0) {
    TaylorSqrt ts;
    ts.gamma0 = std::max(gamma0, kGammaFloor);
    ts.beta0 = std::max(beta0, std::numeric_limits<double>::min());
    const double gm = ts.gamma0 - 1.0;
    ts.value0 = std::sqrt(gm * ts.beta0);
    ts.d_gamma = 0.5 * std::sqrt(ts.beta0 / gm);
    ts.d_beta = 0.5 * std::sqrt(gm / ts.beta0);
    return ts;
}

double taylor_sqrt(double gamma, double beta, double gamma0, double beta0) {
    return TaylorSqrt::at(gamma0, beta0)(gamma, beta);
}

double taylor_sqrt(double gamma, double beta, const ScaPoint& point, int pair) {
    const auto [i, k] = kSinrPairs.at(static_cast<std::size_t>(pair));
    (void)i;
    return taylor_sqrt(gamma, beta, point.slack.gamma[static_cast<std::size_t>(k)],
                       point.slack.beta[static_cast<std::size_t>(pair)]);
}

double taylor_bilinear(double t, double rho, double t0, double rho0) {
    return t0 * rho0 + rho0 * (t - t0) + t0 * (rho - rho0);
}

double taylor_bilinear(double t, double rho, const ScaPoint& point) {
    return taylor_bilinear(t, rho, point.slack.t, point.slack.rho);
}

BeamformingState align_phases(const BeamformingState& w, const CRowVector& h1, const CRowVector& h2) {
    BeamformingState out = w;
    const cplx c1 = inner(h1, w.w[0]);
    const cplx c2 = inner(h2, w.w[1]);
    if (std::abs(c1) > 0.0) out.w[0] *= std::conj(c1) / std::abs(c1);
    if (std::abs(c2) > 0.0) out.w[1] *= std::conj(c2) / std::abs(c2);
    return out;
}

BeamformingState init_feasible(const CRowVector& h1, const CRowVector& h2, const SystemConfig& cfg,
                               const InitSettings& settings) {
    const int m = static_cast<int>(h1.size());
    if (cfg.sinr_min[0] == 0.0 && cfg.sinr_min[1] == 0.0) return BeamformingState::zeros(m);
    const Normalized nz = normalize(h1, h2, cfg);
    const double s1 = std::sqrt(cfg.sinr_min[0]);
    const double s2 = std::sqrt(cfg.sinr_min[1]);

    ConicProgram p;
    const ComplexVar w1 = ComplexVar::add_to(p, m, "w1");
    const ComplexVar w2 = ComplexVar::add_to(p, m, "w2");
    const int pw = p.add_var("power");
    p.maximize(AffineExpr::var(pw, -1.0));

    p.add(ConeKind::zero, {im_inner(nz.a1, w1), im_inner(nz.a1, w2), im_inner(nz.a2, w2)}, "im");
    p.add(ConeKind::nonneg, {re_inner(nz.a1, w1) - s1, re_inner(nz.a1, w2), re_inner(nz.a2, w2)}, "re");
    if (s2 > 0.0)
        for (const CVector* a : {&nz.a1, &nz.a2})
            p.add(ConeKind::soc, {re_inner(*a, w2), s2 * re_inner(*a, w1), s2 * im_inner(*a, w1), AffineExpr(s2)},
                  "qos2");
    std::vector<AffineExpr> rows{AffineExpr::var(pw), AffineExpr(0.5)};
    for (const auto& r : embedded_rows(w1)) rows.push_back(r);
    for (const auto& r : embedded_rows(w2)) rows.push_back(r);
    p.add(ConeKind::rsoc, std::move(rows), "power");

    const ConicSolution sol = solve(p, settings.solver);
    if (sol.status == SolveStatus::infeasible)
        throw InfeasibleRealization("QoS targets are infeasible for these channels");
    if (!sol.ok())
        throw InfeasibleRealization("minimum-power problem could not be solved (" + to_string(sol.status) + ": " +
                                    sol.stats.message + ")");
    BeamformingState out;
    const double root = std::sqrt(cfg.p_max);
    out.w = {extract_complex(sol.x, w1) * root, extract_complex(sol.x, w2) * root};
    const double need = out.total_power();
    if (need > cfg.p_max * (1.0 + 1e-7))
        throw InfeasibleRealization("QoS targets need " + std::to_string(need) + " W, budget is " +
                                    std::to_string(cfg.p_max) + " W");
    clip_to_budget(out, cfg.p_max);
    return out;
}

SlackIterate init_slacks(const BeamformingState& w0, const CRowVector& h1, const CRowVector& h2,
                         const SystemConfig& cfg) {
    const double s2 = cfg.noise_power;
    const double p11 = std::norm(inner(h1, w0.w[0]));
    const double p12 = std::norm(inner(h1, w0.w[1]));
    const double p21 = std::norm(inner(h2, w0.w[0]));
    const double p22 = std::norm(inner(h2, w0.w[1]));
    SlackIterate s;
    s.beta = {s2, p11 + s2, p21 + s2};
    s.gamma[0] = 1.0 + p11 / s2;
    s.gamma[1] = 1.0 + std::min(p12 / s.beta[1], p22 / s.beta[2]);
    s.delta = {std::log2(s.gamma[0]), std::log2(s.gamma[1])};
    s.rho = w0.total_power() / cfg.amp_efficiency + cfg.circuit_power();
    s.t = (s.delta[0] + s.delta[1]) / s.rho;
    return s;
}

Subproblem build_subproblem(const ScaPoint& point, const CRowVector& h1, const CRowVector& h2,
                            const SystemConfig& cfg) {
    const int m = static_cast<int>(h1.size());
    const Normalized nz = normalize(h1, h2, cfg);
    const double s2 = cfg.noise_power;
    const SlackIterate& sl = point.slack;
    const double t0 = sl.t * cfg.p_max;
    const double rho0 = sl.rho / cfg.p_max;

    Subproblem sp;
    ConicProgram& p = sp.program;
    ScaLayout& L = sp.layout;
    L.w1 = ComplexVar::add_to(p, m, "w1");
    L.w2 = ComplexVar::add_to(p, m, "w2");
    L.t = p.add_var("t");
    L.rho = p.add_var("rho");
    L.gamma[0] = p.add_var("gamma1");
    L.gamma[1] = p.add_var("gamma2");
    L.delta[0] = p.add_var("delta1");
    L.delta[1] = p.add_var("delta2");
    L.beta[0] = p.add_var("beta12");
    L.beta[1] = p.add_var("beta22");
    p.maximize(AffineExpr::var(L.t));

    const auto var = [](int j, double a = 1.0) { return AffineExpr::var(j, a); };
    const TaylorSqrt f11 = TaylorSqrt::at(sl.gamma[0], 1.0);
    const TaylorSqrt f12 = TaylorSqrt::at(sl.gamma[1], sl.beta[1] / s2);
    const TaylorSqrt f22 = TaylorSqrt::at(sl.gamma[1], sl.beta[2] / s2);
    auto fta = [&](const TaylorSqrt& f, int gamma_var, int beta_var) {
        AffineExpr e(f.value0 - f.d_gamma * f.gamma0 - f.d_beta * f.beta0);
        e.add(gamma_var, f.d_gamma);
        if (beta_var >= 0) e.add(beta_var, f.d_beta);
        else e.constant += f.d_beta * 1.0;
        return e;
    };

    std::vector<AffineExpr> lin;
    lin.push_back(re_inner(nz.a1, L.w1) - fta(f11, L.gamma[0], -1));
    lin.push_back(re_inner(nz.a1, L.w2) - fta(f12, L.gamma[1], L.beta[0]));
    lin.push_back(re_inner(nz.a2, L.w2) - fta(f22, L.gamma[1], L.beta[1]));
    // delta1 + delta2 >= t0 rho0 + rho0 (t - t0) + t0 (rho - rho0)
    lin.push_back(var(L.delta[0]) + var(L.delta[1]) - var(L.t, rho0) - var(L.rho, t0) + t0 * rho0);
    if (cfg.sinr_min[0] > 0.0) lin.push_back(re_inner(nz.a1, L.w1) - std::sqrt(cfg.sinr_min[0]));
    p.add(ConeKind::nonneg, std::move(lin), "linear");

    p.add(ConeKind::zero, {im_inner(nz.a1, L.w1), im_inner(nz.a1, L.w2), im_inner(nz.a2, L.w2)}, "im");

    {
        const double e = nz.eta;
        std::vector<AffineExpr> rows{var(L.rho, 0.5 * e) + 0.5 * (1.0 - e * nz.pc)};
        for (const auto& r : embedded_rows(L.w1)) rows.push_back(r);
        for (const auto& r : embedded_rows(L.w2)) rows.push_back(r);
        rows.push_back(var(L.rho, 0.5 * e) - 0.5 * (1.0 + e * nz.pc));
        p.add(ConeKind::soc, std::move(rows), "rho");
    }

    for (int k = 0; k < 2; ++k)
        p.add(ConeKind::exp, {var(L.delta[k], kLn2), AffineExpr(1.0), var(L.gamma[k])}, "rate" + std::to_string(k + 1));

    const std::array<const CVector*, 2> a{&nz.a1, &nz.a2};
    for (int i = 0; i < 2; ++i)
        p.add(ConeKind::rsoc,
              {var(L.beta[i]) - 1.0, AffineExpr(0.5), re_inner(*a[i], L.w1), im_inner(*a[i], L.w1)},
              "beta" + std::to_string(i + 1) + "2");

    if (cfg.sinr_min[1] > 0.0) {
        const double g = std::sqrt(cfg.sinr_min[1]);
        for (int i = 0; i < 2; ++i)
            p.add(ConeKind::soc,
                  {re_inner(*a[i], L.w2), g * re_inner(*a[i], L.w1), g * im_inner(*a[i], L.w1), AffineExpr(g)},
                  "qos2_at" + std::to_string(i + 1));
    }

    {
        std::vector<AffineExpr> rows{AffineExpr(1.0)};
        for (const auto& r : embedded_rows(L.w1)) rows.push_back(r);
        for (const auto& r : embedded_rows(L.w2)) rows.push_back(r);
        p.add(ConeKind::soc, std::move(rows), "budget");
    }
    return sp;
}

ScaPoint decode_subproblem(const RVector& x, const ScaLayout& L, const SystemConfig& cfg) {
    ScaPoint pt;
    const double root = std::sqrt(cfg.p_max);
    pt.w.w = {extract_complex(x, L.w1) * root, extract_complex(x, L.w2) * root};
    SlackIterate& s = pt.slack;
    s.t = x[L.t] / cfg.p_max;
    s.rho = x[L.rho] * cfg.p_max;
    s.gamma = {x[L.gamma[0]], x[L.gamma[1]]};
    s.delta = {x[L.delta[0]], x[L.delta[1]]};
    s.beta = {cfg.noise_power, x[L.beta[0]] * cfg.noise_power, x[L.beta[1]] * cfg.noise_power};
    pt.w.slack = s;
    return pt;
}

double exact_violation(const ScaPoint& point, const CRowVector& h1, const CRowVector& h2, const SystemConfig& cfg) {
    const double s2 = cfg.noise_power;
    const SlackIterate& s = point.slack;
    const auto& w = point.w.w;
    const std::array<const CRowVector*, 2> h{&h1, &h2};
    double worst = 0.0;
    auto rel = [](double need, double have) { return std::max(0.0, need - have) / std::max(1.0, std::abs(need)); };
    for (int k = 0; k < 2; ++k) worst = std::max(worst, rel(std::exp2(s.delta[k]), s.gamma[k]));
    for (int pair = 0; pair < 3; ++pair) {
        const auto [i, k] = kSinrPairs[static_cast<std::size_t>(pair)];
        const double amp = std::abs(inner(*h[i], w[k])) / std::sqrt(s2);
        const double need = std::sqrt(std::max(0.0, s.gamma[k] - 1.0) * s.beta[pair] / s2);
        worst = std::max(worst, rel(need, amp));
        const double interf = (k == 0 ? 0.0 : std::norm(inner(*h[i], w[0]))) + s2;
        worst = std::max(worst, rel(interf / s2, s.beta[pair] / s2));
    }
    const double p = point.w.total_power();
    worst = std::max(worst, rel((p / cfg.amp_efficiency + cfg.circuit_power()) / cfg.p_max, s.rho / cfg.p_max));
    worst = std::max(worst, rel(p / cfg.p_max, 1.0));
    const Sinrs q = sinr_all(h1, h2, point.w, s2);
    worst = std::max(worst, rel(cfg.sinr_min[0], q.gamma_1));
    worst = std::max(worst, rel(cfg.sinr_min[1], std::min(q.gamma_21, q.gamma_22)));
    return worst;
}

ScaResult solve_sca(const CRowVector& h1, const CRowVector& h2, const SystemConfig& cfg,
                    const std::optional<BeamformingState>& warm, const ScaSettings& settings) {
    ScaResult res;
    BeamformingState w0 = warm ? align_phases(*warm, h1, h2) : init_feasible(h1, h2, cfg, settings.init);
    ScaPoint point{init_slacks(w0, h1, h2, cfg), w0};
    point.w.slack = point.slack;
    res.t_trajectory.push_back(point.slack.t);
    res.status = ScaStatus::max_iters;

    for (int it = 0; it < cfg.max_inner_iters; ++it) {
        const Subproblem sp = build_subproblem(point, h1, h2, cfg);
        const ConicSolution sol = solve(sp.program, settings.solver);
        ++res.iterations;
        if (!sol.ok()) {
            res.status = ScaStatus::solver_failure;
            res.message = "subproblem " + std::to_string(res.iterations) + ": " + to_string(sol.status) + " (" +
                          sol.stats.message + ")";
            break;
        }
        ScaPoint next = decode_subproblem(sol.x, sp.layout, cfg);
        clip_to_budget(next.w, cfg.p_max);
        const double t_prev = point.slack.t;
        const double t_new = next.slack.t;
        if (!(t_new >= t_prev)) {
            ++res.rejected;
            res.status = ScaStatus::converged;
            res.message = "step lowering t rejected";
            break;
        }
        point = next;
        res.t_trajectory.push_back(t_new);
        res.surrogate_gap.push_back(std::abs(t_new * next.slack.rho - (next.slack.delta[0] + next.slack.delta[1])));
        const double inc = t_prev > 0.0 ? (t_new - t_prev) / t_prev : (t_new > 0.0 ? 1.0 : 0.0);
        if (inc <= cfg.sca_tol) {
            res.status = ScaStatus::converged;
            break;
        }
    }
    res.state = point.w;
    res.state.slack = point.slack;
    const Sinrs q = sinr_all(h1, h2, res.state, cfg.noise_power);
    res.ee = energy_efficiency(res.state, rates(q).sum(), cfg);
    return res;
}

}  // namespace irsnoma
