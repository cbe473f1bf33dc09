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

#include "irsnoma/phase.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace irsnoma {

CMatrix AMatrixSet::matrix(int k, int j) const { return a[k][j] * a[k][j].adjoint(); }

cplx AMatrixSet::inner(const CVector& u, int k, int j) const { return u.dot(a[k][j]); }

AMatrixSet build_a(const ChannelSet& channel, const BeamformingState& w) {
    channel.validate();
    const auto m = channel.num_antennas();
    if (w.w[0].size() != m || w.w[1].size() != m)
        throw DimensionError("beamformers have length " + std::to_string(w.w[0].size()) + ", expected " +
                             std::to_string(m));
    AMatrixSet s;
    for (int j = 0; j < 2; ++j) {
        const CVector gw = channel.G * w.w[j];
        for (int k = 0; k < 2; ++k) s.a[k][j] = channel.h_r[k].conjugate().cwiseProduct(gw);
    }
    return s;
}

CVector sdr_vector(const PhaseState& phase) { return phase.v().conjugate(); }

PhaseState phase_from_sdr(const CVector& u) { return PhaseState::project(u.conjugate()); }

SdrProgram build_sdr(const AMatrixSet& aset, const SystemConfig& cfg) {
    const int n = aset.size();
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j)
            if (aset.a[k][j].size() != n) throw DimensionError("a vectors disagree in length");
    const double sigma2 = cfg.noise_power;
    const double g1 = cfg.sinr_min[0];
    const double g2 = cfg.sinr_min[1];

    double c = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j) c = std::max(c, aset.a[k][j].squaredNorm() / sigma2);
    if (!(c > 1e-300)) c = 1.0;
    const double s = 1.0 / (c * sigma2);

    SdrProgram out;
    out.n = n;
    out.scale = c;
    ConicProgram& p = out.program;
    out.y = p.add_vars(n, "y");
    out.lambda = p.add_vars(2, "lambda");
    out.nu = p.add_var("nu");
    out.xi = p.add_vars(2, "xi");

    AffineExpr obj;
    for (int i = 0; i < n; ++i) obj.add(out.y + i, -1.0);
    obj.add(out.nu, g1 / c);
    obj.add(out.xi, g2 / c);
    obj.add(out.xi + 1, g2 / c);
    p.maximize(obj);

    p.add(ConeKind::zero, {AffineExpr::var(out.lambda) + AffineExpr::var(out.lambda + 1) - 1.0}, "simplex");
    std::vector<AffineExpr> sign;
    for (int v : {out.lambda, out.lambda + 1, out.nu, out.xi, out.xi + 1}) sign.push_back(AffineExpr::var(v));
    p.add(ConeKind::nonneg, std::move(sign), "sign");

    std::vector<std::pair<int, RMatrix>> blocks;
    for (int k = 0; k < 2; ++k)
        blocks.emplace_back(out.lambda + k, embed_hermitian(s * (aset.matrix(k, 0) + aset.matrix(k, 1))));
    blocks.emplace_back(out.nu, embed_hermitian(s * aset.matrix(0, 0)));
    for (int k = 0; k < 2; ++k)
        blocks.emplace_back(out.xi + k, embed_hermitian(s * (aset.matrix(k, 1) - g2 * aset.matrix(k, 0))));

    const int side = 2 * n;
    std::vector<AffineExpr> rows(svec_dim(side));
    for (int j = 0; j < side; ++j)
        for (int i = j; i < side; ++i) {
            AffineExpr& r = rows[svec_index(side, i, j)];
            const double f = i == j ? 1.0 : std::sqrt(2.0);
            if (i == j) r.add(out.y + i % n, 1.0);
            for (const auto& [var, mat] : blocks) {
                const double v = mat(i, j);
                if (v != 0.0) r.add(var, -f * v);
            }
        }
    out.psd_block = p.add(ConeKind::psd, std::move(rows), "certificate");
    return out;
}

SdrResult solve_sdr(const AMatrixSet& aset, const SystemConfig& cfg, const SolverSettings& settings) {
    const SdrProgram sp = build_sdr(aset, cfg);
    const ConicSolution sol = solve(sp.program, settings);
    if (sol.status == SolveStatus::unbounded) throw SdrInfeasible("phase relaxation is infeasible");
    if (!sol.ok())
        throw SdrInfeasible("phase relaxation not solved: " + to_string(sol.status) + " (" + sol.stats.message + ")");

    SdrResult r;
    r.stats = sol.stats;
    CMatrix V = embed_hermitian_adjoint(smat(sol.duals[sp.psd_block]));
    r.V = 0.5 * (V + V.adjoint());
    r.z2 = std::max(0.0, -sp.scale * sol.objective_value);

    Eigen::SelfAdjointEigenSolver<CMatrix> es(r.V, Eigen::EigenvaluesOnly);
    r.eigenvalues = es.eigenvalues().reverse();
    const double l1 = r.eigenvalues[0];
    r.eig_ratio = r.eigenvalues.size() > 1 && l1 > 0.0 ? std::max(0.0, r.eigenvalues[1]) / l1 : 0.0;
    r.rank_one = r.eig_ratio <= kRankOneTol;
    return r;
}

namespace {

std::array<std::array<double, 2>, 2> powers(const CVector& u, const AMatrixSet& aset) {
    std::array<std::array<double, 2>, 2> p{};
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j) p[k][j] = std::norm(aset.inner(u, k, j));
    return p;
}

CVector canonical(const CVector& u) {
    CVector v(u.size());
    for (Eigen::Index n = 0; n < u.size(); ++n) {
        const double m = std::abs(u[n]);
        v[n] = m > 0.0 ? u[n] / m : cplx(1.0, 0.0);
    }
    if (v.size() > 0) v *= std::conj(v[0]);
    for (Eigen::Index n = 0; n < v.size(); ++n) v[n] /= std::abs(v[n]);
    if (v.size() > 0) v[0] = 1.0;
    return v;
}

}  // namespace

double phase_objective(const CVector& u, const AMatrixSet& aset, const SystemConfig& cfg) {
    const auto p = powers(u, aset);
    return std::min(p[0][0] + p[0][1], p[1][0] + p[1][1]) / cfg.noise_power;
}

bool phase_feasible(const CVector& u, const AMatrixSet& aset, const SystemConfig& cfg, double tol) {
    const auto p = powers(u, aset);
    const double s2 = cfg.noise_power;
    const double r1 = std::log2(1.0 + p[0][0] / s2);
    const double r21 = std::log2(1.0 + p[0][1] / (p[0][0] + s2));
    const double r22 = std::log2(1.0 + p[1][1] / (p[1][0] + s2));
    return r1 >= cfg.rate_min(0) - tol && r21 >= cfg.rate_min(1) - tol && r22 >= cfg.rate_min(1) - tol;
}

Recovery recover_rank_one(const CMatrix& V, const AMatrixSet& aset, const SystemConfig& cfg, Rng& rng,
                          const RandomizationSettings& settings) {
    const auto n = V.rows();
    if (V.cols() != n || n != aset.size()) throw DimensionError("V does not match the a vectors");
    const double tol = FeasibilityReport::kRateTol;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (V + V.adjoint()));
    const RVector lam = es.eigenvalues();
    const double l1 = lam[n - 1];
    const double ratio = n > 1 && l1 > 0.0 ? std::max(0.0, lam[n - 2]) / l1 : 0.0;

    Recovery out;
    const CVector principal = canonical(es.eigenvectors().col(n - 1));
    const bool principal_ok = phase_feasible(principal, aset, cfg, tol);
    if (ratio <= kRankOneTol && principal_ok) {
        out.u = PhaseState(principal);
        out.rank_one = true;
        out.candidates = 1;
        out.objective = phase_objective(principal, aset, cfg);
        return out;
    }

    CMatrix root = es.eigenvectors();
    for (Eigen::Index i = 0; i < n; ++i) root.col(i) *= std::sqrt(std::max(0.0, lam[i]));

    out.randomized = true;
    bool found = false;
    CVector best;
    double best_obj = -std::numeric_limits<double>::infinity();
    if (principal_ok) {
        best = principal;
        best_obj = phase_objective(principal, aset, cfg);
        found = true;
    }
    int stale = 0;
    CVector r(n);
    for (int l = 0; l < settings.candidates; ++l) {
        ++out.candidates;
        for (Eigen::Index i = 0; i < n; ++i) r[i] = rng.complex_normal();
        const CVector cand = canonical(root * r);
        if (!phase_feasible(cand, aset, cfg, tol)) continue;
        const double obj = phase_objective(cand, aset, cfg);
        if (obj > best_obj) {
            best_obj = obj;
            best = cand;
            found = true;
            stale = 0;
        } else if (++stale >= settings.patience) {
            break;
        }
    }
    if (!found) throw NoFeasibleCandidate("no randomization candidate meets the QoS constraints");
    out.u = PhaseState(best);
    out.objective = best_obj;
    return out;
}

PhaseState extract_rank_one(const CMatrix& V, const AMatrixSet& aset, const SystemConfig& cfg, Rng& rng,
                            const RandomizationSettings& settings) {
    return recover_rank_one(V, aset, cfg, rng, settings).u;
}

PhaseResult solve_phase(const ChannelSet& channel, const BeamformingState& w, const SystemConfig& cfg, Rng& rng,
                        const PhaseSettings& settings) {
    channel.validate(cfg);
    const AMatrixSet aset = build_a(channel, w);
    const auto start = std::chrono::steady_clock::now();
    const SdrResult sdr = solve_sdr(aset, cfg, settings.solver);
    PhaseResult out;
    out.sdr_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.z2 = sdr.z2;
    out.eig_ratio = sdr.eig_ratio;

    Recovery rec;
    try {
        rec = recover_rank_one(sdr.V, aset, cfg, rng, settings.randomization);
    } catch (const NoFeasibleCandidate& e) {
        throw SdrInfeasible(e.what());
    }
    out.rank_one = rec.rank_one;
    out.randomized = rec.randomized;
    out.candidates = rec.candidates;
    out.z2_achieved = rec.objective;
    out.phase = phase_from_sdr(rec.u.v());

    const double s2 = cfg.noise_power;
    const double sum1 = (sdr.V * (aset.matrix(0, 0) + aset.matrix(0, 1))).trace().real() / s2;
    out.k1_slack = sum1 - sdr.z2 > 1e-6 * std::max(1.0, sdr.z2);
    const auto p = powers(rec.u.v(), aset);
    out.order_premise = p[0][1] >= p[1][1];
    return out;
}

}  // namespace irsnoma
