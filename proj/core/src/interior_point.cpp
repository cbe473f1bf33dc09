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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <memory>
#include <numbers>

#include <Eigen/QR>
#include <Eigen/SparseCore>

#include "cones.hpp"
#include "irsnoma/conic.hpp"

namespace irsnoma {

namespace {

using detail::BlockColumns;
using detail::Cone;
using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor>;

struct BlockMap {
    ConeKind kind;
    int offset;  // row offset in the equality system (zero) or in s (others)
    int dim;
};

/// min c'x  s.t.  A x = b,  G x + s = h,  s in K, stored both as given and
/// after equilibration x = D xs, rows scaled by E (one factor per cone block).
struct StandardForm {
    int n = 0;
    RMatrix a;  // original
    RVector b;
    SpMat g;
    RVector h;
    RVector c;
    RMatrix as;  // scaled
    RVector bs;
    SpMat gs;
    RVector hs;
    RVector cs;
    RVector d, e_eq, e_cone;
    std::vector<std::unique_ptr<Cone>> cones;
    std::vector<int> cone_offset;
    std::vector<BlockMap> blocks;
    std::vector<int> kept_rows;  // independent equality rows
    double nu = 1.0;
    double c_scale = 1.0;  // c is stored as c_scale * (given objective)
};

void equilibrate(StandardForm& f) {
    const int n = f.n;
    const auto p = f.a.rows();
    const auto m = f.h.size();
    f.d = RVector::Ones(n);
    f.e_eq = RVector::Ones(p);
    f.e_cone = RVector::Ones(m);
    RMatrix as = f.a;
    SpMat gs = f.g;
    std::vector<std::pair<int, int>> cone_rows;  // [begin, end) per cone block
    for (const auto& bm : f.blocks)
        if (bm.kind != ConeKind::zero) cone_rows.emplace_back(bm.offset, bm.offset + bm.dim);
    std::vector<int> row_block(static_cast<std::size_t>(m), 0);
    for (std::size_t k = 0; k < cone_rows.size(); ++k)
        for (int r = cone_rows[k].first; r < cone_rows[k].second; ++r) row_block[static_cast<std::size_t>(r)] = static_cast<int>(k);

    for (int pass = 0; pass < 12; ++pass) {
        RVector colmax = p > 0 ? RVector(as.cwiseAbs().colwise().maxCoeff().transpose()) : RVector::Zero(n);
        RVector blockmax = RVector::Zero(static_cast<Eigen::Index>(cone_rows.size()));
        for (int j = 0; j < gs.outerSize(); ++j)
            for (SpMat::InnerIterator it(gs, j); it; ++it) {
                const double v = std::abs(it.value());
                colmax[j] = std::max(colmax[j], v);
                auto& bm = blockmax[row_block[static_cast<std::size_t>(it.row())]];
                bm = std::max(bm, v);
            }
        RVector eqmax = p > 0 ? RVector(as.cwiseAbs().rowwise().maxCoeff()) : RVector::Zero(0);
        RVector dc(n), ec(m), ee(p);
        for (int j = 0; j < n; ++j) dc[j] = colmax[j] > 0.0 ? 1.0 / std::sqrt(colmax[j]) : 1.0;
        for (Eigen::Index i = 0; i < p; ++i) ee[i] = eqmax[i] > 0.0 ? 1.0 / std::sqrt(eqmax[i]) : 1.0;
        for (Eigen::Index r = 0; r < m; ++r) {
            const double bmx = blockmax[row_block[static_cast<std::size_t>(r)]];
            ec[r] = bmx > 0.0 ? 1.0 / std::sqrt(bmx) : 1.0;
        }
        for (int j = 0; j < n; ++j) dc[j] = std::clamp(f.d[j] * dc[j], 1e-8, 1e8) / f.d[j];
        f.d = f.d.cwiseProduct(dc);
        f.e_eq = f.e_eq.cwiseProduct(ee);
        f.e_cone = f.e_cone.cwiseProduct(ec);
        if (p > 0) as = ee.asDiagonal() * as * dc.asDiagonal();
        gs = ec.asDiagonal() * gs * dc.asDiagonal();
    }
    f.as = as;
    f.gs = gs;
    f.bs = f.e_eq.cwiseProduct(f.b);
    f.hs = f.e_cone.cwiseProduct(f.h);
    f.cs = f.d.cwiseProduct(f.c);
}

StandardForm build_standard_form(const ConicProgram& p) {
    StandardForm f;
    f.n = p.num_vars();
    f.c = RVector::Zero(f.n);
    for (const auto& [j, v] : p.objective().compressed().terms) f.c[j] = -v;
    const double cmax = f.c.size() > 0 ? f.c.cwiseAbs().maxCoeff() : 0.0;
    if (cmax > 0.0) f.c_scale = 1.0 / cmax;
    f.c *= f.c_scale;

    int n_eq = 0, n_cone = 0;
    for (const auto& con : p.constraints()) {
        if (con.kind == ConeKind::zero) {
            f.blocks.push_back({con.kind, n_eq, con.dim()});
            n_eq += con.dim();
        } else {
            f.blocks.push_back({con.kind, n_cone, con.dim()});
            n_cone += con.dim();
        }
    }

    f.a = RMatrix::Zero(n_eq, f.n);
    f.b = RVector::Zero(n_eq);
    f.h = RVector::Zero(n_cone);
    std::vector<Eigen::Triplet<double>> trip;

    const double r2 = 1.0 / std::numbers::sqrt2;
    for (std::size_t bi = 0; bi < p.constraints().size(); ++bi) {
        const auto& con = p.constraints()[bi];
        const auto& bm = f.blocks[bi];
        if (con.kind == ConeKind::zero) {
            for (int i = 0; i < con.dim(); ++i) {
                for (const auto& [j, v] : con.rows[i].terms) f.a(bm.offset + i, j) += v;
                f.b[bm.offset + i] = -con.rows[i].constant;
            }
            continue;
        }
        std::vector<AffineExpr> rows = con.rows;
        if (con.kind == ConeKind::rsoc) {
            const AffineExpr u = rows[0], v = rows[1];
            rows[0] = (r2 * (u + v)).compressed();
            rows[1] = (r2 * (u - v)).compressed();
        }
        for (int i = 0; i < con.dim(); ++i) {
            for (const auto& [j, v] : rows[i].terms) trip.emplace_back(bm.offset + i, j, -v);
            f.h[bm.offset + i] = rows[i].constant;
        }
    }
    f.g.resize(n_cone, f.n);
    f.g.setFromTriplets(trip.begin(), trip.end());
    f.g.makeCompressed();

    equilibrate(f);

    // cone oracles over the scaled blocks
    std::vector<BlockColumns> cols(f.blocks.size());
    std::vector<int> block_of_row(static_cast<std::size_t>(n_cone), -1);
    for (std::size_t bi = 0; bi < f.blocks.size(); ++bi)
        if (f.blocks[bi].kind != ConeKind::zero)
            for (int r = 0; r < f.blocks[bi].dim; ++r)
                block_of_row[static_cast<std::size_t>(f.blocks[bi].offset + r)] = static_cast<int>(bi);
    for (int j = 0; j < f.gs.outerSize(); ++j)
        for (SpMat::InnerIterator it(f.gs, j); it; ++it) {
            const int bi = block_of_row[static_cast<std::size_t>(it.row())];
            auto& bc = cols[static_cast<std::size_t>(bi)].cols;
            if (bc.empty() || bc.back().j != j) bc.push_back({j, {}});
            bc.back().entries.emplace_back(static_cast<int>(it.row()) - f.blocks[static_cast<std::size_t>(bi)].offset,
                                           it.value());
        }
    for (std::size_t bi = 0; bi < f.blocks.size(); ++bi) {
        const auto& bm = f.blocks[bi];
        std::unique_ptr<Cone> cone;
        switch (bm.kind) {
            case ConeKind::zero: continue;
            case ConeKind::nonneg: cone = std::make_unique<detail::NonnegCone>(bm.dim); break;
            case ConeKind::soc:
            case ConeKind::rsoc: cone = std::make_unique<detail::SocCone>(bm.dim); break;
            case ConeKind::exp: cone = std::make_unique<detail::ExpCone>(); break;
            case ConeKind::psd: cone = std::make_unique<detail::PsdCone>(svec_side(bm.dim)); break;
        }
        cone->set_block(std::move(cols[bi]));
        f.nu += cone->nu();
        f.cone_offset.push_back(bm.offset);
        f.cones.push_back(std::move(cone));
    }

    if (n_eq > 0) {
        Eigen::ColPivHouseholderQR<RMatrix> qr(f.as.transpose());
        qr.setThreshold(1e-12);
        const auto rank = qr.rank();
        for (Eigen::Index i = 0; i < rank; ++i) f.kept_rows.push_back(qr.colsPermutation().indices()[i]);
        std::sort(f.kept_rows.begin(), f.kept_rows.end());
    }
    return f;
}

struct Point {
    RVector x, y, z, s;
    double tau = 1.0, kappa = 1.0;
};

struct Direction {
    RVector x, y, z, s;
    double tau = 0.0, kappa = 0.0;
};

class Solver {
public:
    Solver(const StandardForm& f, const SolverSettings& st) : f_(f), st_(st) {
        const auto p = static_cast<int>(f.kept_rows.size());
        a_ = RMatrix(p, f.n);
        b_ = RVector(p);
        for (int i = 0; i < p; ++i) {
            a_.row(i) = f.as.row(f.kept_rows[i]);
            b_[i] = f.bs[f.kept_rows[i]];
        }
        m_ = static_cast<int>(f.h.size());
        if (p > 0) {
            Eigen::HouseholderQR<RMatrix> qr(a_.transpose());
            const RMatrix qfull = qr.householderQ() * RMatrix::Identity(f.n, f.n);
            yb_ = qfull.leftCols(p);
            zb_ = qfull.rightCols(f.n - p);
            r_ = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
        } else {
            zb_ = RMatrix::Identity(f.n, f.n);
        }
    }

    ConicSolution run();

private:
    bool load(const RVector& s);
    Eigen::Map<const RVector> blk(const RVector& v, std::size_t k) const {
        return {v.data() + f_.cone_offset[k], f_.cones[k]->dim()};
    }
    RVector hess(const RVector& v) const;
    RVector grad() const;
    bool factor(double mu);
    void kkt_solve(const RVector& rhs_x, const RVector& rhs_y, RVector& dx, RVector& dy) const;
    void kkt_solve_once(const RVector& rhs_x, const RVector& rhs_y, RVector& dx, RVector& dy) const;
    Direction direction(const Point& pt, double mu, const RVector& rx, const RVector& ry, const RVector& rz,
                        double rtau, const RVector& rs, double rkappa);
    double proximity(const Point& pt, double& mu_out);

    const StandardForm& f_;
    const SolverSettings& st_;
    RMatrix a_;
    RVector b_;
    int m_ = 0;
    RMatrix yb_, zb_, r_;
    RMatrix q_;
    Eigen::LLT<RMatrix> llt_;
    Eigen::LDLT<RMatrix> ldlt_;
    bool use_ldlt_ = false;
    RMatrix zqz_;
};

bool Solver::load(const RVector& s) {
    for (std::size_t k = 0; k < f_.cones.size(); ++k)
        if (!f_.cones[k]->load(s.data() + f_.cone_offset[k])) return false;
    return true;
}

RVector Solver::hess(const RVector& v) const {
    RVector out(m_);
    for (std::size_t k = 0; k < f_.cones.size(); ++k)
        f_.cones[k]->hess_prod(v.data() + f_.cone_offset[k], out.data() + f_.cone_offset[k]);
    return out;
}

RVector Solver::grad() const {
    RVector g(m_);
    for (std::size_t k = 0; k < f_.cones.size(); ++k) f_.cones[k]->gradient(g.data() + f_.cone_offset[k]);
    return g;
}

bool Solver::factor(double mu) {
    q_ = RMatrix::Zero(f_.n, f_.n);
    for (const auto& cone : f_.cones) cone->add_congruence(mu, q_);
    zqz_ = zb_.transpose() * q_ * zb_;
    zqz_ = 0.5 * (zqz_ + zqz_.transpose());
    if (zqz_.rows() == 0) return true;
    use_ldlt_ = false;
    llt_.compute(zqz_);
    if (llt_.info() == Eigen::Success) return true;
    const double reg = 1e-13 * std::max(1.0, zqz_.diagonal().cwiseAbs().maxCoeff());
    RMatrix reg_m = zqz_;
    reg_m.diagonal().array() += reg;
    llt_.compute(reg_m);
    if (llt_.info() == Eigen::Success) return true;
    ldlt_.compute(zqz_);
    use_ldlt_ = true;
    return ldlt_.info() == Eigen::Success;
}

void Solver::kkt_solve(const RVector& rhs_x, const RVector& rhs_y, RVector& dx, RVector& dy) const {
    kkt_solve_once(rhs_x, rhs_y, dx, dy);
    const auto p = a_.rows();
    for (int round = 0; round < 2; ++round) {
        RVector ex = rhs_x - q_ * dx;
        if (p > 0) ex -= a_.transpose() * dy;
        const RVector ey = p > 0 ? RVector(rhs_y - a_ * dx) : RVector::Zero(0);
        RVector cx, cy;
        kkt_solve_once(ex, ey, cx, cy);
        dx += cx;
        dy += cy;
    }
}

void Solver::kkt_solve_once(const RVector& rhs_x, const RVector& rhs_y, RVector& dx, RVector& dy) const {
    const auto p = a_.rows();
    RVector xy = RVector::Zero(p);
    if (p > 0) xy = r_.transpose().triangularView<Eigen::Lower>().solve(rhs_y);
    dx = yb_.cols() > 0 ? RVector(yb_ * xy) : RVector::Zero(f_.n);
    if (zb_.cols() > 0) {
        const RVector rhs = zb_.transpose() * (rhs_x - q_ * dx);
        const RVector u = use_ldlt_ ? RVector(ldlt_.solve(rhs)) : RVector(llt_.solve(rhs));
        dx += zb_ * u;
    }
    dy = RVector::Zero(p);
    if (p > 0) dy = r_.triangularView<Eigen::Upper>().solve(yb_.transpose() * (rhs_x - q_ * dx));
}

Direction Solver::direction(const Point& pt, double mu, const RVector& rx, const RVector& ry, const RVector& rz,
                            double rtau, const RVector& rs, double rkappa) {
    // ds = -G dx + h dtau - rz;  dz = rs - mu H ds;  dkappa = (rkappa - kappa dtau) / tau
    const RVector t1 = rs + mu * hess(rz);
    RVector dx1, dy1, dx2, dy2;
    kkt_solve(rx - f_.gs.transpose() * t1, -ry, dx1, dy1);
    const RVector hh = hess(f_.hs);
    const RVector cg = f_.cs - mu * (f_.gs.transpose() * hh);
    const RVector cp = f_.cs + mu * (f_.gs.transpose() * hh);
    kkt_solve(-cg, b_, dx2, dy2);
    const double num = rtau + f_.hs.dot(t1) + rkappa / pt.tau + cp.dot(dx1) + b_.dot(dy1);
    // equals mu hs'H hs + kappa/tau - cp'dx2 - b'dy2 by the second solve, without cancellation
    const RVector r2 = f_.hs - f_.gs * dx2;
    const double den = mu * r2.dot(hess(r2)) + pt.kappa / pt.tau;
    Direction d;
    d.tau = num / den;
    d.x = dx1 + d.tau * dx2;
    d.y = dy1 + d.tau * dy2;
    d.s = -(f_.gs * d.x) + d.tau * f_.hs - rz;
    d.z = rs - mu * hess(d.s);
    d.kappa = (rkappa - pt.kappa * d.tau) / pt.tau;
    return d;
}

/// Loads cones at pt.s; returns the largest proximity measure or +inf.
double Solver::proximity(const Point& pt, double& mu_out) {
    if (!(pt.tau > 0.0) || !(pt.kappa > 0.0)) return std::numeric_limits<double>::infinity();
    const double mu = (pt.s.dot(pt.z) + pt.tau * pt.kappa) / f_.nu;
    mu_out = mu;
    if (!(mu > 0.0) || !std::isfinite(mu)) return std::numeric_limits<double>::infinity();
    double worst = std::abs(pt.tau * pt.kappa / mu - 1.0);
    for (std::size_t k = 0; k < f_.cones.size(); ++k) {
        const auto& cone = f_.cones[k];
        const double* sk = pt.s.data() + f_.cone_offset[k];
        const double* zk = pt.z.data() + f_.cone_offset[k];
        if (!cone->load(sk)) return std::numeric_limits<double>::infinity();
        if (!cone->dual_interior(zk)) return std::numeric_limits<double>::infinity();
        RVector psi(cone->dim());
        cone->gradient(psi.data());
        for (int i = 0; i < cone->dim(); ++i) psi[i] += zk[i] / mu;
        const double q = cone->inv_hess_quad(psi.data());
        if (!std::isfinite(q)) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::sqrt(std::max(0.0, q)));
    }
    return worst;
}

ConicSolution Solver::run() {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const int n = f_.n;
    const auto p = a_.rows();

    Point pt;
    pt.x = RVector::Zero(n);
    pt.y = RVector::Zero(p);
    pt.s = RVector(m_);
    for (std::size_t k = 0; k < f_.cones.size(); ++k)
        f_.cones[k]->central_point(pt.s.data() + f_.cone_offset[k]);
    pt.z = pt.s;
    double mu = 1.0;
    proximity(pt, mu);

    ConicSolution sol;
    SolverStats& stats = sol.stats;
    SolveStatus status = SolveStatus::numerical_failure;
    bool done = false;
    int small_steps = 0;

    auto finish = [&](SolveStatus s, const std::string& msg) {
        status = s;
        stats.message = msg;
        done = true;
    };

    // unscaled views for the stopping tests
    RMatrix a_orig(a_.rows(), n);
    RVector b_orig(a_.rows());
    for (Eigen::Index i = 0; i < a_.rows(); ++i) {
        a_orig.row(i) = f_.a.row(f_.kept_rows[static_cast<std::size_t>(i)]);
        b_orig[i] = f_.b[f_.kept_rows[static_cast<std::size_t>(i)]];
    }
    RVector e_kept(a_.rows());
    for (Eigen::Index i = 0; i < a_.rows(); ++i) e_kept[i] = f_.e_eq[f_.kept_rows[static_cast<std::size_t>(i)]];
    const double nb = b_orig.norm(), nh = f_.h.norm(), nc = f_.c.norm();

    // best iterate so far, returned when the iteration breaks down
    double best_merit = std::numeric_limits<double>::infinity();
    bool cur_ok = false, best_ok = false;
    Point best = pt;
    SolverStats best_stats;
    for (int iter = 0; !done; ++iter) {
        stats.iterations = iter;
        const RVector x = f_.d.cwiseProduct(pt.x);
        const RVector y = e_kept.cwiseProduct(pt.y);
        const RVector z = f_.e_cone.cwiseProduct(pt.z);
        const RVector s = pt.s.cwiseQuotient(f_.e_cone);
        const double tau = pt.tau;

        const RVector gtz = f_.g.transpose() * z;
        const RVector aty = a_.rows() > 0 ? RVector(a_orig.transpose() * y) : RVector::Zero(n);
        const RVector ax = a_.rows() > 0 ? RVector(a_orig * x) : RVector::Zero(0);
        const RVector gx = f_.g * x;
        const double cx = f_.c.dot(x), by = b_orig.dot(y), hz = f_.h.dot(z);

        const double pres_eq =
            a_.rows() > 0 ? (ax - b_orig * tau).norm() / std::max({tau, ax.norm(), nb * tau}) : 0.0;
        const double pres_cone = m_ > 0 ? (gx + s - f_.h * tau).norm() / std::max({tau, gx.norm(), s.norm(), nh * tau}) : 0.0;
        const double pres = std::max(pres_eq, pres_cone);
        const double dres = (aty + gtz + f_.c * tau).norm() / std::max({tau, aty.norm(), gtz.norm(), nc * tau});
        const double pobj = cx / tau, dobj = -(by + hz) / tau;
        const double gap = s.dot(z) / (tau * tau);
        const double scale = std::max(1.0, std::min(std::abs(pobj), std::abs(dobj)));
        const double rel_gap = std::max(gap, std::abs(pobj - dobj)) / scale;
        stats.primal_residual = pres;
        stats.dual_residual = dres;
        stats.rel_gap = rel_gap;
        stats.mu = mu;
        cur_ok = pres <= st_.tol_feas_loose && dres <= st_.tol_feas_loose && rel_gap <= st_.tol_gap_loose;
        if (std::max({pres, dres, rel_gap}) < best_merit) {
            best_merit = std::max({pres, dres, rel_gap});
            best_ok = cur_ok;
            best = pt;
            best_stats = stats;
        }

        if (st_.verbose)
            std::fprintf(stderr, "%3d  pobj % .8e  dobj % .8e  pres %.2e  dres %.2e  gap %.2e  tau %.2e  kap %.2e  mu %.2e\n",
                         iter, pobj, dobj, pres, dres, rel_gap, pt.tau, pt.kappa, mu);

        if (best_ok && std::max({pres, dres, rel_gap}) > 100.0 * std::max(st_.tol_feas_loose, st_.tol_gap_loose)) {
            finish(SolveStatus::numerical_failure, "residuals diverging");
            break;
        }
        if (pres <= st_.tol_feas && dres <= st_.tol_feas && rel_gap <= st_.tol_gap) {
            finish(SolveStatus::optimal, "converged");
            break;
        }
        const double bz = -by - hz;
        if (bz > 0.0 && (aty + gtz).norm() <= st_.tol_infeas * bz * std::max(1.0, nc)) {
            finish(SolveStatus::infeasible, "primal infeasibility certificate");
            break;
        }
        if (cx < 0.0 && std::max(ax.norm() / std::max(1.0, nb), (gx + s).norm() / std::max(1.0, nh)) <=
                            st_.tol_infeas * (-cx)) {
            finish(SolveStatus::unbounded, "dual infeasibility certificate");
            break;
        }
        if (iter >= st_.max_iter) {
            finish(SolveStatus::numerical_failure, "iteration limit");
            break;
        }

        // residuals of the scaled system drive the Newton step
        const RVector rx = (a_.rows() > 0 ? RVector(a_.transpose() * pt.y) : RVector::Zero(n)) +
                           f_.gs.transpose() * pt.z + f_.cs * pt.tau;
        const RVector ry = (a_.rows() > 0 ? RVector(-(a_ * pt.x)) : RVector::Zero(0)) + b_ * pt.tau;
        const RVector rz = -(f_.gs * pt.x) + f_.hs * pt.tau - pt.s;
        const double rtau = -f_.cs.dot(pt.x) - b_.dot(pt.y) - f_.hs.dot(pt.z) - pt.kappa;

        if (!load(pt.s) || !factor(mu)) {
            finish(SolveStatus::numerical_failure, "linear system factorization failed");
            break;
        }
        const RVector g = grad();
        const Direction dp = direction(pt, mu, -rx, -ry, -rz, -rtau, -pt.z, -pt.tau * pt.kappa);
        const Direction dc = direction(pt, mu, RVector::Zero(n), RVector::Zero(p), RVector::Zero(m_), 0.0,
                                       -(pt.z + mu * g), mu - pt.tau * pt.kappa);

        static constexpr double kAlphas[] = {0.9999, 0.999, 0.995, 0.99, 0.98, 0.97, 0.95, 0.92, 0.9, 0.85, 0.8,
                                             0.7,    0.6,   0.5,   0.4,  0.3,  0.2,  0.1,  0.05, 0.02, 0.0};
        bool stepped = false;
        double used_alpha = 0.0;
        auto try_step = [&](double alpha, double beta) {
            Point c = pt;
            const double w_p = beta * alpha, w_c = beta * (1.0 - alpha);
            c.x += w_p * dp.x + w_c * dc.x;
            c.y += w_p * dp.y + w_c * dc.y;
            c.z += w_p * dp.z + w_c * dc.z;
            c.s += w_p * dp.s + w_c * dc.s;
            c.tau += w_p * dp.tau + w_c * dc.tau;
            c.kappa += w_p * dp.kappa + w_c * dc.kappa;
            double mu_c = 0.0;
            if (proximity(c, mu_c) <= st_.neighborhood) {
                pt = std::move(c);
                mu = mu_c;
                return true;
            }
            return false;
        };
        for (double alpha : kAlphas)
            if (try_step(alpha, 1.0)) {
                stepped = true;
                used_alpha = alpha;
                break;
            }
        if (!stepped)
            for (double beta = 0.5; beta > 1e-4; beta *= 0.5)
                if (try_step(0.0, beta)) {
                    stepped = true;
                    break;
                }
        if (!stepped) {
            finish(SolveStatus::numerical_failure, "no step found in neighborhood");
            break;
        }
        small_steps = used_alpha < 0.05 ? small_steps + 1 : 0;
        if (small_steps > 25) {
            finish(SolveStatus::numerical_failure, "stalled");
            break;
        }
    }

    if (status == SolveStatus::numerical_failure && (cur_ok || best_ok)) {
        status = SolveStatus::optimal;
        if (!cur_ok) {
            const std::string msg = stats.message;
            const int iterations = stats.iterations;
            pt = best;
            stats = best_stats;
            stats.message = msg;
            stats.iterations = iterations;
        }
        stats.inaccurate = true;
    }

    sol.status = status;
    const double inv_tau = status == SolveStatus::optimal ? 1.0 / pt.tau : 1.0;
    sol.x = f_.d.cwiseProduct(pt.x) * inv_tau;
    RVector y_full = RVector::Zero(f_.a.rows());
    for (std::size_t i = 0; i < f_.kept_rows.size(); ++i)
        y_full[f_.kept_rows[i]] = f_.e_eq[f_.kept_rows[i]] * pt.y[static_cast<Eigen::Index>(i)];
    y_full *= inv_tau / f_.c_scale;
    const RVector z = f_.e_cone.cwiseProduct(pt.z) * (inv_tau / f_.c_scale);
    const double r2 = 1.0 / std::numbers::sqrt2;
    for (const auto& bm : f_.blocks) {
        RVector d(bm.dim);
        if (bm.kind == ConeKind::zero) {
            d = -y_full.segment(bm.offset, bm.dim);
        } else {
            d = z.segment(bm.offset, bm.dim);
            if (bm.kind == ConeKind::rsoc) {
                const double t = d[0], u = d[1];
                d[0] = r2 * (t + u);
                d[1] = r2 * (t - u);
            }
        }
        sol.duals.push_back(std::move(d));
    }
    sol.objective_value = -f_.c.dot(sol.x) / f_.c_scale;
    stats.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    return sol;
}

}  // namespace

ConicSolution solve(const ConicProgram& p, const SolverSettings& settings) {
    p.validate();
    ConicSolution sol;
    try {
        const StandardForm f = build_standard_form(p);
        Solver solver(f, settings);
        sol = solver.run();
    } catch (const std::exception& e) {
        sol.status = SolveStatus::numerical_failure;
        sol.stats.message = std::string("solver exception: ") + e.what();
        sol.x = RVector::Zero(p.num_vars());
    }
    sol.objective_value += p.objective().constant;
    return sol;
}

}  // namespace irsnoma
