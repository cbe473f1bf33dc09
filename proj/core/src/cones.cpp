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

#include "cones.hpp"

#include <cmath>
#include <numbers>

namespace irsnoma::detail {

void Cone::set_block(BlockColumns block) {
    block_ = std::move(block);
    dense_block_ = RMatrix::Zero(dim(), static_cast<Eigen::Index>(block_.cols.size()));
    for (std::size_t c = 0; c < block_.cols.size(); ++c)
        for (const auto& [r, v] : block_.cols[c].entries) dense_block_(r, static_cast<Eigen::Index>(c)) += v;
}

void Cone::add_congruence(double scale, RMatrix& q) const {
    const auto nc = dense_block_.cols();
    RMatrix hg(dim(), nc);
    for (Eigen::Index c = 0; c < nc; ++c) hess_prod(dense_block_.col(c).data(), hg.col(c).data());
    const RMatrix sub = dense_block_.transpose() * hg;
    for (Eigen::Index a = 0; a < nc; ++a)
        for (Eigen::Index b = 0; b < nc; ++b) q(block_.cols[a].j, block_.cols[b].j) += scale * sub(a, b);
}

// --- nonnegative orthant --------------------------------------------------------

void NonnegCone::central_point(double* s) const {
    for (int i = 0; i < d_; ++i) s[i] = 1.0;
}

bool NonnegCone::load(const double* s) {
    for (int i = 0; i < d_; ++i) {
        if (!(s[i] > 0.0)) return false;
        s_[i] = s[i];
    }
    return true;
}

void NonnegCone::gradient(double* g) const {
    for (int i = 0; i < d_; ++i) g[i] = -1.0 / s_[i];
}

void NonnegCone::hess_prod(const double* v, double* out) const {
    for (int i = 0; i < d_; ++i) out[i] = v[i] / (s_[i] * s_[i]);
}

double NonnegCone::inv_hess_quad(const double* v) const {
    double acc = 0.0;
    for (int i = 0; i < d_; ++i) acc += v[i] * v[i] * s_[i] * s_[i];
    return acc;
}

bool NonnegCone::dual_interior(const double* z) const {
    for (int i = 0; i < d_; ++i)
        if (!(z[i] > 0.0)) return false;
    return true;
}

void NonnegCone::add_congruence(double scale, RMatrix& q) const {
    const RVector w = s_.array().square().inverse().matrix();
    const RMatrix sub = dense_block_.transpose() * w.asDiagonal() * dense_block_;
    const auto nc = dense_block_.cols();
    for (Eigen::Index a = 0; a < nc; ++a)
        for (Eigen::Index b = 0; b < nc; ++b) q(block_.cols[a].j, block_.cols[b].j) += scale * sub(a, b);
}

// --- second-order cone ----------------------------------------------------------

void SocCone::central_point(double* s) const {
    s[0] = std::numbers::sqrt2;
    for (int i = 1; i < d_; ++i) s[i] = 0.0;
}

bool SocCone::load(const double* s) {
    for (int i = 0; i < d_; ++i) s_[i] = s[i];
    if (!(s_[0] > 0.0)) return false;
    const double nx = s_.tail(d_ - 1).norm();
    if (!(s_[0] > nx)) return false;
    disc_ = (s_[0] - nx) * (s_[0] + nx);
    if (!(disc_ > 0.0)) return false;
    js_ = -s_;
    js_[0] = s_[0];
    return true;
}

void SocCone::gradient(double* g) const {
    for (int i = 0; i < d_; ++i) g[i] = -2.0 * js_[i] / disc_;
}

void SocCone::hess_prod(const double* v, double* out) const {
    double jv = 0.0;
    for (int i = 0; i < d_; ++i) jv += js_[i] * v[i];
    const double c = 4.0 * jv / (disc_ * disc_);
    out[0] = -2.0 * v[0] / disc_ + c * js_[0];
    for (int i = 1; i < d_; ++i) out[i] = 2.0 * v[i] / disc_ + c * js_[i];
}

double SocCone::inv_hess_quad(const double* v) const {
    double sv = 0.0, vjv = v[0] * v[0];
    for (int i = 0; i < d_; ++i) sv += s_[i] * v[i];
    for (int i = 1; i < d_; ++i) vjv -= v[i] * v[i];
    return sv * sv - 0.5 * disc_ * vjv;
}

bool SocCone::dual_interior(const double* z) const {
    double nz = 0.0;
    for (int i = 1; i < d_; ++i) nz += z[i] * z[i];
    return z[0] > 0.0 && z[0] * z[0] > nz;
}

// --- exponential cone -----------------------------------------------------------

void ExpCone::central_point(double* s) const {
    s[0] = -0.827838399065679;
    s[1] = 0.805102001257564;
    s[2] = 1.290927709856958;
}

bool ExpCone::load(const double* s) {
    const double a = s[0], b = s[1], c = s[2];
    if (!(b > 0.0) || !(c > 0.0)) return false;
    const double lcb = std::log(c / b);
    const double psi = b * lcb - a;
    if (!(psi > 0.0)) return false;
    s_ = {a, b, c};
    const Eigen::Vector3d dpsi(-1.0, lcb - 1.0, b / c);
    g_ = -dpsi / psi;
    g_[1] -= 1.0 / b;
    g_[2] -= 1.0 / c;
    Eigen::Matrix3d d2 = Eigen::Matrix3d::Zero();
    d2(1, 1) = -1.0 / b;
    d2(1, 2) = d2(2, 1) = 1.0 / c;
    d2(2, 2) = -b / (c * c);
    h_ = dpsi * dpsi.transpose() / (psi * psi) - d2 / psi;
    h_(1, 1) += 1.0 / (b * b);
    h_(2, 2) += 1.0 / (c * c);
    hfac_.compute(h_);
    return hfac_.info() == Eigen::Success;
}

void ExpCone::gradient(double* g) const {
    for (int i = 0; i < 3; ++i) g[i] = g_[i];
}

void ExpCone::hess_prod(const double* v, double* out) const {
    const Eigen::Vector3d r = h_ * Eigen::Vector3d(v[0], v[1], v[2]);
    for (int i = 0; i < 3; ++i) out[i] = r[i];
}

double ExpCone::inv_hess_quad(const double* v) const {
    const Eigen::Vector3d vv(v[0], v[1], v[2]);
    return vv.dot(hfac_.solve(vv));
}

bool ExpCone::dual_interior(const double* z) const {
    const double u = z[0], v = z[1], w = z[2];
    if (!(u < 0.0) || !(w > 0.0)) return false;
    return std::log(w) > std::log(-u) + v / u - 1.0;
}

// --- positive semidefinite cone ---------------------------------------------------

PsdCone::PsdCone(int side) : side_(side) {}

RMatrix PsdCone::unpack(const double* v) const {
    RMatrix m(side_, side_);
    int k = 0;
    for (int j = 0; j < side_; ++j)
        for (int i = j; i < side_; ++i, ++k) {
            const double a = i == j ? v[k] : v[k] / std::numbers::sqrt2;
            m(i, j) = a;
            m(j, i) = a;
        }
    return m;
}

void PsdCone::pack(const RMatrix& m, double* out) const {
    int k = 0;
    for (int j = 0; j < side_; ++j)
        for (int i = j; i < side_; ++i, ++k)
            out[k] = i == j ? m(i, j) : std::numbers::sqrt2 * 0.5 * (m(i, j) + m(j, i));
}

void PsdCone::central_point(double* s) const {
    int k = 0;
    for (int j = 0; j < side_; ++j)
        for (int i = j; i < side_; ++i, ++k) s[k] = i == j ? 1.0 : 0.0;
}

bool PsdCone::load(const double* s) {
    s_ = unpack(s);
    Eigen::LLT<RMatrix> llt(s_);
    if (llt.info() != Eigen::Success) return false;
    l_ = llt.matrixL();
    if (!(l_.diagonal().minCoeff() > 0.0)) return false;
    inv_ = llt.solve(RMatrix::Identity(side_, side_));
    inv_ = 0.5 * (inv_ + inv_.transpose());
    return true;
}

void PsdCone::gradient(double* g) const {
    pack(-inv_, g);
}

void PsdCone::hess_prod(const double* v, double* out) const {
    const RMatrix m = unpack(v);
    pack(inv_ * m * inv_, out);
}

double PsdCone::inv_hess_quad(const double* v) const {
    const RMatrix m = unpack(v);
    return (l_.transpose() * m * l_).squaredNorm();
}

bool PsdCone::dual_interior(const double* z) const {
    Eigen::LLT<RMatrix> llt(unpack(z));
    return llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0.0;
}

void PsdCone::set_block(BlockColumns block) {
    block_ = std::move(block);
    std::vector<std::pair<int, int>> pos(static_cast<std::size_t>(dim()));
    int k = 0;
    for (int j = 0; j < side_; ++j)
        for (int i = j; i < side_; ++i, ++k) pos[static_cast<std::size_t>(k)] = {i, j};
    col_entries_.assign(block_.cols.size(), {});
    col_dense_.assign(block_.cols.size(), false);
    for (std::size_t c = 0; c < block_.cols.size(); ++c) {
        auto& e = col_entries_[c];
        for (const auto& [r, v] : block_.cols[c].entries) {
            const auto [i, j] = pos[static_cast<std::size_t>(r)];
            if (i == j) {
                e.push_back({i, i, v});
            } else {
                e.push_back({i, j, v / std::numbers::sqrt2});
                e.push_back({j, i, v / std::numbers::sqrt2});
            }
        }
        col_dense_[c] = e.size() > static_cast<std::size_t>(2 * side_);
    }
}

void PsdCone::add_congruence(double scale, RMatrix& q) const {
    const std::size_t nc = col_entries_.size();
    for (std::size_t a = 0; a < nc; ++a) {
        const int ja = block_.cols[a].j;
        if (col_dense_[a]) {
            RMatrix m = RMatrix::Zero(side_, side_);
            for (const auto& e : col_entries_[a]) m(e.p, e.q) += e.w;
            const RMatrix t = inv_ * m * inv_;
            for (std::size_t b = 0; b < nc; ++b) {
                if (col_dense_[b] && b < a) continue;
                double val = 0.0;
                for (const auto& e : col_entries_[b]) val += e.w * t(e.p, e.q);
                const int jb = block_.cols[b].j;
                q(ja, jb) += scale * val;
                if (b != a) q(jb, ja) += scale * val;
            }
        } else {
            for (std::size_t b = a; b < nc; ++b) {
                if (col_dense_[b]) continue;
                double val = 0.0;
                for (const auto& e1 : col_entries_[a])
                    for (const auto& e2 : col_entries_[b]) val += e1.w * e2.w * inv_(e1.q, e2.p) * inv_(e2.q, e1.p);
                const int jb = block_.cols[b].j;
                q(ja, jb) += scale * val;
                if (b != a) q(jb, ja) += scale * val;
            }
        }
    }
}

}  // namespace irsnoma::detail
