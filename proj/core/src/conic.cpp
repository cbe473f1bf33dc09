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

#include "irsnoma/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace irsnoma {

std::string to_string(ConeKind k) {
    switch (k) {
        case ConeKind::zero: return "zero";
        case ConeKind::nonneg: return "nonneg";
        case ConeKind::soc: return "soc";
        case ConeKind::rsoc: return "rsoc";
        case ConeKind::exp: return "exp";
        case ConeKind::psd: return "psd";
    }
    return "unknown";
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

// --- AffineExpr ---------------------------------------------------------------

AffineExpr AffineExpr::var(int index, double coeff) {
    AffineExpr e;
    e.terms.emplace_back(index, coeff);
    return e;
}

AffineExpr& AffineExpr::add(int index, double coeff) {
    terms.emplace_back(index, coeff);
    return *this;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    constant += o.constant;
    return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& o) {
    for (const auto& [j, a] : o.terms) terms.emplace_back(j, -a);
    constant -= o.constant;
    return *this;
}

AffineExpr& AffineExpr::operator*=(double s) {
    for (auto& t : terms) t.second *= s;
    constant *= s;
    return *this;
}

double AffineExpr::eval(const RVector& x) const {
    double v = constant;
    for (const auto& [j, a] : terms) v += a * x[j];
    return v;
}

AffineExpr AffineExpr::compressed() const {
    std::map<int, double> acc;
    for (const auto& [j, a] : terms) acc[j] += a;
    AffineExpr e(constant);
    for (const auto& [j, a] : acc)
        if (a != 0.0) e.terms.emplace_back(j, a);
    return e;
}

AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
AffineExpr operator-(AffineExpr a) { return a *= -1.0; }
AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
AffineExpr operator*(AffineExpr a, double s) { return a *= s; }

// --- ConicProgram -------------------------------------------------------------

int ConicProgram::add_var(std::string name) {
    if (name.empty()) name = "x" + std::to_string(var_names_.size());
    var_names_.push_back(std::move(name));
    return num_vars() - 1;
}

int ConicProgram::add_vars(int n, const std::string& prefix) {
    const int first = num_vars();
    for (int i = 0; i < n; ++i) add_var(prefix.empty() ? std::string{} : prefix + "[" + std::to_string(i) + "]");
    return first;
}

int ConicProgram::add(ConeKind kind, std::vector<AffineExpr> rows, std::string name) {
    for (auto& r : rows) r = r.compressed();
    constraints_.push_back({kind, std::move(rows), std::move(name)});
    return static_cast<int>(constraints_.size()) - 1;
}

int ConicProgram::count(ConeKind kind) const {
    return static_cast<int>(std::count_if(constraints_.begin(), constraints_.end(),
                                          [kind](const ConeConstraint& c) { return c.kind == kind; }));
}

void ConicProgram::validate() const {
    auto check_expr = [this](const AffineExpr& e, const std::string& where) {
        for (const auto& [j, a] : e.terms) {
            if (j < 0 || j >= num_vars())
                throw std::invalid_argument(where + ": variable index " + std::to_string(j) + " out of range");
            if (!std::isfinite(a)) throw std::invalid_argument(where + ": non-finite coefficient");
        }
        if (!std::isfinite(e.constant)) throw std::invalid_argument(where + ": non-finite constant");
    };
    check_expr(objective_, "objective");
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
        const auto& c = constraints_[i];
        const std::string where = "constraint " + std::to_string(i) + " (" + to_string(c.kind) + ")";
        const int d = c.dim();
        if (d < 1) throw std::invalid_argument(where + ": empty block");
        switch (c.kind) {
            case ConeKind::soc:
                if (d < 2) throw std::invalid_argument(where + ": needs dimension >= 2");
                break;
            case ConeKind::rsoc:
                if (d < 3) throw std::invalid_argument(where + ": needs dimension >= 3");
                break;
            case ConeKind::exp:
                if (d != 3) throw std::invalid_argument(where + ": must be 3-dimensional");
                break;
            case ConeKind::psd:
                if (svec_side(d) < 1) throw std::invalid_argument(where + ": dimension is not triangular");
                break;
            default: break;
        }
        for (const auto& r : c.rows) check_expr(r, where);
    }
}

double ConicProgram::max_violation(const RVector& x) const {
    double worst = 0.0;
    for (const auto& c : constraints_) {
        RVector r(c.dim());
        for (int i = 0; i < c.dim(); ++i) r[i] = c.rows[i].eval(x);
        double v = 0.0;
        switch (c.kind) {
            case ConeKind::zero: v = r.cwiseAbs().maxCoeff(); break;
            case ConeKind::nonneg: v = std::max(0.0, -r.minCoeff()); break;
            case ConeKind::soc: v = std::max(0.0, r.tail(r.size() - 1).norm() - r[0]); break;
            case ConeKind::rsoc: {
                const double t = (r[0] + r[1]) / std::numbers::sqrt2;
                const double y = (r[0] - r[1]) / std::numbers::sqrt2;
                const double nx = std::hypot(y, r.tail(r.size() - 2).norm());
                v = std::max({0.0, nx - t, -r[0], -r[1]});
                break;
            }
            case ConeKind::exp: {
                const double a = r[0], b = r[1], cc = r[2];
                if (b > 0.0) {
                    const double e = a / b;
                    v = e > 700.0 ? std::numeric_limits<double>::infinity()
                                  : std::max(0.0, b * std::exp(e) - cc);
                } else {
                    v = std::max({0.0, -b, a, -cc});
                }
                break;
            }
            case ConeKind::psd: {
                const RMatrix s = smat(r);
                Eigen::SelfAdjointEigenSolver<RMatrix> es(s, Eigen::EigenvaluesOnly);
                v = std::max(0.0, -es.eigenvalues()[0]);
                break;
            }
        }
        worst = std::max(worst, v);
    }
    return worst;
}

// --- embeddings ---------------------------------------------------------------

ComplexVar ComplexVar::add_to(ConicProgram& p, int n, const std::string& name) {
    ComplexVar v;
    v.n = n;
    v.offset = p.add_vars(n, "Re " + name);
    p.add_vars(n, "Im " + name);
    return v;
}

RVector embed_complex(const CVector& z) {
    RVector x(2 * z.size());
    x.head(z.size()) = z.real();
    x.tail(z.size()) = z.imag();
    return x;
}

CVector extract_complex(const RVector& x, const ComplexVar& v) {
    CVector z(v.n);
    for (int i = 0; i < v.n; ++i) z[i] = cplx(x[v.re(i)], x[v.im(i)]);
    return z;
}

CVector extract_complex(const RVector& stacked) {
    if (stacked.size() % 2 != 0) throw DimensionError("stacked complex vector must have even length");
    return extract_complex(stacked, ComplexVar{0, static_cast<int>(stacked.size() / 2)});
}

AffineExpr re_inner(const CVector& a, const ComplexVar& z) {
    if (a.size() != z.n) throw DimensionError("re_inner: length mismatch");
    AffineExpr e;
    for (int i = 0; i < z.n; ++i) {
        e.add(z.re(i), a[i].real());
        e.add(z.im(i), a[i].imag());
    }
    return e.compressed();
}

AffineExpr im_inner(const CVector& a, const ComplexVar& z) {
    if (a.size() != z.n) throw DimensionError("im_inner: length mismatch");
    AffineExpr e;
    for (int i = 0; i < z.n; ++i) {
        e.add(z.im(i), a[i].real());
        e.add(z.re(i), -a[i].imag());
    }
    return e.compressed();
}

std::vector<AffineExpr> embedded_rows(const ComplexVar& z, double scale) {
    std::vector<AffineExpr> rows;
    rows.reserve(2 * z.n);
    for (int i = 0; i < z.n; ++i) rows.push_back(AffineExpr::var(z.re(i), scale));
    for (int i = 0; i < z.n; ++i) rows.push_back(AffineExpr::var(z.im(i), scale));
    return rows;
}

RMatrix embed_hermitian(const CMatrix& v) {
    const auto n = v.rows();
    if (v.cols() != n) throw DimensionError("embed_hermitian: matrix must be square");
    RMatrix b(2 * n, 2 * n);
    b.topLeftCorner(n, n) = v.real();
    b.topRightCorner(n, n) = -v.imag();
    b.bottomLeftCorner(n, n) = v.imag();
    b.bottomRightCorner(n, n) = v.real();
    return b;
}

CMatrix extract_hermitian(const RMatrix& b) {
    if (b.rows() != b.cols() || b.rows() % 2 != 0) throw DimensionError("extract_hermitian: need 2n x 2n");
    const auto n = b.rows() / 2;
    const RMatrix re = 0.5 * (b.topLeftCorner(n, n) + b.bottomRightCorner(n, n));
    const RMatrix im = 0.5 * (b.bottomLeftCorner(n, n) - b.topRightCorner(n, n));
    CMatrix v(n, n);
    v.real() = re;
    v.imag() = im;
    return v;
}

CMatrix embed_hermitian_adjoint(const RMatrix& m) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0) throw DimensionError("embed_hermitian_adjoint: need 2n x 2n");
    const auto n = m.rows() / 2;
    const RMatrix re = m.topLeftCorner(n, n) + m.bottomRightCorner(n, n);
    const RMatrix im = m.bottomLeftCorner(n, n) - m.topRightCorner(n, n);
    CMatrix x(n, n);
    x.real() = 0.5 * (re + re.transpose());
    x.imag() = 0.5 * (im - im.transpose());
    return x;
}

int svec_dim(int n) { return n * (n + 1) / 2; }

int svec_side(int dim) {
    const int n = static_cast<int>(std::lround((std::sqrt(8.0 * dim + 1.0) - 1.0) / 2.0));
    return svec_dim(n) == dim ? n : -1;
}

int svec_index(int n, int i, int j) {
    if (i < j) std::swap(i, j);
    // columns 0..j-1 hold n + (n-1) + ... + (n-j+1) entries
    return j * n - j * (j - 1) / 2 + (i - j);
}

RVector svec(const RMatrix& s) {
    const int n = static_cast<int>(s.rows());
    RVector v(svec_dim(n));
    int k = 0;
    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) v[k++] = i == j ? s(i, j) : std::numbers::sqrt2 * 0.5 * (s(i, j) + s(j, i));
    return v;
}

RMatrix smat(const RVector& v) {
    const int n = svec_side(static_cast<int>(v.size()));
    if (n < 0) throw DimensionError("smat: length is not a triangular number");
    RMatrix s(n, n);
    int k = 0;
    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) {
            const double a = i == j ? v[k] : v[k] / std::numbers::sqrt2;
            s(i, j) = a;
            s(j, i) = a;
            ++k;
        }
    return s;
}

// --- CBF export ---------------------------------------------------------------

void write_cbf(const ConicProgram& p, std::ostream& os) {
    p.validate();
    os.precision(17);
    os << "VER\n3\n\nOBJSENSE\nMAX\n\n";
    os << "VAR\n" << p.num_vars() << " 1\nF " << p.num_vars() << "\n\n";

    std::vector<const AffineExpr*> rows;
    std::vector<std::pair<std::string, int>> cones;
    std::vector<const ConeConstraint*> psd;
    for (const auto& c : p.constraints()) {
        switch (c.kind) {
            case ConeKind::zero: cones.emplace_back("L=", c.dim()); break;
            case ConeKind::nonneg: cones.emplace_back("L+", c.dim()); break;
            case ConeKind::soc: cones.emplace_back("Q", c.dim()); break;
            case ConeKind::rsoc: cones.emplace_back("QR", c.dim()); break;
            case ConeKind::exp: cones.emplace_back("EXP", 3); break;
            case ConeKind::psd: psd.push_back(&c); continue;
        }
        if (c.kind == ConeKind::exp) {
            for (int i : {2, 1, 0}) rows.push_back(&c.rows[i]);
        } else {
            for (const auto& r : c.rows) rows.push_back(&r);
        }
    }
    if (!psd.empty()) {
        os << "PSDCON\n" << psd.size() << "\n";
        for (const auto* c : psd) os << svec_side(c->dim()) << "\n";
        os << "\n";
    }
    if (!rows.empty()) {
        os << "CON\n" << rows.size() << " " << cones.size() << "\n";
        for (const auto& [name, d] : cones) os << name << " " << d << "\n";
        os << "\n";
    }

    const AffineExpr obj = p.objective().compressed();
    os << "OBJACOORD\n" << obj.terms.size() << "\n";
    for (const auto& [j, a] : obj.terms) os << j << " " << a << "\n";
    os << "\n";
    if (obj.constant != 0.0) os << "OBJBCOORD\n" << obj.constant << "\n\n";

    if (!rows.empty()) {
        std::size_t nnz = 0, nb = 0;
        for (const auto* r : rows) {
            nnz += r->terms.size();
            nb += r->constant != 0.0 ? 1 : 0;
        }
        os << "ACOORD\n" << nnz << "\n";
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (const auto& [j, a] : rows[i]->terms) os << i << " " << j << " " << a << "\n";
        os << "\nBCOORD\n" << nb << "\n";
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i]->constant != 0.0) os << i << " " << rows[i]->constant << "\n";
        os << "\n";
    }

    if (!psd.empty()) {
        std::vector<std::string> h, d;
        for (std::size_t ci = 0; ci < psd.size(); ++ci) {
            const int n = svec_side(psd[ci]->dim());
            int k = 0;
            for (int jj = 0; jj < n; ++jj)
                for (int ii = jj; ii < n; ++ii, ++k) {
                    const double s = ii == jj ? 1.0 : 1.0 / std::numbers::sqrt2;
                    const AffineExpr& e = psd[ci]->rows[k];
                    std::ostringstream line;
                    line.precision(17);
                    for (const auto& [j, a] : e.terms) {
                        line.str("");
                        line << ci << " " << j << " " << ii << " " << jj << " " << a * s;
                        h.push_back(line.str());
                    }
                    if (e.constant != 0.0) {
                        line.str("");
                        line << ci << " " << ii << " " << jj << " " << e.constant * s;
                        d.push_back(line.str());
                    }
                }
        }
        os << "HCOORD\n" << h.size() << "\n";
        for (const auto& l : h) os << l << "\n";
        os << "\n";
        os << "DCOORD\n" << d.size() << "\n";
        for (const auto& l : d) os << l << "\n";
        os << "\n";
    }
}

}  // namespace irsnoma
