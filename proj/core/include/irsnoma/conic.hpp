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

#ifndef IRSNOMA_CONIC_HPP
#define IRSNOMA_CONIC_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "irsnoma/model.hpp"

/// Conic programs of the form
///
///     maximize  c' x   subject to   A_i x + b_i  in  K_i,
///
/// over zero, nonnegative, second-order, rotated second-order, exponential
/// and positive-semidefinite cones, and a homogeneous primal-dual
/// interior-point solver for them.
///
/// Cone conventions:
///   soc   (t, x):    t >= ||x||
///   rsoc  (u, v, x): 2 u v >= ||x||^2, u, v >= 0
///   exp   (a, b, c): c >= b exp(a / b), b > 0 (closure included)
///   psd   svec(S):   S >= 0, lower triangle stored column by column with
///                    off-diagonal entries scaled by sqrt(2)
namespace irsnoma {

enum class ConeKind { zero, nonneg, soc, rsoc, exp, psd };

std::string to_string(ConeKind k);

/// Sparse affine form sum_j a_j x_j + b.
struct AffineExpr {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    AffineExpr() = default;
    AffineExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)
    static AffineExpr var(int index, double coeff = 1.0);

    AffineExpr& add(int index, double coeff);
    AffineExpr& operator+=(const AffineExpr& o);
    AffineExpr& operator-=(const AffineExpr& o);
    AffineExpr& operator*=(double s);

    double eval(const RVector& x) const;
    /// Merges duplicate indices and drops zero coefficients.
    AffineExpr compressed() const;
};

AffineExpr operator+(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a);
AffineExpr operator*(double s, AffineExpr a);
AffineExpr operator*(AffineExpr a, double s);

struct ConeConstraint {
    ConeKind kind;
    std::vector<AffineExpr> rows;
    std::string name;

    int dim() const { return static_cast<int>(rows.size()); }
};

class ConicProgram {
public:
    int add_var(std::string name = {});
    /// Returns the index of the first of n consecutive variables.
    int add_vars(int n, const std::string& prefix = {});
    int num_vars() const { return static_cast<int>(var_names_.size()); }
    const std::vector<std::string>& var_names() const { return var_names_; }

    void maximize(AffineExpr objective) { objective_ = std::move(objective); }
    const AffineExpr& objective() const { return objective_; }

    /// Returns the constraint index.
    int add(ConeKind kind, std::vector<AffineExpr> rows, std::string name = {});
    const std::vector<ConeConstraint>& constraints() const { return constraints_; }

    int count(ConeKind kind) const;

    /// Throws std::invalid_argument when a block is malformed.
    void validate() const;

    /// Largest violation of any cone membership at x (0 when feasible).
    double max_violation(const RVector& x) const;

private:
    std::vector<std::string> var_names_;
    AffineExpr objective_;
    std::vector<ConeConstraint> constraints_;
};

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

std::string to_string(SolveStatus s);

struct SolverSettings {
    double tol_feas = 1e-8;
    double tol_gap = 1e-8;
    double tol_infeas = 1e-9;
    /// When the iteration limit or a stall is hit, accept points within these.
    double tol_feas_loose = 1e-6;
    double tol_gap_loose = 1e-6;
    int max_iter = 200;
    double neighborhood = 0.9;
    bool verbose = false;
};

struct SolverStats {
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double rel_gap = 0.0;
    double mu = 0.0;
    bool inaccurate = false;
    double seconds = 0.0;
    std::string message;
};

struct ConicSolution {
    SolveStatus status = SolveStatus::numerical_failure;
    RVector x;
    double objective_value = 0.0;
    /// Dual multiplier per constraint block, lying in the dual cone, with
    /// c + sum_i A_i' dual_i = 0 at optimality.
    std::vector<RVector> duals;
    SolverStats stats;

    bool ok() const { return status == SolveStatus::optimal; }
};

ConicSolution solve(const ConicProgram& p, const SolverSettings& settings = {});

/// Writes the program in the CBF text format (version 3).
void write_cbf(const ConicProgram& p, std::ostream& os);

// --- embeddings -----------------------------------------------------------

/// Complex vector variable stored as n real parts followed by n imaginary parts.
struct ComplexVar {
    int offset = 0;
    int n = 0;

    int re(int i) const { return offset + i; }
    int im(int i) const { return offset + n + i; }
    static ComplexVar add_to(ConicProgram& p, int n, const std::string& name);
};

RVector embed_complex(const CVector& z);
CVector extract_complex(const RVector& x, const ComplexVar& v);
CVector extract_complex(const RVector& stacked);

/// Re(a^H z) and Im(a^H z) as linear forms of the embedded z.
AffineExpr re_inner(const CVector& a, const ComplexVar& z);
AffineExpr im_inner(const CVector& a, const ComplexVar& z);
/// Rows of the embedding of z, for norm constraints (||z|| = ||embed(z)||).
std::vector<AffineExpr> embedded_rows(const ComplexVar& z, double scale = 1.0);

/// [[Re V, -Im V], [Im V, Re V]].
RMatrix embed_hermitian(const CMatrix& v);
/// Inverse of embed_hermitian on its range; averages the redundant blocks.
CMatrix extract_hermitian(const RMatrix& b);
/// Adjoint of embed_hermitian: the Hermitian matrix X with
/// Tr(X V) = <M, embed_hermitian(V)> for every Hermitian V.
CMatrix embed_hermitian_adjoint(const RMatrix& m);

int svec_dim(int n);
/// Side length for a triangular number, or -1.
int svec_side(int dim);
RVector svec(const RMatrix& s);
RMatrix smat(const RVector& v);
/// Position of entry (i, j), i >= j, in svec order.
int svec_index(int n, int i, int j);

}  // namespace irsnoma

#endif  // IRSNOMA_CONIC_HPP
