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

#include <doctest.h>

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "irsnoma/conic.hpp"

using namespace irsnoma;

namespace {

AffineExpr x(int i, double c = 1.0) { return AffineExpr::var(i, c); }

RVector eigenvalues(const RMatrix& m) { return Eigen::SelfAdjointEigenSolver<RMatrix>(m).eigenvalues(); }

ConicProgram random_socp(Rng& rng, int n, double objective_scale) {
    ConicProgram p;
    const int v = p.add_vars(n, "x");
    AffineExpr obj;
    for (int i = 0; i < n; ++i) obj.add(v + i, objective_scale * rng.normal());
    p.maximize(obj);
    std::vector<AffineExpr> rows{AffineExpr(2.0)};
    for (int i = 0; i < n; ++i) rows.push_back(x(v + i) - 0.1 * i);
    p.add(ConeKind::soc, rows, "ball");
    for (int i = 0; i < n; ++i) p.add(ConeKind::nonneg, {x(v + i) + 1.0}, "lower");
    std::vector<AffineExpr> r2{AffineExpr(1.0), AffineExpr(1.5)};
    for (int i = 0; i < n; i += 2) r2.push_back(x(v + i));
    p.add(ConeKind::rsoc, r2, "rot");
    p.add(ConeKind::exp, {x(v) - 0.5, AffineExpr(1.0), AffineExpr(3.0)}, "exp");
    return p;
}

/// Ball-constrained linear program whose other cones are inactive at the
/// maximizer center + 2 c / |c|.
ConicProgram smooth_socp(Rng& rng, int n, double objective_scale, RVector& maximizer) {
    ConicProgram p;
    const int v = p.add_vars(n, "x");
    RVector c(n), center(n);
    AffineExpr obj;
    for (int i = 0; i < n; ++i) {
        c[i] = rng.normal();
        center[i] = 0.1 * i;
        obj.add(v + i, objective_scale * c[i]);
    }
    p.maximize(obj);
    std::vector<AffineExpr> rows{AffineExpr(2.0)};
    for (int i = 0; i < n; ++i) rows.push_back(x(v + i) - center[i]);
    p.add(ConeKind::soc, rows, "ball");
    for (int i = 0; i < n; ++i) p.add(ConeKind::nonneg, {x(v + i) + 3.0}, "lower");
    std::vector<AffineExpr> r2{AffineExpr(1.0), AffineExpr(5.0)};
    for (int i = 0; i < n; i += 2) r2.push_back(x(v + i));
    p.add(ConeKind::rsoc, r2, "rot");
    p.add(ConeKind::exp, {x(v) - 0.5, AffineExpr(1.0), AffineExpr(30.0)}, "exp");
    maximizer = center + 2.0 * c / c.norm();
    return p;
}

}  // namespace

TEST_SUITE("conic") {

TEST_CASE("linear fixture") {
    ConicProgram p;
    const int t = p.add_var("t");
    p.maximize(x(t));
    p.add(ConeKind::nonneg, {5.0 - x(t)});
    const ConicSolution s = solve(p);
    REQUIRE(s.ok());
    CHECK(s.x[t] == doctest::Approx(5.0).epsilon(1e-7));
    CHECK(s.objective_value == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("exponential cone convention fixture") {
    ConicProgram p;
    const int a = p.add_var("x"), c = p.add_var("y");
    p.maximize(x(a));
    p.add(ConeKind::exp, {x(a), AffineExpr(1.0), x(c)});
    p.add(ConeKind::nonneg, {std::exp(1.0) - x(c)});
    const ConicSolution s = solve(p);
    REQUIRE(s.ok());
    CHECK(s.x[a] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.x[c] == doctest::Approx(std::exp(1.0)).epsilon(1e-6));

    ConicProgram q;
    const int u = q.add_var();
    q.maximize(x(u));
    q.add(ConeKind::exp, {x(u), AffineExpr(2.0), AffineExpr(5.0)});
    const ConicSolution r = solve(q);
    REQUIRE(r.ok());
    CHECK(r.x[u] == doctest::Approx(2.0 * std::log(2.5)).epsilon(1e-6));
}

TEST_CASE("semidefinite fixture") {
    ConicProgram p;
    const int a = p.add_var(), b = p.add_var(), c = p.add_var();
    p.maximize(x(a) + x(c));
    p.add(ConeKind::zero, {x(a) - 1.0, x(c) - 1.0});
    p.add(ConeKind::psd, {x(a), x(b, std::sqrt(2.0)), x(c)});
    const ConicSolution s = solve(p);
    REQUIRE(s.ok());
    CHECK(s.objective_value == doctest::Approx(2.0).epsilon(1e-7));

    ConicProgram q;
    const int v = q.add_vars(3);
    q.maximize(x(v + 1, std::sqrt(2.0)));
    q.add(ConeKind::zero, {x(v) + x(v + 2) - 2.0});
    q.add(ConeKind::psd, {x(v), x(v + 1), x(v + 2)});
    const ConicSolution r = solve(q);
    REQUIRE(r.ok());
    CHECK(r.objective_value == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(r.x[v] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("second-order and rotated cones") {
    Rng rng(8);
    const int n = 5;
    RVector a(n);
    for (int i = 0; i < n; ++i) a[i] = rng.normal();
    ConicProgram p;
    const int v = p.add_vars(n);
    AffineExpr obj;
    for (int i = 0; i < n; ++i) obj.add(v + i, a[i]);
    p.maximize(obj);
    std::vector<AffineExpr> rows{AffineExpr(3.0)};
    for (int i = 0; i < n; ++i) rows.push_back(x(v + i));
    p.add(ConeKind::soc, rows);
    const ConicSolution s = solve(p);
    REQUIRE(s.ok());
    CHECK((s.x - 3.0 * a / a.norm()).norm() < 1e-6);

    ConicProgram q;
    const int u = q.add_var();
    q.maximize(x(u));
    q.add(ConeKind::rsoc, {AffineExpr(1.0), AffineExpr(2.0), x(u)});
    const ConicSolution r = solve(q);
    REQUIRE(r.ok());
    CHECK(r.x[u] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("infeasible and unbounded programs are detected") {
    ConicProgram p;
    const int a = p.add_var();
    p.maximize(x(a));
    p.add(ConeKind::nonneg, {x(a) - 1.0, -x(a)});
    CHECK(solve(p).status == SolveStatus::infeasible);

    ConicProgram q;
    const int b = q.add_var();
    q.maximize(x(b));
    q.add(ConeKind::nonneg, {x(b)});
    CHECK(solve(q).status == SolveStatus::unbounded);
}

TEST_CASE("optimal solutions re-substitute into every cone") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const ConicProgram p = random_socp(rng, 6, 1.0);
        const ConicSolution s = solve(p);
        REQUIRE(s.ok());
        CHECK(p.max_violation(s.x) <= 1e-7);
        for (std::size_t i = 0; i < p.constraints().size(); ++i)
            CHECK(static_cast<int>(s.duals[i].size()) == p.constraints()[i].dim());
    }
}

TEST_CASE("scaling the objective leaves the maximizer unchanged") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng a(seed), b(seed);
        RVector m1, m2;
        SolverSettings tight;
        tight.tol_feas = tight.tol_gap = 1e-12;
        const ConicSolution s1 = solve(smooth_socp(a, 6, 1.0, m1), tight);
        const ConicSolution s2 = solve(smooth_socp(b, 6, 37.0, m2), tight);
        REQUIRE(s1.ok());
        REQUIRE(s2.ok());
        CHECK((s1.x - s2.x).norm() < 1e-6);
        CHECK((s1.x - m1).norm() < 1e-6);
        CHECK(s2.objective_value == doctest::Approx(37.0 * s1.objective_value).epsilon(1e-6));
    }
}

TEST_CASE("malformed blocks are rejected") {
    ConicProgram p;
    p.add_var();
    p.add(ConeKind::exp, {x(0), x(0)});
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    ConicProgram q;
    q.add_var();
    q.add(ConeKind::psd, {x(0), x(0)});
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    ConicProgram r;
    r.add_var();
    r.add(ConeKind::nonneg, {x(3)});
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
}

TEST_CASE("complex embedding examples") {
    CVector z(1);
    z << cplx(1.0, 2.0);
    const RVector e = embed_complex(z);
    CHECK(e[0] == 1.0);
    CHECK(e[1] == 2.0);
    ConicProgram p;
    const ComplexVar v = ComplexVar::add_to(p, 1, "z");
    CHECK(re_inner(CVector::Ones(1), v).eval(e) == doctest::Approx(1.0));
    CHECK(im_inner(CVector::Ones(1), v).eval(e) == doctest::Approx(2.0));
    const CVector j = CVector::Constant(1, cplx(0.0, 1.0));
    const RVector one = embed_complex(CVector::Ones(1));
    CHECK(re_inner(j, v).eval(one) == doctest::Approx(0.0));
    CHECK(im_inner(j, v).eval(one) == doctest::Approx(-1.0));
    CVector t(1);
    t << cplx(3.0, 4.0);
    CHECK(t.norm() == doctest::Approx(5.0));
    CHECK(embed_complex(t).norm() == doctest::Approx(5.0));
    RVector rows(2);
    for (int i = 0; i < 2; ++i) rows[i] = embedded_rows(v)[i].eval(embed_complex(t));
    CHECK(rows.norm() == doctest::Approx(5.0));
}

TEST_CASE("complex embeddings round-trip") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 7;
        const CVector z = testing::random_cvector(n, rng);
        CHECK((extract_complex(embed_complex(z)) - z).norm() <= 1e-12 * (1.0 + z.norm()));
        ConicProgram p;
        p.add_var();
        const ComplexVar v = ComplexVar::add_to(p, n, "z");
        RVector stacked = RVector::Zero(2 * n + 1);
        stacked.tail(2 * n) = embed_complex(z);
        CHECK((extract_complex(stacked, v) - z).norm() <= 1e-12 * (1.0 + z.norm()));
        const CVector a = testing::random_cvector(n, rng);
        const cplx ip = a.dot(z);
        CHECK(std::abs(re_inner(a, v).eval(stacked) - ip.real()) < 1e-12 * (1.0 + std::abs(ip)));
        CHECK(std::abs(im_inner(a, v).eval(stacked) - ip.imag()) < 1e-12 * (1.0 + std::abs(ip)));

        const CMatrix b = CMatrix::NullaryExpr(n, n, [&] { return rng.complex_normal(); });
        const CMatrix h = b + b.adjoint();
        CHECK((extract_hermitian(embed_hermitian(h)) - h).norm() <= 1e-12 * (1.0 + h.norm()));
        const RMatrix s = embed_hermitian(h);
        CHECK((smat(svec(s)) - s).norm() <= 1e-12 * (1.0 + s.norm()));
        const RMatrix m = RMatrix::NullaryExpr(2 * n, 2 * n, [&] { return rng.normal(); });
        const RMatrix ms = m + m.transpose();
        const double lhs = (embed_hermitian_adjoint(ms) * h).trace().real();
        const double rhs = (ms.array() * s.array()).sum();
        CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("hermitian embedding is psd exactly when the matrix is") {
    const RVector e1 = eigenvalues(embed_hermitian(CMatrix::Identity(1, 1)));
    CHECK(e1.minCoeff() == doctest::Approx(1.0));
    CHECK(embed_hermitian(CMatrix::Identity(1, 1)).isApprox(RMatrix::Identity(2, 2)));

    CMatrix v(2, 2);
    v << 1.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 1.0;
    const RVector e2 = eigenvalues(embed_hermitian(v));
    CHECK(std::abs(e2[0]) < 1e-12);
    CHECK(std::abs(e2[1]) < 1e-12);
    CHECK(e2[2] == doctest::Approx(2.0));
    CHECK(e2[3] == doctest::Approx(2.0));

    CMatrix w(2, 2);
    w << 1.0, 2.0, 2.0, 1.0;
    CHECK(eigenvalues(embed_hermitian(w)).minCoeff() < -0.5);
}

TEST_CASE("svec layout") {
    CHECK(svec_dim(4) == 10);
    CHECK(svec_side(10) == 4);
    CHECK(svec_side(11) == -1);
    RMatrix s(2, 2);
    s << 1.0, 2.0, 2.0, 3.0;
    const RVector v = svec(s);
    CHECK(v[svec_index(2, 0, 0)] == 1.0);
    CHECK(v[svec_index(2, 1, 0)] == doctest::Approx(2.0 * std::sqrt(2.0)));
    CHECK(v[svec_index(2, 1, 1)] == 3.0);
    CHECK(v.squaredNorm() == doctest::Approx(s.squaredNorm()));
}

TEST_CASE("cbf export lists every block") {
    ConicProgram p;
    const int a = p.add_var();
    p.maximize(x(a));
    p.add(ConeKind::nonneg, {1.0 - x(a)});
    p.add(ConeKind::exp, {x(a), AffineExpr(1.0), AffineExpr(3.0)});
    std::ostringstream os;
    write_cbf(p, os);
    const std::string s = os.str();
    CHECK(s.find("VER") != std::string::npos);
    CHECK(s.find("MAX") != std::string::npos);
    CHECK(s.find("EXP") != std::string::npos);
}

}
