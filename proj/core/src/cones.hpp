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

#ifndef IRSNOMA_SRC_CONES_HPP
#define IRSNOMA_SRC_CONES_HPP

#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace irsnoma::detail {

using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Columns of one cone's block of G (slack = h - G x): for each column with
/// a nonzero in the block, its index and (local row, value) entries.
struct BlockColumns {
    struct Column {
        int j;
        std::vector<std::pair<int, double>> entries;
    };
    std::vector<Column> cols;
};

/// Barrier oracle of a proper cone. load() must precede the other queries.
class Cone {
public:
    virtual ~Cone() = default;

    virtual int dim() const = 0;
    virtual double nu() const = 0;
    virtual void central_point(double* s) const = 0;
    /// Returns false if s is not in the interior.
    virtual bool load(const double* s) = 0;
    virtual void gradient(double* g) const = 0;
    virtual void hess_prod(const double* v, double* out) const = 0;
    /// v' H^{-1} v.
    virtual double inv_hess_quad(const double* v) const = 0;
    virtual bool dual_interior(const double* z) const = 0;

    /// q += scale * G_k' H G_k.
    virtual void add_congruence(double scale, RMatrix& q) const;
    /// Called once with this cone's block of G.
    virtual void set_block(BlockColumns block);

protected:
    BlockColumns block_;
    RMatrix dense_block_;  // dim x block_.cols.size()
};

class NonnegCone final : public Cone {
public:
    explicit NonnegCone(int dim) : d_(dim), s_(dim) {}
    int dim() const override { return d_; }
    double nu() const override { return d_; }
    void central_point(double* s) const override;
    bool load(const double* s) override;
    void gradient(double* g) const override;
    void hess_prod(const double* v, double* out) const override;
    double inv_hess_quad(const double* v) const override;
    bool dual_interior(const double* z) const override;
    void add_congruence(double scale, RMatrix& q) const override;

private:
    int d_;
    RVector s_;
};

/// t >= ||x||, barrier -log(t^2 - ||x||^2).
class SocCone final : public Cone {
public:
    explicit SocCone(int dim) : d_(dim), s_(dim), js_(dim) {}
    int dim() const override { return d_; }
    double nu() const override { return 2.0; }
    void central_point(double* s) const override;
    bool load(const double* s) override;
    void gradient(double* g) const override;
    void hess_prod(const double* v, double* out) const override;
    double inv_hess_quad(const double* v) const override;
    bool dual_interior(const double* z) const override;

private:
    int d_;
    RVector s_;
    RVector js_;
    double disc_ = 0.0;
};

/// c >= b exp(a / b), barrier -log(b log(c / b) - a) - log b - log c.
class ExpCone final : public Cone {
public:
    int dim() const override { return 3; }
    double nu() const override { return 3.0; }
    void central_point(double* s) const override;
    bool load(const double* s) override;
    void gradient(double* g) const override;
    void hess_prod(const double* v, double* out) const override;
    double inv_hess_quad(const double* v) const override;
    bool dual_interior(const double* z) const override;

private:
    Eigen::Vector3d s_, g_;
    Eigen::Matrix3d h_;
    Eigen::LLT<Eigen::Matrix3d> hfac_;
};

/// svec(S) with S >= 0, barrier -log det S.
class PsdCone final : public Cone {
public:
    explicit PsdCone(int side);
    int dim() const override { return side_ * (side_ + 1) / 2; }
    double nu() const override { return side_; }
    void central_point(double* s) const override;
    bool load(const double* s) override;
    void gradient(double* g) const override;
    void hess_prod(const double* v, double* out) const override;
    double inv_hess_quad(const double* v) const override;
    bool dual_interior(const double* z) const override;
    void add_congruence(double scale, RMatrix& q) const override;
    void set_block(BlockColumns block) override;

private:
    RMatrix unpack(const double* v) const;
    void pack(const RMatrix& m, double* out) const;

    struct Entry {
        int p, q;
        double w;
    };
    int side_;
    RMatrix s_, l_, inv_;
    std::vector<std::vector<Entry>> col_entries_;  // per block column, full symmetric expansion
    std::vector<bool> col_dense_;
};

}  // namespace irsnoma::detail

#endif  // IRSNOMA_SRC_CONES_HPP
