#pragma once

#include "sketchlab/dense.hpp"
#include "sketchlab/descriptor.hpp"
#include "sketchlab/flops.hpp"

#include <memory>
#include <stdexcept>

namespace sketchlab {

/// Matrix-free linear operator of shape rows() x cols().
///
/// `apply` computes y = A x and `apply_transpose` y = A^T x (no conjugation).
/// The real overloads are available only for real operators.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  virtual Field field() const = 0;

  virtual void apply(const cd* x, cd* y, FlopTally& t) const = 0;
  virtual void apply_transpose(const cd* x, cd* y, FlopTally& t) const = 0;
  virtual void apply(const double* x, double* y, FlopTally& t) const;
  virtual void apply_transpose(const double* x, double* y, FlopTally& t) const;

  /// Explicit storage for dense families, used for GEMM paths.
  virtual const DenseMatrix* dense() const { return nullptr; }
};

/// CRTP adapter: Derived supplies
///   template <class T> void run(const T* x, T* y, FlopTally&, bool transpose) const;
template <class Derived>
class OperatorImpl : public LinearOperator {
 public:
  void apply(const cd* x, cd* y, FlopTally& t) const override { self().run(x, y, t, false); }
  void apply_transpose(const cd* x, cd* y, FlopTally& t) const override { self().run(x, y, t, true); }
  void apply(const double* x, double* y, FlopTally& t) const override {
    if (field() != Field::Real) return LinearOperator::apply(x, y, t);
    self().run(x, y, t, false);
  }
  void apply_transpose(const double* x, double* y, FlopTally& t) const override {
    if (field() != Field::Real) return LinearOperator::apply_transpose(x, y, t);
    self().run(x, y, t, true);
  }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

/// A structured (or dense) multiplier: operator plus construction record.
class Multiplier {
 public:
  Multiplier() = default;
  Multiplier(OperatorPtr op, Descriptor desc, std::uint64_t random_variables);

  Index rows() const { return op_->rows(); }
  Index cols() const { return op_->cols(); }
  Field field() const { return op_->field(); }
  bool is_real() const { return field() == Field::Real; }
  const Descriptor& descriptor() const { return desc_; }
  /// Random variables drawn while building this multiplier and its children.
  std::uint64_t random_variables() const { return rv_; }
  const LinearOperator& op() const { return *op_; }
  const OperatorPtr& op_ptr() const { return op_; }

  CVec apply(const CVec& x, FlopTally* t = nullptr) const;
  CVec apply_transpose(const CVec& x, FlopTally* t = nullptr) const;
  RVec apply(const RVec& x, FlopTally* t = nullptr) const;
  RVec apply_transpose(const RVec& x, FlopTally* t = nullptr) const;

  /// Flops of one y = B x (real data for real operators).
  const FlopTally& apply_cost() const { return cost_; }
  const FlopTally& transpose_cost() const { return tcost_; }

 private:
  OperatorPtr op_;
  Descriptor desc_;
  std::uint64_t rv_ = 0;
  FlopTally cost_;
  FlopTally tcost_;
};

inline constexpr Index kDensifyCap = 4096;

/// Columns B e_j for every j; refuses when either dimension exceeds `cap`.
DenseMatrix densify(const Multiplier& B, Index cap = kDensifyCap);

/// M * B, by row-wise transposed applies or by densify+GEMM, whichever the
/// flop model predicts cheaper. Real M with real B stays real.
DenseMatrix right_multiply(const DenseMatrix& M, const Multiplier& B, FlopTally* t = nullptr);

/// B * X by applying B to each column of X.
DenseMatrix left_multiply(const Multiplier& B, const DenseMatrix& X, FlopTally* t = nullptr);

}  // namespace sketchlab
