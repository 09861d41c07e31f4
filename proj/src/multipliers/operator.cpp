#include "sketchlab/linalg.hpp"
#include "sketchlab/multiplier.hpp"

#include <vector>

namespace sketchlab {

void LinearOperator::apply(const double*, double*, FlopTally&) const {
  throw InvalidArgument("real apply requested on a complex operator");
}

void LinearOperator::apply_transpose(const double*, double*, FlopTally&) const {
  throw InvalidArgument("real apply requested on a complex operator");
}

namespace {

FlopTally probe(const LinearOperator& op, bool transpose) {
  FlopTally t;
  const auto in = static_cast<std::size_t>(transpose ? op.rows() : op.cols());
  const auto out = static_cast<std::size_t>(transpose ? op.cols() : op.rows());
  if (op.field() == Field::Real) {
    std::vector<double> x(in, 0.0), y(out);
    transpose ? op.apply_transpose(x.data(), y.data(), t) : op.apply(x.data(), y.data(), t);
  } else {
    std::vector<cd> x(in, 0.0), y(out);
    transpose ? op.apply_transpose(x.data(), y.data(), t) : op.apply(x.data(), y.data(), t);
  }
  return t;
}

}  // namespace

Multiplier::Multiplier(OperatorPtr op, Descriptor desc, std::uint64_t random_variables)
    : op_(std::move(op)), desc_(std::move(desc)), rv_(random_variables) {
  if (!op_) throw InvalidArgument("Multiplier: null operator");
  cost_ = probe(*op_, false);
  tcost_ = probe(*op_, true);
}

CVec Multiplier::apply(const CVec& x, FlopTally* t) const {
  if (x.size() != cols()) throw InvalidArgument("Multiplier::apply: length mismatch");
  FlopTally local;
  CVec y(rows());
  op_->apply(x.data(), y.data(), t ? *t : local);
  return y;
}

CVec Multiplier::apply_transpose(const CVec& x, FlopTally* t) const {
  if (x.size() != rows()) throw InvalidArgument("Multiplier::apply_transpose: length mismatch");
  FlopTally local;
  CVec y(cols());
  op_->apply_transpose(x.data(), y.data(), t ? *t : local);
  return y;
}

RVec Multiplier::apply(const RVec& x, FlopTally* t) const {
  if (x.size() != cols()) throw InvalidArgument("Multiplier::apply: length mismatch");
  FlopTally local;
  RVec y(rows());
  op_->apply(x.data(), y.data(), t ? *t : local);
  return y;
}

RVec Multiplier::apply_transpose(const RVec& x, FlopTally* t) const {
  if (x.size() != rows()) throw InvalidArgument("Multiplier::apply_transpose: length mismatch");
  FlopTally local;
  RVec y(cols());
  op_->apply_transpose(x.data(), y.data(), t ? *t : local);
  return y;
}

DenseMatrix densify(const Multiplier& B, Index cap) {
  if (B.rows() > cap || B.cols() > cap)
    throw InvalidArgument("densify: operator exceeds the configured size cap");
  if (const DenseMatrix* d = B.op().dense()) return *d;
  FlopTally t;
  const Index n = B.rows();
  const Index l = B.cols();
  if (B.is_real()) {
    RMat out(n, l);
    std::vector<double> e(static_cast<std::size_t>(l), 0.0), y(static_cast<std::size_t>(n));
    for (Index j = 0; j < l; ++j) {
      e[static_cast<std::size_t>(j)] = 1.0;
      B.op().apply(e.data(), y.data(), t);
      e[static_cast<std::size_t>(j)] = 0.0;
      for (Index i = 0; i < n; ++i) out(i, j) = y[static_cast<std::size_t>(i)];
    }
    return out;
  }
  CMat out(n, l);
  std::vector<cd> e(static_cast<std::size_t>(l), 0.0), y(static_cast<std::size_t>(n));
  for (Index j = 0; j < l; ++j) {
    e[static_cast<std::size_t>(j)] = 1.0;
    B.op().apply(e.data(), y.data(), t);
    e[static_cast<std::size_t>(j)] = 0.0;
    for (Index i = 0; i < n; ++i) out(i, j) = y[static_cast<std::size_t>(i)];
  }
  return out;
}


DenseMatrix right_multiply(const DenseMatrix& M, const Multiplier& B, FlopTally* t) {
  if (M.cols() != B.rows()) throw InvalidArgument("right_multiply: cols(M) != rows(B)");
  FlopTally local;
  FlopTally& tally = t ? *t : local;
  const Index m = M.rows();
  const Index n = M.cols();
  const Index l = B.cols();

  auto gemm = [&](const DenseMatrix& Bd) {
    count_gemm(tally, m, n, l, M.field(), Bd.field());
    return M * Bd;
  };
  if (const DenseMatrix* d = B.op().dense()) return gemm(*d);

  const double row_cost = static_cast<double>(m) * static_cast<double>(B.transpose_cost().total());
  const double dense_cost = static_cast<double>(l) * static_cast<double>(B.apply_cost().total()) +
                            2.0 * static_cast<double>(m) * static_cast<double>(n) * static_cast<double>(l);
  if (dense_cost < row_cost && B.rows() <= kDensifyCap && B.cols() <= kDensifyCap) {
    for (Index j = 0; j < l; ++j) tally += B.apply_cost();
    return gemm(densify(B));
  }

  if (M.is_real() && B.is_real()) {
    const RMat& A = M.real();
    RMat out(m, l);
    for (Index i = 0; i < m; ++i) B.op().apply_transpose(A.row(i).data(), out.row(i).data(), tally);
    return out;
  }
  CMat out(m, l);
  std::vector<cd> row(static_cast<std::size_t>(n));
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = M(i, j);
    B.op().apply_transpose(row.data(), out.row(i).data(), tally);
  }
  return out;
}

DenseMatrix left_multiply(const Multiplier& B, const DenseMatrix& X, FlopTally* t) {
  if (X.rows() != B.cols()) throw InvalidArgument("left_multiply: cols(B) != rows(X)");
  FlopTally local;
  FlopTally& tally = t ? *t : local;
  const Index p = B.rows();
  const Index n = X.rows();
  const Index c = X.cols();
  if (const DenseMatrix* d = B.op().dense()) {
    count_gemm(tally, p, n, c, d->field(), X.field());
    return (*d) * X;
  }
  if (X.is_real() && B.is_real()) {
    const RMat& A = X.real();
    RMat out(p, c);
    RVec col(n);
    RVec y(p);
    for (Index j = 0; j < c; ++j) {
      col = A.col(j);
      B.op().apply(col.data(), y.data(), tally);
      out.col(j) = y;
    }
    return out;
  }
  const CMat A = X.to_complex();
  CMat out(p, c);
  CVec col(n);
  CVec y(p);
  for (Index j = 0; j < c; ++j) {
    col = A.col(j);
    B.op().apply(col.data(), y.data(), tally);
    out.col(j) = y;
  }
  return out;
}

}  // namespace sketchlab
