#include "sketchlab/dense.hpp"

#include <stdexcept>

namespace sketchlab {

DenseMatrix DenseMatrix::zeros(Index rows, Index cols, Field f) {
  if (f == Field::Real) return RMat(RMat::Zero(rows, cols));
  return CMat(CMat::Zero(rows, cols));
}

DenseMatrix DenseMatrix::identity(Index n, Field f) {
  if (f == Field::Real) return RMat(RMat::Identity(n, n));
  return CMat(CMat::Identity(n, n));
}

Index DenseMatrix::rows() const {
  return visit([](const auto& m) { return m.rows(); });
}

Index DenseMatrix::cols() const {
  return visit([](const auto& m) { return m.cols(); });
}

CMat DenseMatrix::to_complex() const {
  if (is_real()) return real().cast<cd>();
  return complex();
}

void DenseMatrix::promote() {
  if (is_real()) data_ = CMat(real().cast<cd>());
}

void DenseMatrix::demote_if_real() {
  if (is_real()) return;
  const CMat& c = complex();
  if ((c.imag().array() == 0.0).all()) data_ = RMat(c.real());
}

cd DenseMatrix::operator()(Index i, Index j) const {
  return visit([&](const auto& m) { return cd(m(i, j)); });
}

bool DenseMatrix::all_finite() const {
  return visit([](const auto& m) { return m.allFinite(); });
}

static void check_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: inner dimension mismatch");
  if (a.is_real() && b.is_real()) return RMat(a.real() * b.real());
  if (a.is_real()) return CMat(a.real().cast<cd>() * b.complex());
  if (b.is_real()) return CMat(a.complex() * b.real().cast<cd>());
  return CMat(a.complex() * b.complex());
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  check_same_shape(a, b, "matrix sum");
  if (a.is_real() && b.is_real()) return RMat(a.real() + b.real());
  return CMat(a.to_complex() + b.to_complex());
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  check_same_shape(a, b, "matrix difference");
  if (a.is_real() && b.is_real()) return RMat(a.real() - b.real());
  return CMat(a.to_complex() - b.to_complex());
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
  return a.visit([&](const auto& m) -> DenseMatrix {
    using M = std::decay_t<decltype(m)>;
    return M(s * m);
  });
}

DenseMatrix adjoint(const DenseMatrix& a) {
  if (a.is_real()) return RMat(a.real().transpose());
  return CMat(a.complex().adjoint());
}

DenseMatrix transpose(const DenseMatrix& a) {
  return a.visit([](const auto& m) -> DenseMatrix {
    using M = std::decay_t<decltype(m)>;
    return M(m.transpose());
  });
}

DenseMatrix column_block(const DenseMatrix& a, Index c0, Index count) {
  if (c0 < 0 || count < 0 || c0 + count > a.cols())
    throw std::invalid_argument("column_block: range out of bounds");
  return a.visit([&](const auto& m) -> DenseMatrix {
    using M = std::decay_t<decltype(m)>;
    return M(m.middleCols(c0, count));
  });
}

DenseMatrix hcat(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  if (a.rows() != b.rows()) throw std::invalid_argument("hcat: row mismatch");
  if (a.is_real() && b.is_real()) {
    RMat out(a.rows(), a.cols() + b.cols());
    out << a.real(), b.real();
    return out;
  }
  CMat out(a.rows(), a.cols() + b.cols());
  out << a.to_complex(), b.to_complex();
  return out;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  check_same_shape(a, b, "max_abs_diff");
  if (a.size() == 0) return 0.0;
  if (a.is_real() && b.is_real()) return (a.real() - b.real()).cwiseAbs().maxCoeff();
  return (a.to_complex() - b.to_complex()).cwiseAbs().maxCoeff();
}

}  // namespace sketchlab
