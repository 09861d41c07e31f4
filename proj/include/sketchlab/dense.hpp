#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <variant>

namespace sketchlab {

using cd = std::complex<double>;
using Index = Eigen::Index;

enum class Field : std::uint8_t { Real = 0, Complex = 1 };

inline Field join(Field a, Field b) {
  return (a == Field::Complex || b == Field::Complex) ? Field::Complex : Field::Real;
}

using RMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

/// Row-major real or complex matrix with a field tag.
///
/// A real-tagged matrix stores doubles only, so the zero-imaginary-part
/// invariant holds by construction. Arithmetic promotes to complex when
/// either operand is complex.
class DenseMatrix {
 public:
  DenseMatrix() : data_(RMat()) {}
  DenseMatrix(RMat m) : data_(std::move(m)) {}  // NOLINT(google-explicit-constructor)
  DenseMatrix(CMat m) : data_(std::move(m)) {}  // NOLINT(google-explicit-constructor)

  static DenseMatrix zeros(Index rows, Index cols, Field f = Field::Real);
  static DenseMatrix identity(Index n, Field f = Field::Real);

  Index rows() const;
  Index cols() const;
  Index size() const { return rows() * cols(); }
  Field field() const { return is_real() ? Field::Real : Field::Complex; }
  bool is_real() const { return std::holds_alternative<RMat>(data_); }
  bool empty() const { return rows() == 0 || cols() == 0; }

  const RMat& real() const { return std::get<RMat>(data_); }
  RMat& real() { return std::get<RMat>(data_); }
  const CMat& complex() const { return std::get<CMat>(data_); }
  CMat& complex() { return std::get<CMat>(data_); }

  /// Complex copy regardless of tag.
  CMat to_complex() const;
  /// Converts to complex storage in place.
  void promote();
  /// Drops to real storage when every imaginary part is exactly zero.
  void demote_if_real();

  cd operator()(Index i, Index j) const;
  bool all_finite() const;

  template <class F>
  decltype(auto) visit(F&& f) const {
    return std::visit(std::forward<F>(f), data_);
  }
  template <class F>
  decltype(auto) visit(F&& f) {
    return std::visit(std::forward<F>(f), data_);
  }

 private:
  std::variant<RMat, CMat> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);

/// Conjugate transpose (plain transpose for real matrices).
DenseMatrix adjoint(const DenseMatrix& a);
DenseMatrix transpose(const DenseMatrix& a);

/// Columns [c0, c0+count).
DenseMatrix column_block(const DenseMatrix& a, Index c0, Index count);
/// Horizontal concatenation (a | b).
DenseMatrix hcat(const DenseMatrix& a, const DenseMatrix& b);

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace sketchlab
