#pragma once

#include "sketchlab/dense.hpp"
#include "sketchlab/rng.hpp"

#include <functional>
#include <stdexcept>

namespace sketchlab {

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Non-finite or otherwise unusable numerical input.
struct InvalidInput : std::domain_error {
  using std::domain_error::domain_error;
};

namespace linalg {

inline constexpr double kDefaultDropTol = 1e-12;

/// m x n matrix of i.i.d. standard normals, filled row by row.
DenseMatrix gaussian_matrix(Index m, Index n, Rng& rng);

/// Haar-distributed n x n orthogonal matrix (QR of a Gaussian with sign fix).
RMat random_orthogonal(Index n, Rng& rng);

struct OrthoResult {
  DenseMatrix U;
  Index dropped = 0;
  /// True when every column was dropped; U then has zero columns.
  bool empty_basis = false;
};

/// Householder orthonormalization with dropping.
///
/// Columns are processed left to right; a column whose residual after the
/// previous reflectors has norm <= drop_tol * ||M|| is discarded.
OrthoResult orthonormalize_columns(const DenseMatrix& M, double drop_tol = kDefaultDropTol);

/// Same with an explicit reference norm in place of ||M||.
OrthoResult orthonormalize_columns_ref(const DenseMatrix& M, double drop_tol, double ref_norm);

/// Appends to the orthonormal basis U the significant part of span(Y)
/// orthogonal to U. Dropping uses drop_tol * ref_norm.
OrthoResult extend_orthonormal(const DenseMatrix& U, const DenseMatrix& Y, double drop_tol,
                               double ref_norm);

struct CompactSvd {
  DenseMatrix S;
  RVec sigma;
  DenseMatrix T;
  Index rank() const { return sigma.size(); }
};

/// Compact SVD; rank cut at sigma_j > eps * max(m, n) * sigma_1.
CompactSvd svd(const DenseMatrix& M);

/// All min(m, n) singular values, non-increasing.
RVec singular_values(const DenseMatrix& M);

Index numerical_rank(const DenseMatrix& M, double xi);

struct Truncation {
  DenseMatrix Mr;
  DenseMatrix E;
};

Truncation truncate_svd(const DenseMatrix& M, Index r);

DenseMatrix pseudo_inverse(const DenseMatrix& M);

enum class NormMethod { Auto, Svd, Gram, Lanczos, Power };

struct NormOptions {
  NormMethod method = NormMethod::Auto;
  double rel_tol = 1e-10;
  Index max_iter = 0;  // 0 selects a size-dependent default
};

double spectral_norm(const DenseMatrix& M, const NormOptions& opts = {});
double frobenius_norm(const DenseMatrix& M);

/// Matrix-free operator for Lanczos: y = A x and y = A^H x on complex vectors.
struct ImplicitOperator {
  Index rows = 0;
  Index cols = 0;
  std::function<void(const CVec&, CVec&)> apply;
  std::function<void(const CVec&, CVec&)> apply_adjoint;
};

/// Largest singular value by Golub-Kahan-Lanczos with full reorthogonalization.
double spectral_norm_lanczos(const ImplicitOperator& A, double rel_tol, Index max_iter);

/// Largest singular value by power iteration on A^H A.
double spectral_norm_power(const DenseMatrix& M, double rel_tol, Index max_iter);

/// sigma_1 / sigma_min(m, n); infinity for rank-deficient input.
double condition_number(const DenseMatrix& M);

/// ||U^H U - I|| (spectral).
double orthonormality_error(const DenseMatrix& U);

}  // namespace linalg
}  // namespace sketchlab
