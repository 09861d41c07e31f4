#include "sketchlab/linalg.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <vector>

namespace sketchlab::linalg {

DenseMatrix gaussian_matrix(Index m, Index n, Rng& rng) {
  if (m < 1 || n < 1) throw InvalidArgument("gaussian_matrix: dimensions must be positive");
  RMat g(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = rng.normal();
  return g;
}

RMat random_orthogonal(Index n, Rng& rng) {
  const RMat g = gaussian_matrix(n, n, rng).real();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

namespace {

template <class T>
using ColMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <class T>
T phase_of(T x) {
  if constexpr (std::is_same_v<T, double>) {
    return x < 0 ? -1.0 : 1.0;
  } else {
    const double a = std::abs(x);
    return a == 0.0 ? T(1.0) : x / a;
  }
}

template <class T>
ColMat<T> householder_basis(ColMat<T> A, double threshold, Index& dropped) {
  const Index m = A.rows();
  const Index l = A.cols();
  std::vector<Vec<T>> w;  // unit reflector vectors; w[k] acts on rows k..m-1
  std::vector<T> diag;    // R(k, k) of the kept columns
  dropped = 0;
  for (Index j = 0; j < l; ++j) {
    const Index k = static_cast<Index>(w.size());
    if (k >= m) {
      ++dropped;
      continue;
    }
    Vec<T> x = A.col(j);
    for (Index t = 0; t < k; ++t) {
      auto seg = x.tail(m - t);
      const T c = w[t].dot(seg);  // conjugates w
      seg -= (2.0 * c) * w[t];
    }
    auto tail = x.tail(m - k);
    const double nrm = tail.norm();
    if (!(nrm > threshold)) {
      ++dropped;
      continue;
    }
    const T alpha = -phase_of(tail(0)) * nrm;
    Vec<T> v = tail;
    v(0) -= alpha;
    const double vn = v.norm();
    if (vn == 0.0) {
      ++dropped;
      continue;
    }
    w.push_back(v / vn);
    diag.push_back(alpha);
  }
  const Index kept = static_cast<Index>(w.size());
  ColMat<T> U = ColMat<T>::Zero(m, kept);
  for (Index c = 0; c < kept; ++c) U(c, c) = T(1.0);
  for (Index t = kept - 1; t >= 0; --t) {
    auto blk = U.bottomRows(m - t);
    const Vec<T> coeff = w[t].adjoint() * blk;
    blk.noalias() -= 2.0 * w[t] * coeff.transpose();
  }
  // Sign convention: positive real diagonal of R.
  for (Index c = 0; c < kept; ++c) U.col(c) *= phase_of(diag[static_cast<std::size_t>(c)]);
  return U;
}

template <class RowT>
OrthoResult ortho_impl(const RowT& M, double threshold) {
  using T = typename RowT::Scalar;
  OrthoResult out;
  Index dropped = 0;
  ColMat<T> U = householder_basis<T>(ColMat<T>(M), threshold, dropped);
  out.dropped = dropped;
  out.empty_basis = U.cols() == 0;
  using RowOut = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  out.U = DenseMatrix(RowOut(U));
  return out;
}

}  // namespace

OrthoResult orthonormalize_columns_ref(const DenseMatrix& M, double drop_tol, double ref_norm) {
  if (M.cols() < 1) throw InvalidArgument("orthonormalize_columns: no columns");
  if (drop_tol < 0) throw InvalidArgument("orthonormalize_columns: negative drop_tol");
  const double threshold = drop_tol * ref_norm;
  if (M.is_real()) return ortho_impl(M.real(), threshold);
  return ortho_impl(M.complex(), threshold);
}

OrthoResult orthonormalize_columns(const DenseMatrix& M, double drop_tol) {
  if (M.cols() < 1) throw InvalidArgument("orthonormalize_columns: no columns");
  return orthonormalize_columns_ref(M, drop_tol, spectral_norm(M));
}

OrthoResult extend_orthonormal(const DenseMatrix& U, const DenseMatrix& Y, double drop_tol,
                               double ref_norm) {
  if (U.cols() == 0) return orthonormalize_columns_ref(Y, drop_tol, ref_norm);
  if (U.rows() != Y.rows()) throw InvalidArgument("extend_orthonormal: row mismatch");
  const Field f = join(U.field(), Y.field());
  auto as = [&](const DenseMatrix& a) {
    if (f == Field::Real) return a;
    DenseMatrix c = a;
    c.promote();
    return c;
  };
  const DenseMatrix Uf = as(U);
  const DenseMatrix Uh = adjoint(Uf);
  DenseMatrix R = as(Y);
  for (int pass = 0; pass < 2; ++pass) R = R - Uf * (Uh * R);
  OrthoResult add = orthonormalize_columns_ref(R, drop_tol, ref_norm);
  OrthoResult out;
  out.dropped = add.dropped;
  if (add.U.cols() == 0) {
    out.U = Uf;
    return out;
  }
  DenseMatrix V = add.U;
  V = V - Uf * (Uh * V);
  OrthoResult clean = orthonormalize_columns_ref(V, 0.0, 1.0);
  out.U = hcat(Uf, clean.U);
  out.dropped += clean.dropped;
  return out;
}

namespace {

template <class RowT>
CompactSvd svd_impl(const RowT& M) {
  using T = typename RowT::Scalar;
  using Row = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::BDCSVD<ColMat<T>> dec(ColMat<T>(M), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& s = dec.singularValues();
  const double eps = std::numeric_limits<double>::epsilon();
  const double cut = s.size() ? eps * static_cast<double>(std::max(M.rows(), M.cols())) * s(0) : 0;
  Index rho = 0;
  while (rho < s.size() && s(rho) > cut && s(rho) > 0) ++rho;
  CompactSvd out;
  out.sigma = s.head(rho);
  out.S = DenseMatrix(Row(dec.matrixU().leftCols(rho)));
  out.T = DenseMatrix(Row(dec.matrixV().leftCols(rho)));
  return out;
}

template <class RowT>
RVec values_impl(const RowT& M) {
  using T = typename RowT::Scalar;
  const ColMat<T> A = M;
  Eigen::BDCSVD<ColMat<T>> dec(A);
  return dec.singularValues();
}

}  // namespace

CompactSvd svd(const DenseMatrix& M) {
  if (M.empty()) throw InvalidArgument("svd: empty matrix");
  if (!M.all_finite()) throw InvalidInput("svd: non-finite entries");
  if (M.is_real()) return svd_impl(M.real());
  return svd_impl(M.complex());
}

RVec singular_values(const DenseMatrix& M) {
  if (M.empty()) return RVec();
  if (!M.all_finite()) throw InvalidInput("singular_values: non-finite entries");
  if (M.is_real()) return values_impl(M.real());
  return values_impl(M.complex());
}

Index numerical_rank(const DenseMatrix& M, double xi) {
  if (!(xi > 0)) throw InvalidArgument("numerical_rank: xi must be positive");
  const RVec s = singular_values(M);
  Index r = 0;
  for (Index j = 0; j < s.size(); ++j)
    if (s(j) > xi) ++r;
  return r;
}

namespace {

DenseMatrix scale_columns(const DenseMatrix& A, const RVec& d) {
  return A.visit([&](const auto& m) -> DenseMatrix {
    using M = std::decay_t<decltype(m)>;
    return M(m * d.asDiagonal());
  });
}

}  // namespace

Truncation truncate_svd(const DenseMatrix& M, Index r) {
  if (r < 1 || r > std::min(M.rows(), M.cols()))
    throw InvalidArgument("truncate_svd: r must lie in [1, min(m, n)]");
  const CompactSvd d = svd(M);
  const Index k = std::min(r, d.rank());
  Truncation out;
  if (k == 0) {
    out.Mr = DenseMatrix::zeros(M.rows(), M.cols(), M.field());
  } else {
    const DenseMatrix Sk = column_block(d.S, 0, k);
    const DenseMatrix Tk = column_block(d.T, 0, k);
    out.Mr = scale_columns(Sk, d.sigma.head(k)) * adjoint(Tk);
  }
  out.E = M - out.Mr;
  return out;
}

DenseMatrix pseudo_inverse(const DenseMatrix& M) {
  if (M.empty()) throw InvalidArgument("pseudo_inverse: empty matrix");
  const RVec s = singular_values(M);
  if (s.size() == 0 || s(0) == 0.0) return DenseMatrix::zeros(M.cols(), M.rows(), M.field());
  const CompactSvd d = svd(M);
  return scale_columns(d.T, d.sigma.cwiseInverse()) * adjoint(d.S);
}

double condition_number(const DenseMatrix& M) {
  const RVec s = singular_values(M);
  if (s.size() == 0 || s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

double orthonormality_error(const DenseMatrix& U) {
  if (U.cols() == 0) return 0.0;
  const DenseMatrix G = adjoint(U) * U - DenseMatrix::identity(U.cols(), U.field());
  NormOptions o;
  o.method = NormMethod::Svd;
  return spectral_norm(G, o);
}

}  // namespace sketchlab::linalg
