#include "sketchlab/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

namespace sketchlab::linalg {

namespace {

constexpr Index kGramLimit = 64;

double gram_norm(const DenseMatrix& M) {
  return M.visit([](const auto& m) -> double {
    using T = typename std::decay_t<decltype(m)>::Scalar;
    using Col = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
    Col g = (m.cols() <= m.rows()) ? Col(m.adjoint() * m) : Col(m * m.adjoint());
    Eigen::SelfAdjointEigenSolver<Col> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  });
}

ImplicitOperator wrap(const DenseMatrix& M) {
  ImplicitOperator op;
  op.rows = M.rows();
  op.cols = M.cols();
  if (M.is_real()) {
    const RMat* m = &M.real();
    op.apply = [m](const CVec& x, CVec& y) {
      y.resize(m->rows());
      y.real() = (*m) * x.real();
      y.imag() = (*m) * x.imag();
    };
    op.apply_adjoint = [m](const CVec& x, CVec& y) {
      y.resize(m->cols());
      y.real() = m->transpose() * x.real();
      y.imag() = m->transpose() * x.imag();
    };
  } else {
    const CMat* m = &M.complex();
    op.apply = [m](const CVec& x, CVec& y) { y = (*m) * x; };
    op.apply_adjoint = [m](const CVec& x, CVec& y) { y = m->adjoint() * x; };
  }
  return op;
}

double largest_bidiag_sv(const std::vector<double>& alpha, const std::vector<double>& beta) {
  // Upper bidiagonal B with diagonal alpha and superdiagonal beta; eigenvalues of B^T B.
  const Index k = static_cast<Index>(alpha.size());
  RVec diag(k);
  RVec sub(std::max<Index>(k - 1, 0));
  for (Index i = 0; i < k; ++i) {
    const double b = i > 0 ? beta[i - 1] : 0.0;
    diag(i) = alpha[i] * alpha[i] + b * b;
    if (i + 1 < k) sub(i) = alpha[i] * beta[i];
  }
  if (k == 1) return alpha[0];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace

double spectral_norm_lanczos(const ImplicitOperator& A, double rel_tol, Index max_iter) {
  const Index kmax = std::min({A.rows, A.cols, max_iter});
  if (kmax <= 0) return 0.0;
  Rng rng(0x9d2c5680u ^ static_cast<std::uint64_t>(A.rows * 131 + A.cols));
  CVec p(A.cols);
  for (Index i = 0; i < A.cols; ++i) p(i) = rng.normal();
  p.normalize();
  std::vector<CVec> P{p};
  std::vector<CVec> U;
  std::vector<double> alpha;
  std::vector<double> beta;
  CVec u(A.rows);
  CVec v(A.cols);
  double prev = -1.0;
  int stable = 0;
  double theta = 0.0;
  for (Index k = 0; k < kmax; ++k) {
    A.apply(P.back(), u);
    if (k > 0) u -= beta.back() * U.back();
    for (int pass = 0; pass < 2; ++pass)
      for (const CVec& q : U) u -= q.dot(u) * q;
    const double a = u.norm();
    alpha.push_back(a);
    theta = largest_bidiag_sv(alpha, beta);
    if (a <= 1e-300 || a <= 1e-15 * theta) break;
    u /= a;
    U.push_back(u);
    A.apply_adjoint(u, v);
    v -= a * P.back();
    for (int pass = 0; pass < 2; ++pass)
      for (const CVec& q : P) v -= q.dot(v) * q;
    const double b = v.norm();
    if (std::abs(theta - prev) <= rel_tol * theta) {
      if (++stable >= 2) break;
    } else {
      stable = 0;
    }
    prev = theta;
    if (b <= 1e-15 * theta) break;
    beta.push_back(b);
    P.push_back(v / b);
  }
  return theta;
}

double spectral_norm_power(const DenseMatrix& M, double rel_tol, Index max_iter) {
  if (M.empty()) return 0.0;
  const ImplicitOperator op = wrap(M);
  Rng rng(0x4f1bbcdcu);
  CVec x(op.cols);
  for (Index i = 0; i < op.cols; ++i) x(i) = rng.normal();
  x.normalize();
  CVec y(op.rows);
  double est = 0.0;
  for (Index it = 0; it < max_iter; ++it) {
    op.apply(x, y);
    op.apply_adjoint(y, x);
    const double lam = x.norm();
    if (lam == 0.0) return 0.0;
    x /= lam;
    const double next = std::sqrt(lam);
    if (it > 0 && std::abs(next - est) <= rel_tol * next) return next;
    est = next;
  }
  return est;
}

double spectral_norm(const DenseMatrix& M, const NormOptions& opts) {
  if (M.empty()) return 0.0;
  const Index small = std::min(M.rows(), M.cols());
  NormMethod method = opts.method;
  if (method == NormMethod::Auto) method = small <= kGramLimit ? NormMethod::Gram : NormMethod::Lanczos;
  switch (method) {
    case NormMethod::Gram:
      return gram_norm(M);
    case NormMethod::Svd: {
      const RVec s = singular_values(M);
      return s.size() ? s(0) : 0.0;
    }
    case NormMethod::Power:
      return spectral_norm_power(M, opts.rel_tol, opts.max_iter > 0 ? opts.max_iter : 100000);
    case NormMethod::Lanczos:
    case NormMethod::Auto:
      break;
  }
  const Index iters = opts.max_iter > 0 ? opts.max_iter : std::min<Index>(small, 400);
  return spectral_norm_lanczos(wrap(M), opts.rel_tol, iters);
}

double frobenius_norm(const DenseMatrix& M) {
  return M.visit([](const auto& m) { return m.norm(); });
}

}  // namespace sketchlab::linalg
