#include "sketchlab/inputs.hpp"
#include "sketchlab/linalg.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sketchlab::inputs {

RVec SpectrumSpec::sigma() const {
  RVec s(n);
  for (Index j = 0; j < n; ++j) s[j] = j < r ? 1.0 / static_cast<double>(j + 1) : tail;
  return s;
}

DenseMatrix svd_spectrum_matrix(const SpectrumSpec& spec, Rng& rng) {
  if (spec.n < 1) throw InvalidArgument("svd_spectrum_matrix: n must be positive");
  if (spec.r < 0 || spec.r >= spec.n) throw InvalidArgument("svd_spectrum_matrix: need 0 <= r < n");
  const RMat S = linalg::random_orthogonal(spec.n, rng);
  const RMat T = linalg::random_orthogonal(spec.n, rng);
  const RVec s = spec.sigma();
  RMat M = S * s.asDiagonal() * T.transpose();
  return M;
}

namespace {

struct GaussLegendre16 {
  std::array<double, 16> x{}, w{};
  GaussLegendre16() {
    constexpr int n = 16;
    for (int i = 0; i < n; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

const GaussLegendre16& gl16() {
  static const GaussLegendre16 rule;
  return rule;
}

double composite(cd x, double a, double b, int panels) {
  const auto& q = gl16();
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    double s = 0.0;
    for (int k = 0; k < 16; ++k) {
      const double t = mid + 0.5 * h * q.x[k];
      s += q.w[k] * std::log(std::abs(x - std::polar(1.0, t)));
    }
    total += 0.5 * h * s;
  }
  return total;
}

}  // namespace

double log_arc_integral(cd x, double a, double b, double rel_tol) {
  double prev = composite(x, a, b, 1);
  for (int panels = 2; panels <= 1024; panels *= 2) {
    const double cur = composite(x, a, b, panels);
    if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), 1e-300)) return cur;
    prev = cur;
  }
  return prev;
}

DenseMatrix laplacian_matrix(Index n) {
  if (n < 8) throw InvalidArgument("laplacian_matrix: n must be at least 8");
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  // Rotation invariance: entry (i, j) depends on (i - j) mod n only.
  RVec c(n);
  for (Index k = 0; k < n; ++k) {
    const cd target = std::polar(2.0, step * static_cast<double>(k));
    c[k] = log_arc_integral(target, 0.0, step);
  }
  RMat M(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) M(i, j) = c[((i - j) % n + n) % n];
  const double nrm = linalg::spectral_norm(M);
  M /= nrm;
  return M;
}

FdGeometry fd_blocks(Index N, Index rh, Index rw, Index ch, Index cw, Index gap) {
  const Index total = rw + gap + cw;
  if (rh > N || ch > N || total > N || gap < 1)
    throw InvalidArgument("fd_blocks: blocks do not fit the grid");
  const Index j0 = (N - total) / 2;
  FdGeometry g;
  g.N = N;
  g.rows = {(N - rh) / 2, j0, rh, rw};
  g.cols = {(N - ch) / 2, j0 + rw + gap, ch, cw};
  return g;
}

FdGeometry fd_preset(const std::string& name) {
  FdGeometry g;
  if (name == "small") {
    g = fd_blocks(64, 8, 11, 10, 16, 16);
    g.expected_rank = 5;
  } else if (name == "medium") {
    g = fd_blocks(120, 104, 2, 100, 4, 5);
    g.expected_rank = 43;
  } else if (name == "large") {
    g = fd_blocks(140, 136, 3, 100, 8, 3);
    g.expected_rank = 64;
  } else {
    throw InvalidArgument("fd_preset: unknown preset '" + name + "'");
  }
  return g;
}

std::vector<std::string> fd_preset_names() { return {"small", "medium", "large"}; }

DenseMatrix finite_difference_inverse(const FdGeometry& g) {
  const Index N = g.N;
  if (N < 2) throw InvalidArgument("finite_difference_inverse: grid too small");
  auto inside = [N](const GridRect& r) {
    return r.h > 0 && r.w > 0 && r.i0 >= 0 && r.j0 >= 0 && r.i0 + r.h <= N && r.j0 + r.w <= N;
  };
  if (!inside(g.rows) || !inside(g.cols)) throw InvalidArgument("finite_difference_inverse: block outside grid");
  auto id = [N](Index i, Index j) { return i * N + j; };

  using Sp = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(5 * N * N));
  for (Index i = 0; i < N; ++i)
    for (Index j = 0; j < N; ++j) {
      const Index k = id(i, j);
      trip.emplace_back(k, k, 4.0);
      if (i > 0) trip.emplace_back(k, id(i - 1, j), -1.0);
      if (i + 1 < N) trip.emplace_back(k, id(i + 1, j), -1.0);
      if (j > 0) trip.emplace_back(k, id(i, j - 1), -1.0);
      if (j + 1 < N) trip.emplace_back(k, id(i, j + 1), -1.0);
    }
  Sp A(N * N, N * N);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Sp> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw std::logic_error("finite_difference_inverse: factorization failed");

  const Index nc = g.cols.size();
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(N * N, nc);
  for (Index a = 0; a < g.cols.h; ++a)
    for (Index b = 0; b < g.cols.w; ++b) E(id(g.cols.i0 + a, g.cols.j0 + b), a * g.cols.w + b) = 1.0;
  const Eigen::MatrixXd X = ldlt.solve(E);
  if (ldlt.info() != Eigen::Success) throw std::logic_error("finite_difference_inverse: solve failed");

  RMat M(g.rows.size(), nc);
  for (Index a = 0; a < g.rows.h; ++a)
    for (Index b = 0; b < g.rows.w; ++b) M.row(a * g.rows.w + b) = X.row(id(g.rows.i0 + a, g.rows.j0 + b));
  M /= linalg::spectral_norm(M);
  return M;
}

DenseMatrix factor_gaussian(const FactorGaussianSpec& spec, Rng& rng) {
  if (spec.m < 1 || spec.n < 1 || spec.r < 1 || spec.r > std::min(spec.m, spec.n))
    throw InvalidArgument("factor_gaussian: need 1 <= r <= min(m, n)");
  if (spec.noise_norm < 0) throw InvalidArgument("factor_gaussian: negative noise norm");
  const DenseMatrix U = linalg::gaussian_matrix(spec.m, spec.r, rng);
  const DenseMatrix V = linalg::gaussian_matrix(spec.r, spec.n, rng);
  DenseMatrix M = U * V;
  M = (1.0 / linalg::spectral_norm(M)) * M;
  if (spec.noise_norm > 0) {
    const DenseMatrix E = linalg::gaussian_matrix(spec.m, spec.n, rng);
    M = M + (spec.noise_norm / linalg::spectral_norm(E)) * E;
  }
  return M;
}

DenseMatrix random_rank_r(Index m, Index n, Index r, Rng& rng) {
  if (r < 0 || r > std::min(m, n)) throw InvalidArgument("random_rank_r: need 0 <= r <= min(m, n)");
  if (r == 0) return DenseMatrix::zeros(m, n);
  return linalg::gaussian_matrix(m, r, rng) * linalg::gaussian_matrix(r, n, rng);
}

}  // namespace sketchlab::inputs
