#include "sketchlab/lsr.hpp"
#include "sketchlab/families.hpp"
#include "sketchlab/linalg.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace sketchlab::lsr {

namespace {

template <class T>
using ColMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
DenseMatrix cod_solve(const ColMat<T>& A, const ColMat<T>& b, bool* deficient) {
  Eigen::CompleteOrthogonalDecomposition<ColMat<T>> cod(A);
  if (deficient) *deficient = cod.rank() < A.cols();
  using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return DenseMatrix(RowMat(cod.solve(b)));
}

DenseMatrix solve_min_norm(const DenseMatrix& A, const DenseMatrix& b, bool* deficient = nullptr) {
  if (A.is_real() && b.is_real())
    return cod_solve<double>(ColMat<double>(A.real()), ColMat<double>(b.real()), deficient);
  return cod_solve<cd>(ColMat<cd>(A.to_complex()), ColMat<cd>(b.to_complex()), deficient);
}

double vec_norm(const DenseMatrix& v) { return linalg::frobenius_norm(v); }

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const auto i = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::min(sorted.size() - 1, i == 0 ? 0 : i - 1)];
}

}  // namespace

void LsrProblem::validate() const {
  if (A.cols() < 1 || A.rows() <= A.cols()) throw InvalidArgument("LsrProblem: need m > d >= 1");
  if (b.rows() != A.rows() || b.cols() != 1) throw InvalidArgument("LsrProblem: b must be an m x 1 column");
}

DenseMatrix lsr_exact(const LsrProblem& p) {
  p.validate();
  return solve_min_norm(p.A, p.b);
}

Index sketch_dimension(Index d, double delta, double xi, double theta) {
  if (d < 1) throw InvalidArgument("sketch_dimension: d must be positive");
  if (!(delta > 0 && delta < 1)) throw InvalidArgument("sketch_dimension: delta must lie in (0, 1)");
  if (!(xi > 0 && xi <= 1)) throw InvalidArgument("sketch_dimension: xi must lie in (0, 1]");
  if (!(theta > 0)) throw InvalidArgument("sketch_dimension: theta must be positive");
  const double x = (static_cast<double>(d) + std::log(1.0 / delta) / (xi * xi)) * theta;
  // Guard against log() rounding just above an integer.
  return static_cast<Index>(std::ceil(x * (1.0 - 1e-12)));
}

DenseMatrix Sketch::apply(const DenseMatrix& X, FlopTally* t) const {
  if (kind == SketchKind::Gaussian) {
    if (t) count_gemm(*t, gaussian.rows(), gaussian.cols(), X.cols(), gaussian.field(), X.field());
    return gaussian * X;
  }
  return scale * left_multiply(rows, X, t);
}

Sketch gaussian_sketch(Index m, Index k, Rng& rng) {
  if (k < 1 || k > m) throw InvalidArgument("gaussian_sketch: need 1 <= k <= m");
  Sketch s;
  s.kind = SketchKind::Gaussian;
  s.k = k;
  s.gaussian = (1.0 / std::sqrt(static_cast<double>(k))) * linalg::gaussian_matrix(k, m, rng);
  return s;
}

Sketch structured_sketch(const Descriptor& square, Index k) {
  const Multiplier B = mult::normalized(mult::build(square));
  if (B.rows() != B.cols()) throw InvalidArgument("structured_sketch: multiplier must be square");
  const Index m = B.rows();
  if (k < 1 || k > m) throw InvalidArgument("structured_sketch: need 1 <= k <= m");
  Sketch s;
  s.kind = SketchKind::Structured;
  s.k = k;
  s.rows = mult::topmost(B, k);
  s.scale = std::sqrt(static_cast<double>(m) / static_cast<double>(k));
  return s;
}

Descriptor default_structured_family(Index m, std::uint64_t seed) {
  return mult::abridged_variant("asph", m, 3, seed, mult::Side::Left).descriptor();
}

SketchedSolution lsr_sketched(const LsrProblem& p, const Sketch& F) {
  p.validate();
  const Index k = F.kind == SketchKind::Gaussian ? F.gaussian.rows() : F.rows.rows();
  const Index cols = F.kind == SketchKind::Gaussian ? F.gaussian.cols() : F.rows.cols();
  if (cols != p.m()) throw InvalidArgument("lsr_sketched: sketch width differs from m");
  if (k > p.m()) throw InvalidArgument("lsr_sketched: k exceeds m");

  SketchedSolution out;
  const DenseMatrix FA = F.apply(p.A);
  const DenseMatrix Fb = F.apply(p.b);
  out.x = solve_min_norm(FA, Fb, &out.cert.rank_deficient_sketch);
  const DenseMatrix x_star = lsr_exact(p);
  out.cert.residual_exact = vec_norm(p.A * x_star - p.b);
  out.cert.residual_sketched = vec_norm(p.A * out.x - p.b);
  out.cert.sketch_residual = vec_norm(FA * out.x - Fb);
  out.cert.ratio = out.cert.residual_exact > 0 ? out.cert.residual_sketched / out.cert.residual_exact : 1.0;
  return out;
}

double RatioSummary::fraction_within(double xi) const {
  if (ratios.empty()) return 0.0;
  const auto n = std::count_if(ratios.begin(), ratios.end(),
                               [xi](double r) { return r >= 1.0 - xi && r <= 1.0 + xi; });
  return static_cast<double>(n) / static_cast<double>(ratios.size());
}

RatioSummary residual_ratio_trial(Index m, Index d, Index k, SketchKind kind, int trials, Rng& rng) {
  if (trials < 1) throw InvalidArgument("residual_ratio_trial: trials must be positive");
  if (d < 1 || m <= d) throw InvalidArgument("residual_ratio_trial: need m > d >= 1");
  RatioSummary s;
  s.ratios.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    const DenseMatrix M = linalg::gaussian_matrix(m, d + 1, rng);
    LsrProblem p{column_block(M, 0, d), column_block(M, d, 1)};
    const DenseMatrix My = p.A * lsr_exact(p) - p.b;  // M (x*; -1)
    const Sketch F = kind == SketchKind::Gaussian ? gaussian_sketch(m, k, rng)
                                                  : structured_sketch(default_structured_family(m, rng.next_u64()), k);
    s.ratios.push_back(vec_norm(F.apply(My)) / vec_norm(My));
  }
  std::vector<double> sorted = s.ratios;
  std::sort(sorted.begin(), sorted.end());
  s.q05 = quantile(sorted, 0.05);
  s.q50 = quantile(sorted, 0.5);
  s.q95 = quantile(sorted, 0.95);
  return s;
}

double kolmogorov_survival(double x) {
  if (x <= 0) return 1.0;
  if (x < 0.2) return 1.0;  // series is 1 to double precision here
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    sum += (j % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double D = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    D = std::max(D, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  // Stephens' small-sample correction.
  return {D, kolmogorov_survival((sq + 0.12 + 0.11 / sq) * D)};
}

}  // namespace sketchlab::lsr
