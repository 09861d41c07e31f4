#pragma once

#include "sketchlab/dense.hpp"
#include "sketchlab/descriptor.hpp"
#include "sketchlab/multiplier.hpp"
#include "sketchlab/rng.hpp"

#include <vector>

namespace sketchlab::lsr {

/// min ||A x - b|| with A m x d, m > d >= 1. b is an m x 1 matrix.
struct LsrProblem {
  DenseMatrix A;
  DenseMatrix b;

  Index m() const { return A.rows(); }
  Index d() const { return A.cols(); }
  void validate() const;
};

/// Minimum-norm least-squares solution (complete orthogonal decomposition).
DenseMatrix lsr_exact(const LsrProblem& p);

/// ceil((d + log(1/delta) / xi^2) * theta).
Index sketch_dimension(Index d, double delta, double xi, double theta = 1.0);

enum class SketchKind { Gaussian, Structured };

/// k x m sketch F. Gaussian: G / sqrt(k). Structured: sqrt(m/k) times the
/// top k rows of c * B for an m x m multiplier B with c B orthogonal.
struct Sketch {
  SketchKind kind = SketchKind::Gaussian;
  Index k = 0;
  DenseMatrix gaussian;  // dense F for the Gaussian kind
  Multiplier rows;       // topmost k rows of c B, unscaled by sqrt(m/k)
  double scale = 1.0;

  DenseMatrix apply(const DenseMatrix& X, FlopTally* t = nullptr) const;
};

Sketch gaussian_sketch(Index m, Index k, Rng& rng);

/// Row-sampled orthogonal multiplier described by `square` (m x m).
Sketch structured_sketch(const Descriptor& square, Index k);

/// Default structured family: left-form abridged Hadamard with random
/// scaling and permutation, depth 3.
Descriptor default_structured_family(Index m, std::uint64_t seed);

struct LsrCertificate {
  double residual_exact = 0.0;
  double residual_sketched = 0.0;
  double sketch_residual = 0.0;
  double ratio = 1.0;  // residual_sketched / residual_exact (1 when both vanish)
  bool rank_deficient_sketch = false;  // rank(F A) < d
};

struct SketchedSolution {
  DenseMatrix x;
  LsrCertificate cert;
};

/// min ||F A x - F b|| solved exactly, then certified against lsr_exact.
SketchedSolution lsr_sketched(const LsrProblem& p, const Sketch& F);

struct RatioSummary {
  std::vector<double> ratios;
  double q05 = 0, q50 = 0, q95 = 0;
  double fraction_within(double xi) const;
};

/// ||F M y|| / ||M y|| for Gaussian M = (A | b) of size m x (d+1) and
/// y = (x*; -1) with x* the exact solution, F scaled so the ratio is 1 in
/// expectation. A fresh M and F are drawn per trial.
RatioSummary residual_ratio_trial(Index m, Index d, Index k, SketchKind kind, int trials, Rng& rng);

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// P(K > x) for the Kolmogorov distribution.
double kolmogorov_survival(double x);

}  // namespace sketchlab::lsr
