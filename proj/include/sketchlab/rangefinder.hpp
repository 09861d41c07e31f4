#pragma once

#include "sketchlab/dense.hpp"
#include "sketchlab/flops.hpp"
#include "sketchlab/linalg.hpp"
#include "sketchlab/multiplier.hpp"
#include "sketchlab/rng.hpp"

#include <string>
#include <vector>

namespace sketchlab::rf {

enum class Status { Success, Failure };

const char* to_string(Status s);

/// How the error norm ||M - Q Q^H M|| is evaluated.
struct ErrorEstimator {
  enum class Mode { Exact, Frievalds };
  Mode mode = Mode::Exact;
  Index k = 8;             // probe width for Frievalds
  std::uint64_t seed = 0;  // probe seed for Frievalds

  static ErrorEstimator exact() { return {}; }
  static ErrorEstimator frievalds(Index k, std::uint64_t seed) { return {Mode::Frievalds, k, seed}; }
};

struct Options {
  ErrorEstimator estimator;
  int power_iterations = 0;
  double drop_tol = linalg::kDefaultDropTol;
};

struct RangeFinderResult {
  DenseMatrix Q;  // m x l_used, orthonormal columns
  double delta = 0.0;
  Status status = Status::Failure;
  Index l_used = 0;
  FlopTally flops;  // sketch products M B (and power steps), counted in field ops
  int stage = 1;
  bool empty_basis = false;

  bool success() const { return status == Status::Success; }
};

/// Sketch Y = M B, keep its significant columns, orthonormalize to Q, then
/// report Success iff the estimated ||M - Q Q^H M|| is at most tau.
RangeFinderResult range_finder(const DenseMatrix& M, const Multiplier& B, double tau, const Options& opts = {});

/// Same, starting from a precomputed sketch Y (m x l).
RangeFinderResult range_finder_from_sketch(const DenseMatrix& M, const DenseMatrix& Y, double tau,
                                           const Options& opts = {});

/// Error norm of Q against M under the chosen estimator.
double error_norm(const DenseMatrix& M, const DenseMatrix& Q, const ErrorEstimator& est);

/// ||(M - Q Q^H M) H|| / sqrt(k) with a Gaussian n x k probe H.
double frievalds_error_estimate(const DenseMatrix& M, const DenseMatrix& Q, Index k, Rng& rng);

struct RecursiveOptions {
  Options base;
  /// Extend the previous basis with the new block (true) or recompute
  /// from the whole prefix (false).
  bool reuse = true;
  /// Recompute from scratch at every stage and compare with the reused basis.
  bool cross_check =
#ifdef NDEBUG
      false;
#else
      true;
#endif
  /// Stop after this many stages even without Success (0 = no cap).
  int max_stages = 0;
};

struct RecursiveResult {
  RangeFinderResult result;
  std::vector<double> stage_deltas;
  std::vector<Index> stage_widths;  // l^(i)
  double max_crosscheck_gap = 0.0;  // largest |delta_reuse - delta_scratch|
};

/// Runs the range finder with growing column prefixes B^(i) = (B_1 | ... | B_i)
/// of the n x n multiplier Bhat until it succeeds.
RecursiveResult recursive_range_finder(const DenseMatrix& M, const Multiplier& Bhat,
                                       const std::vector<Index>& block_sizes, double tau,
                                       const RecursiveOptions& opts = {});

/// (M B) G for a fresh Gaussian l x l_minus matrix G.
DenseMatrix randomized_compression(const DenseMatrix& M, const Multiplier& B, Index l_minus, Rng& rng,
                                   FlopTally* t = nullptr);

/// (M B) G for an explicit l x l_minus matrix G (l_minus <= l).
DenseMatrix randomized_compression(const DenseMatrix& M, const Multiplier& B, const DenseMatrix& G,
                                   FlopTally* t = nullptr);

/// sum_j c_j B_j with |c_j| = 1.
Multiplier heuristic_compression(const std::vector<Multiplier>& blocks, const std::vector<cd>& signs);

/// sum_j c_j B_j with independent random signs c_j.
Multiplier heuristic_compression(const std::vector<Multiplier>& blocks, Rng& rng);

/// M (M^H M)^i, equivalently (M M^H)^i M; sigma_j maps to sigma_j^(2i+1).
DenseMatrix power_scheme(const DenseMatrix& M, int i);

struct LowRankFactors {
  DenseMatrix U;  // m x l
  DenseMatrix V;  // l x n
};

/// U = Q, V = Q^H M.
LowRankFactors low_rank_factors(const DenseMatrix& M, const DenseMatrix& Q);

enum class BoundKind { Primal, Dual };

struct BoundReport {
  Index m = 0, n = 0, r = 0, l = 0, p = 0;
  double kappa_B = 1.0;
  double expected_f = 0.0;       // (1 + sqrt n + sqrt l) (e/p) sqrt(8 (n-r) r l)
  double expected_f_dual = 0.0;  // e^2 sqrt(8 (n-r) l) kappa r / ((m-r) p); NaN when m <= r
  std::string note;
};

/// Closed-form expectation bounds for the error factor. Throws
/// InvalidArgument when p = l - r < 1 (the expectation is undefined) or,
/// for the dual kind, when m <= r.
BoundReport theoretical_error_bound(Index m, Index n, Index r, Index l, double kappa_B, BoundKind kind);

struct FallbackResult {
  RangeFinderResult result;
  std::string path;  // "recursive", "heuristic", "randomized" or "failed"
  int stages_tried = 0;
};

/// Recursive stages (capped by opts.max_stages), then a random-sign
/// combination of all blocks as wide as the first, then Gaussian
/// compression of M Bhat to that width. Each fallback sketch is one block wide.
FallbackResult approximate_with_fallback(const DenseMatrix& M, const Multiplier& Bhat,
                                         const std::vector<Index>& block_sizes, double tau,
                                         const RecursiveOptions& opts, Rng& rng);

}  // namespace sketchlab::rf
