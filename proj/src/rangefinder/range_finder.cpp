#include "sketchlab/families.hpp"
#include "sketchlab/rangefinder.hpp"

#include <cmath>

namespace sketchlab::rf {

const char* to_string(Status s) { return s == Status::Success ? "SUCCESS" : "FAILURE"; }

namespace {

DenseMatrix product(const DenseMatrix& a, const DenseMatrix& b, FlopTally& t) {
  count_gemm(t, a.rows(), a.cols(), b.cols(), a.field(), b.field());
  return a * b;
}

// y = A x for a complex vector x, keeping real A real.
void apply_dense(const DenseMatrix& A, const CVec& x, CVec& y) {
  if (A.is_real()) {
    const RMat& a = A.real();
    y.resize(a.rows());
    y.real() = a * x.real();
    y.imag() = a * x.imag();
  } else {
    y = A.complex() * x;
  }
}

void apply_dense_adjoint(const DenseMatrix& A, const CVec& x, CVec& y) {
  if (A.is_real()) {
    const RMat& a = A.real();
    y.resize(a.cols());
    y.real() = a.transpose() * x.real();
    y.imag() = a.transpose() * x.imag();
  } else {
    y = A.complex().adjoint() * x;
  }
}

double reference_norm(const DenseMatrix& Y) { return Y.empty() ? 0.0 : linalg::spectral_norm(Y); }

}  // namespace

double error_norm(const DenseMatrix& M, const DenseMatrix& Q, const ErrorEstimator& est) {
  if (est.mode == ErrorEstimator::Mode::Frievalds) {
    Rng rng(est.seed);
    return frievalds_error_estimate(M, Q, est.k, rng);
  }
  if (Q.cols() == 0) return linalg::spectral_norm(M);
  // ||(I - Q Q^H) M|| without forming the residual.
  linalg::ImplicitOperator op;
  op.rows = M.rows();
  op.cols = M.cols();
  op.apply = [&](const CVec& x, CVec& y) {
    CVec mx, c, qc;
    apply_dense(M, x, mx);
    apply_dense_adjoint(Q, mx, c);
    apply_dense(Q, c, qc);
    y = mx - qc;
  };
  op.apply_adjoint = [&](const CVec& x, CVec& y) {
    CVec c, qc;
    apply_dense_adjoint(Q, x, c);
    apply_dense(Q, c, qc);
    apply_dense_adjoint(M, x - qc, y);
  };
  const Index small = std::min(M.rows(), M.cols());
  if (small <= 64) {
    const DenseMatrix R = M - Q * (adjoint(Q) * M);
    return linalg::spectral_norm(R);
  }
  return linalg::spectral_norm_lanczos(op, 1e-10, std::min<Index>(small, 400));
}

double frievalds_error_estimate(const DenseMatrix& M, const DenseMatrix& Q, Index k, Rng& rng) {
  if (k < 1) throw InvalidArgument("frievalds_error_estimate: k must be >= 1");
  const DenseMatrix H = linalg::gaussian_matrix(M.cols(), k, rng);
  const DenseMatrix MH = M * H;
  DenseMatrix R = MH;
  if (Q.cols() > 0) R = MH - Q * (adjoint(Q) * MH);
  return linalg::spectral_norm(R) / std::sqrt(static_cast<double>(k));
}

RangeFinderResult range_finder_from_sketch(const DenseMatrix& M, const DenseMatrix& Y0, double tau,
                                           const Options& opts) {
  if (tau < 0) throw InvalidArgument("range_finder: tau must be non-negative");
  if (Y0.rows() != M.rows()) throw InvalidArgument("range_finder: sketch row count differs from M");
  if (opts.power_iterations < 0) throw InvalidArgument("range_finder: negative power iteration count");
  RangeFinderResult out;
  DenseMatrix Y = Y0;
  // Power steps Y <- M (M^H Y), re-orthonormalized to keep the small directions.
  for (int it = 0; it < opts.power_iterations; ++it) {
    auto q = linalg::orthonormalize_columns_ref(Y, opts.drop_tol, reference_norm(Y));
    if (q.empty_basis) break;
    const DenseMatrix Z = product(adjoint(M), q.U, out.flops);
    auto z = linalg::orthonormalize_columns_ref(Z, opts.drop_tol, reference_norm(Z));
    if (z.empty_basis) {
      Y = DenseMatrix::zeros(M.rows(), 1);
      break;
    }
    Y = product(M, z.U, out.flops);
  }
  auto basis = linalg::orthonormalize_columns_ref(Y, opts.drop_tol, reference_norm(Y));
  out.Q = std::move(basis.U);
  out.empty_basis = basis.empty_basis;
  out.l_used = out.Q.cols();
  out.delta = out.empty_basis ? linalg::spectral_norm(M) : error_norm(M, out.Q, opts.estimator);
  out.status = out.delta <= tau ? Status::Success : Status::Failure;
  return out;
}

RangeFinderResult range_finder(const DenseMatrix& M, const Multiplier& B, double tau, const Options& opts) {
  if (M.cols() != B.rows()) throw InvalidArgument("range_finder: cols(M) != rows(B)");
  FlopTally sketch;
  const DenseMatrix Y = right_multiply(M, B, &sketch);
  RangeFinderResult out = range_finder_from_sketch(M, Y, tau, opts);
  out.flops += sketch;
  return out;
}

RecursiveResult recursive_range_finder(const DenseMatrix& M, const Multiplier& Bhat,
                                       const std::vector<Index>& block_sizes, double tau,
                                       const RecursiveOptions& opts) {
  if (Bhat.rows() != M.cols()) throw InvalidArgument("recursive_range_finder: cols(M) != order(Bhat)");
  if (Bhat.cols() != Bhat.rows()) throw InvalidArgument("recursive_range_finder: Bhat must be square");
  Index total = 0;
  for (Index s : block_sizes) {
    if (s < 1) throw InvalidArgument("recursive_range_finder: block sizes must be positive");
    total += s;
  }
  if (total != Bhat.cols()) throw InvalidArgument("recursive_range_finder: block sizes must sum to n");
  if (tau < 0) throw InvalidArgument("recursive_range_finder: tau must be non-negative");

  RecursiveResult rr;
  RangeFinderResult& res = rr.result;
  const double mnorm = linalg::spectral_norm(M);
  DenseMatrix Q = DenseMatrix::zeros(M.rows(), 0, M.field());
  DenseMatrix sketch = DenseMatrix::zeros(M.rows(), 0, M.field());
  Index offset = 0;
  const int stages = static_cast<int>(block_sizes.size());
  const int cap = opts.max_stages > 0 ? std::min(opts.max_stages, stages) : stages;
  for (int i = 0; i < cap; ++i) {
    const Index li = block_sizes[static_cast<std::size_t>(i)];
    std::vector<std::size_t> cols(static_cast<std::size_t>(li));
    for (Index c = 0; c < li; ++c) cols[static_cast<std::size_t>(c)] = static_cast<std::size_t>(offset + c);
    offset += li;
    const Multiplier Bi = mult::restrict_columns(Bhat, cols);
    const DenseMatrix Yi = right_multiply(M, Bi, &res.flops);
    sketch = sketch.cols() == 0 ? Yi : hcat(sketch, Yi);

    const double ref = reference_norm(sketch);
    if (opts.reuse && opts.base.power_iterations == 0) {
      auto ext = linalg::extend_orthonormal(Q, Yi, opts.base.drop_tol, ref);
      Q = std::move(ext.U);
      res.Q = Q;
      res.l_used = Q.cols();
      res.empty_basis = Q.cols() == 0;
      res.delta = res.empty_basis ? mnorm : error_norm(M, Q, opts.base.estimator);
      if (opts.cross_check) {
        const RangeFinderResult scratch = range_finder_from_sketch(M, sketch, tau, opts.base);
        rr.max_crosscheck_gap = std::max(rr.max_crosscheck_gap, std::abs(scratch.delta - res.delta));
      }
    } else {
      FlopTally keep = res.flops;
      res = range_finder_from_sketch(M, sketch, tau, opts.base);
      keep += res.flops;
      res.flops = keep;
      Q = res.Q;
    }
    res.stage = i + 1;
    res.status = res.delta <= tau ? Status::Success : Status::Failure;
    rr.stage_deltas.push_back(res.delta);
    rr.stage_widths.push_back(offset);
    if (res.success()) break;
  }
  return rr;
}

LowRankFactors low_rank_factors(const DenseMatrix& M, const DenseMatrix& Q) {
  if (Q.rows() != M.rows()) throw InvalidArgument("low_rank_factors: row mismatch");
  return {Q, adjoint(Q) * M};
}

DenseMatrix power_scheme(const DenseMatrix& M, int i) {
  if (i < 0) throw InvalidArgument("power_scheme: i must be non-negative");
  DenseMatrix out = M;
  const DenseMatrix Mh = adjoint(M);
  for (int k = 0; k < i; ++k) out = M * (Mh * out);
  return out;
}

FallbackResult approximate_with_fallback(const DenseMatrix& M, const Multiplier& Bhat,
                                         const std::vector<Index>& block_sizes, double tau,
                                         const RecursiveOptions& opts, Rng& rng) {
  FallbackResult fb;
  RecursiveResult rr = recursive_range_finder(M, Bhat, block_sizes, tau, opts);
  fb.stages_tried = rr.result.stage;
  fb.result = rr.result;
  if (rr.result.success()) {
    fb.path = "recursive";
    return fb;
  }
  // Later stages draw on every block, including the ones the capped recursion never reached.
  const Index width = block_sizes.front();
  std::vector<Multiplier> blocks;
  Index offset = 0;
  for (Index li : block_sizes) {
    std::vector<std::size_t> cols(static_cast<std::size_t>(li));
    for (Index c = 0; c < li; ++c) cols[static_cast<std::size_t>(c)] = static_cast<std::size_t>(offset + c);
    offset += li;
    if (li == width) blocks.push_back(mult::restrict_columns(Bhat, cols));
  }
  if (blocks.size() > 1) {
    const Multiplier combo = heuristic_compression(blocks, rng);
    RangeFinderResult h = range_finder(M, combo, tau, opts.base);
    if (h.success()) {
      fb.result = h;
      fb.path = "heuristic";
      return fb;
    }
  }
  if (width < Bhat.cols()) {
    FlopTally t;
    const DenseMatrix Y = randomized_compression(M, Bhat, width, rng, &t);
    RangeFinderResult c = range_finder_from_sketch(M, Y, tau, opts.base);
    c.flops += t;
    if (c.success()) {
      fb.result = c;
      fb.path = "randomized";
      return fb;
    }
  }
  fb.path = "failed";
  return fb;
}

}  // namespace sketchlab::rf
