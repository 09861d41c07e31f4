#pragma once

#include "sketchlab/dense.hpp"
#include "sketchlab/rng.hpp"

#include <string>
#include <vector>

namespace sketchlab::inputs {

/// sigma_j = 1/j for j <= r, `tail` for j > r.
struct SpectrumSpec {
  Index n = 0;
  Index r = 0;
  double tail = 1e-10;

  RVec sigma() const;
};

/// S diag(sigma) T^T with S, T Haar orthogonal.
DenseMatrix svd_spectrum_matrix(const SpectrumSpec& spec, Rng& rng);

/// n x n single-layer log kernel: targets 2 w^i on the radius-2 circle,
/// sources integrated over the n equal arcs of the unit circle. ||M|| = 1.
DenseMatrix laplacian_matrix(Index n);

/// Integral of log|x - e^{i t}| dt over [a, b] by composite 16-point
/// Gauss-Legendre, doubling the panel count until two passes agree to rel_tol.
double log_arc_integral(cd x, double a, double b, double rel_tol = 1e-12);

/// Rectangle of grid points, rows [i0, i0+h) and columns [j0, j0+w).
struct GridRect {
  Index i0 = 0, j0 = 0, h = 0, w = 0;
  Index size() const { return h * w; }
};

struct FdGeometry {
  Index N = 0;      // N x N interior grid
  GridRect rows;    // target points (output rows)
  GridRect cols;    // source points (output columns)
  Index expected_rank = 0;
};

/// Row block of size rh x rw and column block ch x cw, both vertically
/// centred, side by side with a horizontal gap g, the pair centred in the grid.
FdGeometry fd_blocks(Index N, Index rh, Index rw, Index ch, Index cw, Index gap);

/// Presets "small" (88 x 160), "medium" (208 x 400), "large" (408 x 800).
FdGeometry fd_preset(const std::string& name);
std::vector<std::string> fd_preset_names();

/// Block A^{-1}[rows, cols] of the inverse 5-point Dirichlet Laplacian on
/// the N x N grid, scaled to ||M|| = 1.
DenseMatrix finite_difference_inverse(const FdGeometry& g);

struct FactorGaussianSpec {
  Index m = 0, n = 0, r = 0;
  double noise_norm = 0.0;
};

/// UV / ||UV|| + E with Gaussian U (m x r), V (r x n) and a Gaussian E scaled
/// to ||E|| = noise_norm.
DenseMatrix factor_gaussian(const FactorGaussianSpec& spec, Rng& rng);

/// Random m x n matrix of exact rank r (product of Gaussian factors).
DenseMatrix random_rank_r(Index m, Index n, Index r, Rng& rng);

}  // namespace sketchlab::inputs
