#include "sketchlab/families.hpp"
#include "sketchlab/rangefinder.hpp"

#include <cmath>

namespace sketchlab::rf {

DenseMatrix randomized_compression(const DenseMatrix& M, const Multiplier& B, const DenseMatrix& G, FlopTally* t) {
  if (G.rows() != B.cols()) throw InvalidArgument("randomized_compression: rows(G) != cols(B)");
  if (G.cols() > B.cols()) throw InvalidArgument("randomized_compression: l_minus exceeds l");
  FlopTally local;
  FlopTally& tally = t ? *t : local;
  const DenseMatrix Y = right_multiply(M, B, &tally);
  count_gemm(tally, Y.rows(), Y.cols(), G.cols(), Y.field(), G.field());
  return Y * G;
}

DenseMatrix randomized_compression(const DenseMatrix& M, const Multiplier& B, Index l_minus, Rng& rng,
                                   FlopTally* t) {
  if (l_minus < 1 || l_minus >= B.cols())
    throw InvalidArgument("randomized_compression: need 1 <= l_minus < l");
  return randomized_compression(M, B, linalg::gaussian_matrix(B.cols(), l_minus, rng), t);
}

Multiplier heuristic_compression(const std::vector<Multiplier>& blocks, const std::vector<cd>& signs) {
  if (blocks.empty()) throw InvalidArgument("heuristic_compression: no blocks");
  if (signs.size() != blocks.size()) throw InvalidArgument("heuristic_compression: one sign per block");
  for (const auto& b : blocks)
    if (b.rows() != blocks.front().rows() || b.cols() != blocks.front().cols())
      throw InvalidArgument("heuristic_compression: blocks must share order and width");
  for (cd c : signs)
    if (std::abs(std::abs(c) - 1.0) > 1e-12) throw InvalidArgument("heuristic_compression: |c_j| must be 1");
  return mult::sum(signs, blocks);
}

Multiplier heuristic_compression(const std::vector<Multiplier>& blocks, Rng& rng) {
  std::vector<cd> signs(blocks.size());
  for (auto& c : signs) c = rng.sign();
  return heuristic_compression(blocks, signs);
}

}  // namespace sketchlab::rf
