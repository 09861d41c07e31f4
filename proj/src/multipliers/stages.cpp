#include "ops.hpp"

namespace sketchlab::detail {

Stage butterfly_stage(Index block) {
  Stage s;
  s.kind = Stage::Kind::Butterfly;
  s.block = block;
  return s;
}

Stage twiddle_stage(Index block, bool conjugate) {
  Stage s;
  s.kind = Stage::Kind::Twiddle;
  s.block = block;
  s.real = false;
  const Index h = block / 2;
  s.values.resize(static_cast<std::size_t>(h));
  const double sgn = conjugate ? -1.0 : 1.0;
  for (Index i = 0; i < h; ++i) {
    const double ang = sgn * 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(block);
    s.values[static_cast<std::size_t>(i)] = std::polar(1.0, ang);
  }
  s.nontrivial = h > 0 ? static_cast<std::uint64_t>(h - 1) : 0;
  return s;
}

Stage interleave_stage(Index block) {
  Stage s;
  s.kind = Stage::Kind::Interleave;
  s.block = block;
  return s;
}

Stage block_diag_stage(std::vector<cd> values) {
  Stage s;
  s.kind = Stage::Kind::BlockDiag;
  s.block = static_cast<Index>(values.size());
  s.real = is_real_vec(values);
  s.nontrivial = static_cast<std::uint64_t>(
      std::count_if(values.begin(), values.end(), [](cd c) { return !is_sign(c); }));
  s.values = std::move(values);
  return s;
}

Stage block_perm_stage(std::vector<std::size_t> perm) {
  Stage s;
  s.kind = Stage::Kind::BlockPerm;
  s.block = static_cast<Index>(perm.size());
  s.perm = std::move(perm);
  return s;
}

StageOp::StageOp(Index n, std::vector<Stage> stages) : n_(n), stages_(std::move(stages)) {
  for (const Stage& s : stages_) {
    if (s.block < 1 || n_ % s.block != 0) throw InvalidArgument("stage block does not divide the order");
    if (!s.real) real_ = false;
  }
}

CirculantOp::CirculantOp(Index n, std::vector<std::size_t> pos, std::vector<cd> val, cd f)
    : n_(n), pos_(std::move(pos)), val_(std::move(val)), f_(f) {
  if (pos_.size() != val_.size()) throw InvalidArgument("circulant: support/value length mismatch");
  for (std::size_t p : pos_)
    if (static_cast<Index>(p) >= n_) throw InvalidArgument("circulant: support position out of range");
  real_ = is_real_vec(val_) && f_.imag() == 0.0;
}

ProductOp::ProductOp(std::vector<OperatorPtr> factors) : f_(std::move(factors)) {
  if (f_.empty()) throw InvalidArgument("product: no factors");
  field_ = Field::Real;
  for (std::size_t i = 0; i < f_.size(); ++i) {
    field_ = join(field_, f_[i]->field());
    if (i + 1 < f_.size() && f_[i]->cols() != f_[i + 1]->rows())
      throw InvalidArgument("product: factor shapes are not conformable");
  }
}

SumOp::SumOp(std::vector<cd> coeffs, std::vector<OperatorPtr> terms)
    : coeffs_(std::move(coeffs)), terms_(std::move(terms)) {
  if (terms_.empty()) throw InvalidArgument("sum: no terms");
  if (coeffs_.size() != terms_.size()) throw InvalidArgument("sum: coefficient count mismatch");
  field_ = is_real_vec(coeffs_) ? Field::Real : Field::Complex;
  for (const auto& t : terms_) {
    if (t->rows() != terms_.front()->rows() || t->cols() != terms_.front()->cols())
      throw InvalidArgument("sum: term shapes differ");
    field_ = join(field_, t->field());
  }
}

InverseBidiagOp::InverseBidiagOp(Index n, cd a, Index k, std::vector<cd> b, bool upper)
    : n_(n), a_(a), k_(k), b_(std::move(b)), upper_(upper) {
  if (k_ < 1 || k_ >= n_) throw InvalidArgument("inverse_bidiagonal: offset must lie in [1, n)");
  if (static_cast<Index>(b_.size()) != n_ - k_)
    throw InvalidArgument("inverse_bidiagonal: need n-k off-diagonal entries");
  if (a_ == cd(0.0)) throw InvalidArgument("inverse_bidiagonal: zero main diagonal");
  real_ = is_real_vec(b_) && a_.imag() == 0.0;
  nontrivial_b_ = static_cast<std::uint64_t>(
      std::count_if(b_.begin(), b_.end(), [](cd c) { return !is_sign(c); }));
}

GivensOp::GivensOp(std::vector<double> theta, std::vector<std::size_t> perm) : perm_(std::move(perm)) {
  if (theta.size() + 1 != perm_.size()) throw InvalidArgument("givens: need n-1 angles");
  c_.resize(theta.size());
  s_.resize(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    c_[i] = std::cos(theta[i]);
    s_[i] = std::sin(theta[i]);
  }
}

}  // namespace sketchlab::detail
