#pragma once

// Concrete operator classes behind the multiplier factories.

#include "sketchlab/linalg.hpp"
#include "sketchlab/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace sketchlab::detail {

template <class T>
inline T narrow(cd c) {
  if constexpr (std::is_same_v<T, double>) {
    return c.real();
  } else {
    return c;
  }
}

inline bool is_sign(cd c) { return c.imag() == 0.0 && (c.real() == 1.0 || c.real() == -1.0); }

inline bool is_real_vec(const std::vector<cd>& v) {
  return std::all_of(v.begin(), v.end(), [](cd c) { return c.imag() == 0.0; });
}

/// y[i] = x[perm[i]].
class PermOp final : public OperatorImpl<PermOp> {
 public:
  explicit PermOp(std::vector<std::size_t> perm) : perm_(std::move(perm)) {}
  Index rows() const override { return static_cast<Index>(perm_.size()); }
  Index cols() const override { return rows(); }
  Field field() const override { return Field::Real; }
  const std::vector<std::size_t>& perm() const { return perm_; }

  template <class T>
  void run(const T* x, T* y, FlopTally&, bool transpose) const {
    const std::size_t n = perm_.size();
    if (!transpose) {
      for (std::size_t i = 0; i < n; ++i) y[i] = x[perm_[i]];
    } else {
      for (std::size_t i = 0; i < n; ++i) y[perm_[i]] = x[i];
    }
  }

 private:
  std::vector<std::size_t> perm_;
};

class DiagOp final : public OperatorImpl<DiagOp> {
 public:
  explicit DiagOp(std::vector<cd> d) : d_(std::move(d)) {
    real_ = is_real_vec(d_);
    nontrivial_ = static_cast<std::uint64_t>(std::count_if(d_.begin(), d_.end(), [](cd c) { return !is_sign(c); }));
  }
  Index rows() const override { return static_cast<Index>(d_.size()); }
  Index cols() const override { return rows(); }
  Field field() const override { return real_ ? Field::Real : Field::Complex; }

  template <class T>
  void run(const T* x, T* y, FlopTally& t, bool) const {
    for (std::size_t i = 0; i < d_.size(); ++i) y[i] = narrow<T>(d_[i]) * x[i];
    if (real_)
      t.mul<T, double>(nontrivial_);
    else
      t.mul<T, cd>(nontrivial_);
  }

 private:
  std::vector<cd> d_;
  bool real_ = true;
  std::uint64_t nontrivial_ = 0;
};

/// Z_f: (f x_{n-1}, x_0, ..., x_{n-2}).
class ShiftOp final : public OperatorImpl<ShiftOp> {
 public:
  ShiftOp(Index n, cd f) : n_(n), f_(f) {}
  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  Field field() const override { return f_.imag() == 0.0 ? Field::Real : Field::Complex; }

  template <class T>
  void run(const T* x, T* y, FlopTally& t, bool transpose) const {
    const T f = narrow<T>(f_);
    if (!transpose) {
      const T last = x[n_ - 1];
      for (Index j = n_ - 1; j > 0; --j) y[j] = x[j - 1];
      y[0] = f * last;
    } else {
      const T first = x[0];
      for (Index j = 0; j + 1 < n_; ++j) y[j] = x[j + 1];
      y[n_ - 1] = f * first;
    }
    if (!is_sign(f_) && f_ != cd(0.0)) {
      if (field() == Field::Real)
        t.mul<T, double>(1);
      else
        t.mul<T, cd>(1);
    }
  }

 private:
  Index n_;
  cd f_;
};

/// One stage of an abridged transform, acting blockwise on blocks of size `block`.
struct Stage {
  enum class Kind { Butterfly, Twiddle, Interleave, BlockDiag, BlockPerm };
  Kind kind = Kind::Butterfly;
  Index block = 2;
  std::vector<cd> values;         // Twiddle: block/2 factors; BlockDiag: block entries
  std::vector<std::size_t> perm;  // BlockPerm: y[i] = x[perm[i]] within each block
  bool real = true;
  std::uint64_t nontrivial = 0;  // per block, multiplications that are not sign flips
};

Stage butterfly_stage(Index block);
Stage twiddle_stage(Index block, bool conjugate);
Stage interleave_stage(Index block);
Stage block_diag_stage(std::vector<cd> values);
Stage block_perm_stage(std::vector<std::size_t> perm);

/// Product of stages; stage 0 acts first.
class StageOp final : public OperatorImpl<StageOp> {
 public:
  StageOp(Index n, std::vector<Stage> stages);
  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  Field field() const override { return real_ ? Field::Real : Field::Complex; }

  template <class T>
  void run(const T* x, T* y, FlopTally& t, bool transpose) const {
    std::copy(x, x + n_, y);
    std::vector<T> tmp(static_cast<std::size_t>(n_));
    const std::size_t m = stages_.size();
    for (std::size_t s = 0; s < m; ++s) {
      const Stage& st = stages_[transpose ? m - 1 - s : s];
      apply_stage(st, y, tmp.data(), t, transpose);
    }
  }

 private:
  template <class T>
  void apply_stage(const Stage& st, T* y, T* tmp, FlopTally& t, bool transpose) const {
    const Index B = st.block;
    const Index h = B / 2;
    const Index blocks = n_ / B;
    switch (st.kind) {
      case Stage::Kind::Butterfly:
        for (Index b = 0; b < blocks; ++b) {
          T* p = y + b * B;
          for (Index i = 0; i < h; ++i) {
            const T a = p[i];
            const T c = p[i + h];
            p[i] = a + c;
            p[i + h] = a - c;
          }
        }
        t.add<T>(static_cast<std::uint64_t>(n_));
        break;
      case Stage::Kind::Twiddle:
        for (Index b = 0; b < blocks; ++b) {
          T* p = y + b * B + h;
          for (Index i = 1; i < h; ++i) p[i] *= narrow<T>(st.values[i]);
        }
        t.mul<T, cd>(static_cast<std::uint64_t>(blocks) * st.nontrivial);
        break;
      case Stage::Kind::Interleave:
        for (Index b = 0; b < blocks; ++b) {
          T* p = y + b * B;
          if (!transpose) {
            for (Index j = 0; j < h; ++j) {
              tmp[2 * j] = p[j];
              tmp[2 * j + 1] = p[j + h];
            }
          } else {
            for (Index j = 0; j < h; ++j) {
              tmp[j] = p[2 * j];
              tmp[j + h] = p[2 * j + 1];
            }
          }
          std::copy(tmp, tmp + B, p);
        }
        break;
      case Stage::Kind::BlockDiag:
        for (Index b = 0; b < blocks; ++b) {
          T* p = y + b * B;
          for (Index i = 0; i < B; ++i) p[i] *= narrow<T>(st.values[i]);
        }
        if (st.real)
          t.mul<T, double>(static_cast<std::uint64_t>(blocks) * st.nontrivial);
        else
          t.mul<T, cd>(static_cast<std::uint64_t>(blocks) * st.nontrivial);
        break;
      case Stage::Kind::BlockPerm:
        for (Index b = 0; b < blocks; ++b) {
          T* p = y + b * B;
          if (!transpose) {
            for (Index i = 0; i < B; ++i) tmp[i] = p[st.perm[i]];
          } else {
            for (Index i = 0; i < B; ++i) tmp[st.perm[i]] = p[i];
          }
          std::copy(tmp, tmp + B, p);
        }
        break;
    }
  }

  Index n_;
  std::vector<Stage> stages_;
  bool real_ = true;
};

/// Sum over support k of v_k Z_f^k; wrapped entries carry the factor f.
class CirculantOp final : public OperatorImpl<CirculantOp> {
 public:
  CirculantOp(Index n, std::vector<std::size_t> pos, std::vector<cd> val, cd f);
  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  Field field() const override { return real_ ? Field::Real : Field::Complex; }

  template <class T>
  void run(const T* x, T* y, FlopTally& t, bool transpose) const {
    std::fill(y, y + n_, T(0));
    std::uint64_t muls = 0;
    for (std::size_t s = 0; s < pos_.size(); ++s) {
      const Index k = static_cast<Index>(pos_[s]);
      const T c = narrow<T>(val_[s]);
      const T cw = narrow<T>(val_[s] * f_);
      if (!transpose) {
        for (Index j = k; j < n_; ++j) y[j] += c * x[j - k];
        for (Index j = 0; j < k; ++j) y[j] += cw * x[j - k + n_];
      } else {
        for (Index j = 0; j + k < n_; ++j) y[j] += c * x[j + k];
        for (Index j = n_ - k; j < n_; ++j) y[j] += cw * x[j + k - n_];
      }
      if (!is_sign(val_[s])) muls += static_cast<std::uint64_t>(n_ - k);
      if (!is_sign(val_[s] * f_)) muls += static_cast<std::uint64_t>(k);
    }
    if (!pos_.empty()) t.add<T>(static_cast<std::uint64_t>(pos_.size() - 1) * n_);
    if (real_)
      t.mul<T, double>(muls);
    else
      t.mul<T, cd>(muls);
  }

 private:
  Index n_;
  std::vector<std::size_t> pos_;
  std::vector<cd> val_;
  cd f_;
  bool real_ = true;
};

/// n x n Toeplitz (t_{i-j}); t holds t_{-(n-1)} .. t_{n-1}.
class ToeplitzOp final : public OperatorImpl<ToeplitzOp> {
 public:
  ToeplitzOp(Index n, std::vector<double> t) : n_(n), t_(std::move(t)) {}
  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  Field field() const override { return Field::Real; }

  template <class T>
  void run(const T* x, T* y, FlopTally& tally, bool transpose) const {
    for (Index i = 0; i < n_; ++i) {
      T acc(0);
      for (Index j = 0; j < n_; ++j) {
        const Index diff = transpose ? j - i : i - j;
        acc += t_[static_cast<std::size_t>(diff + n_ - 1)] * x[j];
      }
      y[i] = acc;
    }
    tally.mul<T, double>(static_cast<std::uint64_t>(n_ * n_));
    tally.add<T>(static_cast<std::uint64_t>(n_ * (n_ - 1)));
  }

 private:
  Index n_;
  std::vector<double> t_;
};

class DenseOp final : public OperatorImpl<DenseOp> {
 public:
  explicit DenseOp(DenseMatrix A) : A_(std::move(A)) {}
  Index rows() const override { return A_.rows(); }
  Index cols() const override { return A_.cols(); }
  Field field() const override { return A_.field(); }
  const DenseMatrix* dense() const override { return &A_; }

  template <class T>
  void run(const T* x, T* y, FlopTally& t, bool transpose) const {
    const Index r = transpose ? A_.cols() : A_.rows();
    const Index c = transpose ? A_.rows() : A_.cols();
    using V = Eigen::Matrix<T, Eigen::Dynamic, 1>;
    Eigen::Map<const V> xv(x, c);
    Eigen::Map<V> yv(y, r);
    if constexpr (std::is_same_v<T, double>) {
      if (transpose)
        yv.noalias() = A_.real().transpose() * xv;
      else
        yv.noalias() = A_.real() * xv;
      t.mul<T, double>(static_cast<std::uint64_t>(r * c));
    } else {
      if (A_.is_real()) {
        if (transpose)
          yv.noalias() = A_.real().transpose().template cast<cd>() * xv;
        else
          yv.noalias() = A_.real().template cast<cd>() * xv;
        t.mul<T, double>(static_cast<std::uint64_t>(r * c));
      } else {
        if (transpose)
          yv.noalias() = A_.complex().transpose() * xv;
        else
          yv.noalias() = A_.complex() * xv;
        t.mul<T, cd>(static_cast<std::uint64_t>(r * c));
      }
    }
    t.add<T>(static_cast<std::uint64_t>(r * (c - 1)));
  }

 private:
  DenseMatrix A_;
};

/// factors[0] * factors[1] * ... (the last factor acts first).
class ProductOp final : public OperatorImpl<ProductOp> {
 public:
  explicit ProductOp(std::vector<OperatorPtr> factors);
  Index rows() const override { return f_.front()->rows(); }
  Index cols() const override { return f_.back()->cols(); }
  Field field() const override { return field_; }

  template <class T>
  void run(const T* x, T* y, FlopTally& t, bool transpose) const {
    const std::size_t k = f_.size();
    std::vector<T> cur(x, x + (transpose ? rows() : cols()));
    std::vector<T> next;
    for (std::size_t s = 0; s < k; ++s) {
      const LinearOperator& op = *f_[transpose ? s : k - 1 - s];
      next.assign(static_cast<std::size_t>(transpose ? op.cols() : op.rows()), T(0));
      if (transpose)
        op.apply_transpose(cur.data(), next.data(), t);
      else
        op.apply(cur.data(), next.data(), t);
      cur.swap(next);
    }
    std::copy(cur.begin(), cur.end(), y);
  }

 private:
  std::vector<OperatorPtr> f_;
  Field field_;
};

class SumOp final : public OperatorImpl<SumOp> {
 public:
  SumOp(std::vector<cd> coeffs, std::vector<OperatorPtr> terms);
  Index rows() const override { return terms_.front()->rows(); }
  Index cols() const override { return terms_.front()->cols(); }
  Field field() const override { return field_; }

  template <class T>
  void run(const T* x, T* y, FlopTally& t, bool transpose) const {
    const Index r = transpose ? cols() : rows();
    std::fill(y, y + r, T(0));
    std::vector<T> tmp(static_cast<std::size_t>(r));
    for (std::size_t s = 0; s < terms_.size(); ++s) {
      if (transpose)
        terms_[s]->apply_transpose(x, tmp.data(), t);
      else
        terms_[s]->apply(x, tmp.data(), t);
      const T c = narrow<T>(coeffs_[s]);
      if (is_sign(coeffs_[s])) {
        for (Index i = 0; i < r; ++i) y[i] += c * tmp[i];
      } else {
        for (Index i = 0; i < r; ++i) y[i] += c * tmp[i];
        if (coeffs_[s].imag() == 0.0)
          t.mul<T, double>(static_cast<std::uint64_t>(r));
        else
          t.mul<T, cd>(static_cast<std::uint64_t>(r));
      }
    }
    t.add<T>(static_cast<std::uint64_t>(terms_.size() - 1) * static_cast<std::uint64_t>(r));
  }

 private:
  std::vector<cd> coeffs_;
  std::vector<OperatorPtr> terms_;
  Field field_;
};

class ScaleOp final : public OperatorImpl<ScaleOp> {
 public:
  ScaleOp(cd alpha, OperatorPtr child) : alpha_(alpha), child_(std::move(child)) {}
  Index rows() const override { return child_->rows(); }
  Index cols() const override { return child_->cols(); }
  Field field() const override {
    return alpha_.imag() == 0.0 ? child_->field() : Field::Complex;
  }

  template <class T>
  void run(const T* x, T* y, FlopTally& t, bool transpose) const {
    if (transpose)
      child_->apply_transpose(x, y, t);
    else
      child_->apply(x, y, t);
    const Index r = transpose ? cols() : rows();
    const T a = narrow<T>(alpha_);
    for (Index i = 0; i < r; ++i) y[i] *= a;
    if (!is_sign(alpha_)) {
      if (alpha_.imag() == 0.0)
        t.mul<T, double>(static_cast<std::uint64_t>(r));
      else
        t.mul<T, cd>(static_cast<std::uint64_t>(r));
    }
  }

 private:
  cd alpha_;
  OperatorPtr child_;
};

/// child restricted to the listed columns (rows = child rows).
class RestrictColumnsOp final : public OperatorImpl<RestrictColumnsOp> {
 public:
  RestrictColumnsOp(OperatorPtr child, std::vector<std::size_t> idx)
      : child_(std::move(child)), idx_(std::move(idx)) {}
  Index rows() const override { return child_->rows(); }
  Index cols() const override { return static_cast<Index>(idx_.size()); }
  Field field() const override { return child_->field(); }
  const OperatorPtr& child() const { return child_; }
  const std::vector<std::size_t>& indices() const { return idx_; }

  template <class T>
  void run(const T* x, T* y, FlopTally& t, bool transpose) const {
    const auto n = static_cast<std::size_t>(child_->cols());
    if (!transpose) {
      std::vector<T> full(n, T(0));
      for (std::size_t k = 0; k < idx_.size(); ++k) full[idx_[k]] = x[k];
      child_->apply(full.data(), y, t);
    } else {
      std::vector<T> full(n);
      child_->apply_transpose(x, full.data(), t);
      for (std::size_t k = 0; k < idx_.size(); ++k) y[k] = full[idx_[k]];
    }
  }

 private:
  OperatorPtr child_;
  std::vector<std::size_t> idx_;
};

/// child restricted to the listed rows (cols = child cols).
class RestrictRowsOp final : public OperatorImpl<RestrictRowsOp> {
 public:
  RestrictRowsOp(OperatorPtr child, std::vector<std::size_t> idx)
      : child_(std::move(child)), idx_(std::move(idx)) {}
  Index rows() const override { return static_cast<Index>(idx_.size()); }
  Index cols() const override { return child_->cols(); }
  Field field() const override { return child_->field(); }

  template <class T>
  void run(const T* x, T* y, FlopTally& t, bool transpose) const {
    const auto n = static_cast<std::size_t>(child_->rows());
    if (!transpose) {
      std::vector<T> full(n);
      child_->apply(x, full.data(), t);
      for (std::size_t k = 0; k < idx_.size(); ++k) y[k] = full[idx_[k]];
    } else {
      std::vector<T> full(n, T(0));
      for (std::size_t k = 0; k < idx_.size(); ++k) full[idx_[k]] = x[k];
      child_->apply_transpose(full.data(), y, t);
    }
  }

 private:
  OperatorPtr child_;
  std::vector<std::size_t> idx_;
};

/// Conjugate transpose of child.
class AdjointOp final : public OperatorImpl<AdjointOp> {
 public:
  explicit AdjointOp(OperatorPtr child) : child_(std::move(child)) {}
  Index rows() const override { return child_->cols(); }
  Index cols() const override { return child_->rows(); }
  Field field() const override { return child_->field(); }

  template <class T>
  void run(const T* x, T* y, FlopTally& t, bool transpose) const {
    const Index in = transpose ? rows() : cols();
    const Index out = transpose ? cols() : rows();
    if constexpr (std::is_same_v<T, double>) {
      if (transpose)
        child_->apply(x, y, t);
      else
        child_->apply_transpose(x, y, t);
    } else {
      std::vector<cd> xc(x, x + in);
      for (auto& v : xc) v = std::conj(v);
      if (transpose)
        child_->apply(xc.data(), y, t);
      else
        child_->apply_transpose(xc.data(), y, t);
      for (Index i = 0; i < out; ++i) y[i] = std::conj(y[i]);
    }
  }

 private:
  OperatorPtr child_;
};

/// (a I + N)^{-1} where N carries `b` on the k-th sub- (lower) or
/// super- (upper) diagonal; b has n-k entries, b[i] sits in column i
/// (lower) or row i (upper). Applied by substitution.
class InverseBidiagOp final : public OperatorImpl<InverseBidiagOp> {
 public:
  InverseBidiagOp(Index n, cd a, Index k, std::vector<cd> b, bool upper);
  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  Field field() const override { return real_ ? Field::Real : Field::Complex; }

  template <class T>
  void run(const T* x, T* y, FlopTally& t, bool transpose) const {
    // lower: L = aI + sum_i b_i e_{i+k} e_i^T ; upper: U = aI + sum_i b_i e_i e_{i+k}^T.
    // L^T is upper with the same b, U^T is lower with the same b.
    const bool lower = upper_ == transpose;
    const T a = narrow<T>(a_);
    const bool unit_a = is_sign(a_);
    std::copy(x, x + n_, y);
    if (lower) {
      for (Index i = 0; i < n_; ++i) {
        if (i >= k_) y[i] -= narrow<T>(b_[static_cast<std::size_t>(i - k_)]) * y[i - k_];
        y[i] = unit_a ? a * y[i] : y[i] / a;
      }
    } else {
      for (Index i = n_ - 1; i >= 0; --i) {
        if (i + k_ < n_) y[i] -= narrow<T>(b_[static_cast<std::size_t>(i)]) * y[i + k_];
        y[i] = unit_a ? a * y[i] : y[i] / a;
      }
    }
    const auto m = static_cast<std::uint64_t>(n_ - k_);
    t.add<T>(m);
    const std::uint64_t muls = nontrivial_b_ + (unit_a ? 0 : static_cast<std::uint64_t>(n_));
    if (real_)
      t.mul<T, double>(muls);
    else
      t.mul<T, cd>(muls);
  }

 private:
  Index n_;
  cd a_;
  Index k_;
  std::vector<cd> b_;
  bool upper_;
  bool real_ = true;
  std::uint64_t nontrivial_b_ = 0;
};

/// P * G(0,1,theta_0) * G(1,2,theta_1) * ... * G(n-2,n-1,theta_{n-2}).
class GivensOp final : public OperatorImpl<GivensOp> {
 public:
  GivensOp(std::vector<double> theta, std::vector<std::size_t> perm);
  Index rows() const override { return static_cast<Index>(perm_.size()); }
  Index cols() const override { return rows(); }
  Field field() const override { return Field::Real; }

  template <class T>
  void run(const T* x, T* y, FlopTally& t, bool transpose) const {
    const auto n = perm_.size();
    std::vector<T> w(x, x + n);
    auto rot = [&](std::size_t i, bool tr) {
      const double c = c_[i];
      const double s = tr ? -s_[i] : s_[i];
      const T a = w[i];
      const T b = w[i + 1];
      w[i] = c * a + s * b;
      w[i + 1] = -s * a + c * b;
    };
    if (!transpose) {
      for (std::size_t i = n - 1; i-- > 0;) rot(i, false);
      for (std::size_t i = 0; i < n; ++i) y[i] = w[perm_[i]];
    } else {
      std::vector<T> z(n);
      for (std::size_t i = 0; i < n; ++i) z[perm_[i]] = w[i];
      w.swap(z);
      for (std::size_t i = 0; i + 1 < n; ++i) rot(i, true);
      std::copy(w.begin(), w.end(), y);
    }
    t.mul<T, double>(4 * static_cast<std::uint64_t>(n - 1));
    t.add<T>(2 * static_cast<std::uint64_t>(n - 1));
  }

 private:
  std::vector<double> c_;
  std::vector<double> s_;
  std::vector<std::size_t> perm_;
};

/// [[A, B], [B, -A]] for square A, B of equal order.
class Block2x2Op final : public OperatorImpl<Block2x2Op> {
 public:
  Block2x2Op(OperatorPtr a, OperatorPtr b) : a_(std::move(a)), b_(std::move(b)) {}
  Index rows() const override { return 2 * a_->rows(); }
  Index cols() const override { return rows(); }
  Field field() const override { return join(a_->field(), b_->field()); }

  template <class T>
  void run(const T* x, T* y, FlopTally& t, bool transpose) const {
    const Index h = a_->rows();
    std::vector<T> p(static_cast<std::size_t>(h));
    std::vector<T> q(static_cast<std::size_t>(h));
    auto ap = [&](const LinearOperator& op, const T* in, T* out) {
      if (transpose)
        op.apply_transpose(in, out, t);
      else
        op.apply(in, out, t);
    };
    // Both the operator and its transpose have the form [[A', B'], [B', -A']].
    ap(*a_, x, p.data());
    ap(*b_, x + h, q.data());
    for (Index i = 0; i < h; ++i) y[i] = p[i] + q[i];
    ap(*b_, x, p.data());
    ap(*a_, x + h, q.data());
    for (Index i = 0; i < h; ++i) y[h + i] = p[i] - q[i];
    t.add<T>(static_cast<std::uint64_t>(2 * h));
  }

 private:
  OperatorPtr a_;
  OperatorPtr b_;
};

}  // namespace sketchlab::detail
