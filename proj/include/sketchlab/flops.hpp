#pragma once

#include "sketchlab/dense.hpp"

#include <cstdint>
#include <type_traits>

namespace sketchlab {

/// Operation counter for operator applies.
///
/// `additions` and `multiplications` count field operations: one complex
/// add or multiply is one operation, as in the flop budgets of the
/// multiplier catalog. Multiplication by an exact real +1/-1 is a sign flip
/// and is not counted. `real_equivalent` converts to real flops (complex
/// add = 2, complex*complex = 6, complex*real = 2).
struct FlopTally {
  std::uint64_t additions = 0;
  std::uint64_t multiplications = 0;
  std::uint64_t real_equivalent = 0;

  std::uint64_t total() const { return additions + multiplications; }
  void reset() { *this = FlopTally{}; }

  /// n additions on data of scalar type T.
  template <class T>
  void add(std::uint64_t n) {
    additions += n;
    real_equivalent += std::is_same_v<T, double> ? n : 2 * n;
  }

  /// n multiplications of T data by an S scalar.
  template <class T, class S>
  void mul(std::uint64_t n) {
    multiplications += n;
    if constexpr (std::is_same_v<T, double> && std::is_same_v<S, double>)
      real_equivalent += n;
    else if constexpr (std::is_same_v<T, double> || std::is_same_v<S, double>)
      real_equivalent += 2 * n;
    else
      real_equivalent += 6 * n;
  }

  FlopTally& operator+=(const FlopTally& o) {
    additions += o.additions;
    multiplications += o.multiplications;
    real_equivalent += o.real_equivalent;
    return *this;
  }
};

/// Operation count of an (m x k) by (k x n) matrix product.
inline void count_gemm(FlopTally& t, Index m, Index k, Index n, Field a, Field b) {
  const auto mul = static_cast<std::uint64_t>(m * k * n);
  const auto add = static_cast<std::uint64_t>(m * (k > 0 ? k - 1 : 0) * n);
  if (a == Field::Real && b == Field::Real) {
    t.mul<double, double>(mul);
    t.add<double>(add);
  } else if (a == Field::Real || b == Field::Real) {
    t.mul<cd, double>(mul);
    t.add<cd>(add);
  } else {
    t.mul<cd, cd>(mul);
    t.add<cd>(add);
  }
}

}  // namespace sketchlab
