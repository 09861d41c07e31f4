#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string_view>
#include <vector>

namespace sketchlab {

/// Seeded random stream: xoshiro256** state expanded from a 64-bit seed by
/// splitmix64, standard normals by the Box-Muller transform.
///
/// Every sample is produced with integer arithmetic plus `std::log`,
/// `std::sqrt`, `std::cos` and `std::sin`, so sequences are identical on any
/// IEEE-754 platform with a correctly rounded libm for those calls.
///
/// `draws()` counts the random variables handed out (one per returned value,
/// including each normal of a Box-Muller pair).
class Rng {
 public:
  static constexpr std::string_view algorithm = "xoshiro256**/splitmix64/box-muller";

  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  double normal();
  /// +1 or -1 with probability 1/2 each.
  double sign();
  /// exp(i*theta) with theta uniform on [0, 2*pi).
  std::complex<double> unit_complex();

  /// Uniformly random permutation of {0..n-1} by Fisher-Yates (n-1 draws).
  std::vector<std::size_t> permutation(std::size_t n);
  /// k distinct values from {0..n-1}, uniform without replacement (k draws).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::uint64_t raw();

  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
  std::uint64_t draws_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic child seed for (parent, salt); used for trial and subtree seeds.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t salt);

/// Trial seed convention: base XOR index.
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) { return base ^ index; }

}  // namespace sketchlab
