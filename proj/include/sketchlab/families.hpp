#pragma once

#include "sketchlab/multiplier.hpp"

#include <string>
#include <vector>

namespace sketchlab::mult {

/// Builds the multiplier described by `d` (children first). Deterministic.
Multiplier build(const Descriptor& d);

/// Family tags accepted by `build`.
std::vector<std::string> known_families();

// Primitives.
Multiplier identity(Index n);
Multiplier permutation(Index n, std::uint64_t seed);
Multiplier permutation(const std::vector<std::size_t>& perm);
Multiplier unit_diagonal(Index n, std::uint64_t seed, Field field = Field::Real);
Multiplier unit_diagonal(const std::vector<cd>& entries);
Multiplier shift(Index n, cd f);
Multiplier hadamard_primitive(Index n);

// Abridged transforms, unscaled.
Multiplier abridged_hadamard(Index n, int d);
Multiplier abridged_fourier(Index n, int d);

enum class Side { Left, Right };

/// "ash", "aph", "asph", "asf", "apf", "aspf". Side::Left gives P*D*base,
/// Side::Right gives base*D*P (random column scaling and permutation).
Multiplier abridged_variant(const std::string& family, Index n, int d, std::uint64_t seed,
                            Side side = Side::Left);

/// Recursively randomized abridged transform; kind 'H' or 'F'.
Multiplier randomized_abridged(Index n, int d, char kind, std::uint64_t seed);

// Circulant families.
Multiplier sparse_f_circulant(Index n, Index q, cd f, std::uint64_t seed, Field values = Field::Real);
/// Dense circulant with i.i.d. first column; values "gaussian" or "sign".
Multiplier circulant(Index n, const std::string& values, std::uint64_t seed);
Multiplier uniformly_sparse(Index n, Index q, std::uint64_t seed);
Multiplier abridged_f_circulant(Index n, int d, cd f, std::uint64_t seed);

/// (I + D Z)^{-1} (lower) or (I + Z^T D)^{-1} (upper) with random signs D.
Multiplier inverse_bidiagonal(Index n, std::uint64_t seed, bool upper = false);

/// (a I + N_k)^{-1} with constant value b on the k-th sub- or superdiagonal.
Multiplier inverse_bidiagonal_const(Index n, double a, Index k, double b, bool upper);

Multiplier givens_chain(Index n, int d_fourier, std::uint64_t seed);
Multiplier block2x2_circulant(Index n, std::uint64_t seed);

// Dense families (n x l).
Multiplier gaussian(Index n, Index l, std::uint64_t seed);
/// i.i.d. entries in {-1, 0, 1}, each with probability 1/3.
Multiplier ternary(Index n, Index l, std::uint64_t seed);
Multiplier gaussian_toeplitz(Index n, std::uint64_t seed);
Multiplier explicit_matrix(const DenseMatrix& A);

// Combinators.
Multiplier sum(const std::vector<cd>& coeffs, const std::vector<Multiplier>& terms);
Multiplier product(const std::vector<Multiplier>& factors);
Multiplier restrict_columns(const Multiplier& B, const std::vector<std::size_t>& cols);
Multiplier leftmost(const Multiplier& B, Index l);
Multiplier random_columns(const Multiplier& B, Index l, std::uint64_t seed);
Multiplier restrict_rows(const Multiplier& B, const std::vector<std::size_t>& rows);
Multiplier topmost(const Multiplier& B, Index k);
Multiplier scaled(const Multiplier& B, cd alpha);
Multiplier adjoint(const Multiplier& B);

/// Constant c > 0 for which c * B has orthonormal columns (n x n, unrestricted
/// families only); throws for families without such a constant.
double unitary_scale(const Descriptor& d);

/// c * B with c = unitary_scale(B).
Multiplier normalized(const Multiplier& B);

/// Models how l-wide multipliers are built from named recipes used by the
/// harness. Recognized names are listed in docs and in `recipe_names()`.
Descriptor recipe(const std::string& name, Index n, Index l);
std::vector<std::string> recipe_names();

}  // namespace sketchlab::mult
