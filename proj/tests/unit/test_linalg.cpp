#include <doctest.h>

#include "sketchlab/linalg.hpp"
#include "sketchlab/matrix_io.hpp"
#include "sketchlab/rng.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace sketchlab;
using namespace sketchlab::linalg;
using namespace sketchlab::io;

namespace {

// Independent oracle: two-sided Jacobi SVD on column-major copies.
Eigen::VectorXd jacobi_sigma(const RMat& A) {
  Eigen::MatrixXd a = A;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
}

RMat projector(const RMat& U) { return U * U.transpose(); }

RMat fixed_rank(Index m, Index n, Index r, Rng& rng) {
  return gaussian_matrix(m, r, rng).real() * gaussian_matrix(r, n, rng).real();
}

}  // namespace

TEST_CASE("rng is deterministic and seed-sensitive") {
  Rng a(7), b(7), c(8);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
  }
  CHECK(Rng(7).normal() == Rng(7).normal());
  CHECK(Rng(7).next_u64() != c.next_u64());
}

TEST_CASE("rng permutation and sampling") {
  Rng rng(3);
  auto p = rng.permutation(50);
  std::vector<int> seen(50, 0);
  for (auto v : p) seen[v]++;
  for (int s : seen) CHECK(s == 1);
  CHECK(rng.draws() == 49);

  auto s = rng.sample_without_replacement(20, 20);
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == i);
}

TEST_CASE("gaussian_matrix moments") {
  Rng rng(2024);
  const RMat G = gaussian_matrix(200, 200, rng).real();
  const double mean = G.mean();
  const double var = (G.array() - mean).square().mean();
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.05);
  CHECK_THROWS_AS(gaussian_matrix(0, 3, rng), InvalidArgument);
}

TEST_CASE("gaussian_matrix is bitwise reproducible") {
  Rng a(11), b(11);
  const RMat x = gaussian_matrix(13, 17, a).real();
  const RMat y = gaussian_matrix(13, 17, b).real();
  CHECK((x.array() == y.array()).all());
}

TEST_CASE("gaussian spectral norm tail bound") {
  Rng rng(5);
  int below = 0;
  for (int t = 0; t < 1000; ++t)
    if (spectral_norm(gaussian_matrix(64, 64, rng)) < 17.0) ++below;
  CHECK(below >= 990);
}

TEST_CASE("orthonormalize_columns") {
  SUBCASE("identity is unchanged") {
    auto res = orthonormalize_columns(DenseMatrix::identity(4), 0.0);
    CHECK(res.U.cols() == 4);
    CHECK(max_abs_diff(res.U, DenseMatrix::identity(4)) < 1e-15);
  }
  SUBCASE("duplicate column is dropped") {
    RMat A(3, 2);
    A << 1, 1, 2, 2, 3, 3;
    auto res = orthonormalize_columns(A);
    CHECK(res.U.cols() == 1);
    CHECK(res.dropped == 1);
    CHECK(std::abs(res.U.real().col(0).norm() - 1.0) < 1e-14);
  }
  SUBCASE("all-zero input gives an empty basis") {
    auto res = orthonormalize_columns(DenseMatrix::zeros(5, 3));
    CHECK(res.empty_basis);
    CHECK(res.U.cols() == 0);
    CHECK(res.U.rows() == 5);
  }
  SUBCASE("random full rank spans the same space") {
    Rng rng(9);
    const RMat M = gaussian_matrix(50, 10, rng).real();
    auto res = orthonormalize_columns(M);
    REQUIRE(res.U.cols() == 10);
    CHECK(orthonormality_error(res.U) <= 1e-12 * 10);
    Eigen::MatrixXd mc = M;
    Eigen::JacobiSVD<Eigen::MatrixXd> js(mc, Eigen::ComputeThinU);
    const RMat Ur = js.matrixU();
    CHECK((projector(res.U.real()) - projector(Ur)).norm() < 1e-12);
  }
  SUBCASE("complex columns") {
    Rng rng(10);
    CMat M(30, 6);
    for (Index i = 0; i < 30; ++i)
      for (Index j = 0; j < 6; ++j) M(i, j) = {rng.normal(), rng.normal()};
    auto res = orthonormalize_columns(M);
    CHECK(res.U.cols() == 6);
    CHECK(orthonormality_error(res.U) <= 6e-12);
  }
}

TEST_CASE("extend_orthonormal keeps the old basis and grows the span") {
  Rng rng(12);
  const RMat M = gaussian_matrix(40, 8, rng).real();
  auto first = orthonormalize_columns(DenseMatrix(RMat(M.leftCols(3))));
  auto grown = extend_orthonormal(first.U, DenseMatrix(RMat(M.rightCols(5))), 1e-12, 1.0);
  REQUIRE(grown.U.cols() == 8);
  CHECK(max_abs_diff(DenseMatrix(RMat(grown.U.real().leftCols(3))), first.U) == 0.0);
  CHECK(orthonormality_error(grown.U) < 1e-12 * 8);
  const RMat P = projector(grown.U.real());
  CHECK((P * M - M).norm() < 1e-12 * M.norm());
}

TEST_CASE("svd examples") {
  SUBCASE("diagonal") {
    RMat D = RMat::Zero(3, 3);
    D.diagonal() << 3, 2, 1;
    auto s = svd(D);
    REQUIRE(s.rank() == 3);
    CHECK(s.sigma(0) == doctest::Approx(3.0));
    CHECK(s.sigma(2) == doctest::Approx(1.0));
    CHECK((s.S.real().cwiseAbs() - RMat::Identity(3, 3)).norm() < 1e-14);
    CHECK((s.T.real().cwiseAbs() - RMat::Identity(3, 3)).norm() < 1e-14);
  }
  SUBCASE("rank one outer product") {
    Eigen::VectorXd u(2), v(5);
    u << 0, 2;
    v << 0, 3, 0, 4, 0;
    auto s = svd(RMat(u * v.transpose()));
    REQUIRE(s.rank() == 1);
    CHECK(s.sigma(0) == doctest::Approx(10.0).epsilon(1e-14));
  }
  SUBCASE("random reconstruction and orthonormal factors") {
    Rng rng(4);
    for (auto [m, n] : {std::pair<Index, Index>{30, 20}, {20, 30}, {512, 512}}) {
      const DenseMatrix M = gaussian_matrix(m, n, rng);
      auto s = svd(M);
      const RMat R = s.S.real() * s.sigma.asDiagonal() * s.T.real().transpose();
      CHECK((R - M.real()).norm() <= 1e-10 * s.sigma(0) * std::sqrt(double(std::min(m, n))));
      CHECK(spectral_norm(DenseMatrix(RMat(R - M.real()))) <= 1e-10 * s.sigma(0));
      CHECK(orthonormality_error(s.S) <= 1e-12 * double(s.rank()));
      CHECK(orthonormality_error(s.T) <= 1e-12 * double(s.rank()));
      for (Index j = 1; j < s.rank(); ++j) CHECK(s.sigma(j) <= s.sigma(j - 1));
      if (m < 100) CHECK((s.sigma - jacobi_sigma(M.real())).norm() < 1e-12 * s.sigma(0));
    }
  }
  SUBCASE("non-finite input") {
    RMat A = RMat::Ones(2, 2);
    A(0, 1) = std::nan("");
    CHECK_THROWS_AS(svd(A), InvalidInput);
  }
}

TEST_CASE("numerical_rank") {
  RMat D = RMat::Zero(2, 2);
  D.diagonal() << 1.0, 1e-7;
  CHECK(numerical_rank(D, 1e-5) == 1);
  CHECK(numerical_rank(DenseMatrix::zeros(4, 4), 1e-5) == 0);
  Rng rng(1);
  CHECK(numerical_rank(fixed_rank(30, 25, 7, rng), 1e-8) == 7);
}

TEST_CASE("truncate_svd and Eckart-Young") {
  RMat D = RMat::Zero(3, 3);
  D.diagonal() << 3, 2, 1;
  auto t = truncate_svd(D, 2);
  RMat expect = RMat::Zero(3, 3);
  expect.diagonal() << 3, 2, 0;
  CHECK((t.Mr.real() - expect).norm() < 1e-14);
  CHECK(spectral_norm(t.E) == doctest::Approx(1.0));
  CHECK_THROWS_AS(truncate_svd(D, 4), InvalidArgument);

  Rng rng(21);
  const DenseMatrix M = gaussian_matrix(40, 40, rng);
  const auto sig = jacobi_sigma(M.real());
  for (Index r : {1, 5, 17, 39}) {
    auto tr = truncate_svd(M, r);
    CHECK(std::abs(spectral_norm(tr.E) - sig(r)) <= 1e-10 * sig(0));
    const double tail = sig.tail(40 - r).squaredNorm();
    CHECK(std::abs(frobenius_norm(tr.E) * frobenius_norm(tr.E) - tail) <= 1e-9 * tail);
  }
  CHECK(frobenius_norm(truncate_svd(M, 40).E) < 1e-12 * sig(0));
}

TEST_CASE("pseudo_inverse") {
  RMat A(3, 3);
  A << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  CHECK((pseudo_inverse(A).real() - A.inverse()).norm() < 1e-10 * A.inverse().norm());

  const auto Z = pseudo_inverse(DenseMatrix::zeros(3, 5));
  CHECK(Z.rows() == 5);
  CHECK(Z.cols() == 3);
  CHECK(frobenius_norm(Z) == 0.0);

  Rng rng(6);
  const RMat W = fixed_rank(10, 6, 3, rng);
  const RMat X = pseudo_inverse(W).real();
  CHECK((W * X * W - W).norm() < 1e-9 * W.norm());
  CHECK((X * W * X - X).norm() < 1e-9 * X.norm());
  CHECK(((W * X).transpose() - W * X).norm() < 1e-9);
  CHECK(((X * W).transpose() - X * W).norm() < 1e-9);
  const auto sig = jacobi_sigma(W);
  CHECK(spectral_norm(X) == doctest::Approx(1.0 / sig(2)).epsilon(1e-10));
}

TEST_CASE("spectral and Frobenius norms") {
  RMat D = RMat::Zero(2, 2);
  D.diagonal() << 5, 1;
  CHECK(spectral_norm(D) == doctest::Approx(5.0));
  CHECK(frobenius_norm(D) == doctest::Approx(std::sqrt(26.0)));

  Rng rng(8);
  const DenseMatrix M = gaussian_matrix(20, 20, rng);
  const DenseMatrix Q = random_orthogonal(20, rng);
  CHECK(std::abs(spectral_norm(Q * M) - spectral_norm(M)) <= 1e-12 * spectral_norm(M));
  const double oracle = jacobi_sigma(M.real())(0);
  for (auto method : {NormMethod::Svd, NormMethod::Gram, NormMethod::Lanczos, NormMethod::Power}) {
    NormOptions o;
    o.method = method;
    o.max_iter = method == NormMethod::Power ? 20000 : 0;
    o.rel_tol = method == NormMethod::Power ? 1e-12 : 1e-10;
    CHECK(std::abs(spectral_norm(M, o) - oracle) <= 1e-8 * oracle);
  }
  CHECK(frobenius_norm(M) <= std::sqrt(20.0) * spectral_norm(M));

  const DenseMatrix big = gaussian_matrix(300, 120, rng);
  CHECK(spectral_norm(big) == doctest::Approx(jacobi_sigma(big.real())(0)).epsilon(1e-10));
}

TEST_CASE("matrix file round trips") {
  Rng rng(30);
  const DenseMatrix R = gaussian_matrix(4, 3, rng);
  CMat C(2, 2);
  C << cd(1, -2), cd(0, 0.5), cd(-3, 0), cd(1e-300, -1e300);

  for (const DenseMatrix& A : {R, DenseMatrix(C)}) {
    std::stringstream bin;
    write_sklb(bin, A);
    const DenseMatrix B = read_sklb(bin);
    CHECK(B.field() == A.field());
    CHECK(max_abs_diff(A, B) == 0.0);

    std::stringstream tsv;
    write_tsv(tsv, A);
    const DenseMatrix T = read_tsv(tsv);
    CHECK(T.field() == A.field());
    CHECK(max_abs_diff(A, T) == 0.0);
  }

  std::stringstream bad("XXXX");
  CHECK_THROWS(read_sklb(bad));
}
