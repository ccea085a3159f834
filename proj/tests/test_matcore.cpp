#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "isoflow/error.hpp"
#include "isoflow/matcore.hpp"

using namespace isoflow;

namespace {

Matrix random_hermitian(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = g(rng);
    for (int j = i + 1; j < n; ++j) {
      m(i, j) = Complex(g(rng), g(rng));
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

Matrix random_general(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::BadInput;
}

}  // namespace

TEST_CASE("skew projection") {
  const std::vector<double> d{1.0, 2.0, 3.0};
  CHECK(skew_projection(Matrix::diagonal(d)).matrix().max_abs() == 0.0);

  Matrix two(2, 2);
  const Complex b(0.3, -1.2);
  two(0, 0) = 1.5;
  two(1, 1) = -0.5;
  two(0, 1) = b;
  two(1, 0) = std::conj(b);
  const Matrix p = skew_projection(two).matrix();
  CHECK(p(0, 0) == Complex(0.0));
  CHECK(p(1, 1) == Complex(0.0));
  CHECK(p(0, 1) == -b);
  CHECK(p(1, 0) == std::conj(b));

  const auto h = HessenbergFunction::validate({2, 4, 4, 5, 5});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto l = random_staircase(h, seed, false).matrix.matrix();
    const Matrix pl = skew_projection(l).matrix();
    CHECK(skew_hermitian_defect(pl) == 0.0);
    CHECK(staircase_leakage(h, pl) == 0.0);
    CHECK(lower_triangle_max(l - pl) == 0.0);
  }
  Matrix bad(2, 2);
  bad(0, 1) = 1.0;
  CHECK(kind_of([&] { skew_projection(bad); }) == ErrorKind::NotHermitian);
}

TEST_CASE("commutator") {
  const Matrix a = random_general(4, 1);
  CHECK(commutator(a, a).max_abs() == 0.0);
  const std::vector<double> d1{1, 2, 3}, d2{-1, 5, 0.5};
  CHECK(commutator(Matrix::diagonal(d1), Matrix::diagonal(d2)).max_abs() == 0.0);
  CHECK(kind_of([&] { commutator(Matrix(2, 2), Matrix(3, 3)); }) == ErrorKind::ShapeMismatch);

  const auto h = HessenbergFunction::minimal(3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix l = random_staircase(h, seed, false).matrix.matrix();
    const Matrix c = commutator(l, skew_projection(l).matrix());
    CHECK(hermitian_defect(c) <= 1e-15);
    CHECK(staircase_leakage(h, c) <= 1e-15);
    CHECK(std::abs(c.trace()) <= 1e-14);
  }
}

TEST_CASE("J operator and the [L, N] identity") {
  Matrix zero(3, 3);
  CHECK(apply_J(SkewHermitian::from_matrix(zero)).matrix().max_abs() == 0.0);

  Matrix w(3, 3);
  const Complex x(0.4, 0.1), y(-1.0, 2.0);
  w(0, 1) = x;
  w(1, 2) = x;
  w(0, 2) = y;
  w(1, 0) = -std::conj(x);
  w(2, 1) = -std::conj(x);
  w(2, 0) = -std::conj(y);
  const auto omega = SkewHermitian::from_matrix(w);
  const Matrix jw = apply_J(omega).matrix();
  CHECK(jw(0, 1) == x);
  CHECK(jw(1, 2) == x);
  CHECK(jw(0, 2) == 2.0 * y);
  CHECK((apply_J_inverse(apply_J(omega)).matrix() - w).max_abs() <= 1e-16);
  CHECK((apply_J(apply_J_inverse(omega)).matrix() - w).max_abs() <= 1e-16);

  Matrix diag_part(2, 2);
  diag_part(0, 0) = Complex(0.0, 1.0);
  CHECK(kind_of([&] { apply_J_inverse(SkewHermitian::from_matrix(diag_part)); }) ==
        ErrorKind::NonzeroDiagonal);
  CHECK(kind_of([&] { SkewHermitian::from_matrix(Matrix::identity(2)); }) == ErrorKind::BadInput);

  // [L, N]_ij = (j - i) L_ij.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix l = random_hermitian(5, seed);
    std::vector<double> nd{1, 2, 3, 4, 5};
    const Matrix c = commutator(l, Matrix::diagonal(nd));
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) CHECK(std::abs(c(i, j) - double(j - i) * l(i, j)) <= 1e-14);
  }
}

TEST_CASE("Hermitian eigendecomposition") {
  const std::vector<double> d{3.0, 1.0, 2.0};
  const auto e = hermitian_eigen(Matrix::diagonal(d));
  CHECK(e.values == std::vector<double>{1.0, 2.0, 3.0});
  const Matrix& u = e.vectors.matrix();
  CHECK(u(1, 0) == Complex(1.0));
  CHECK(u(2, 1) == Complex(1.0));
  CHECK(u(0, 2) == Complex(1.0));

  Matrix swap(2, 2);
  swap(0, 1) = 1.0;
  swap(1, 0) = 1.0;
  const auto s = hermitian_eigen(swap);
  CHECK(s.values[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(s.values[1] == doctest::Approx(1.0).epsilon(1e-15));

  for (int n : {2, 3, 5, 8, 12}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Matrix l = random_hermitian(n, 100 * n + seed);
      const auto eig = hermitian_eigen(l);
      const Matrix& v = eig.vectors.matrix();
      std::vector<double> vals = eig.values;
      const Matrix resid = l * v - v * Matrix::diagonal(vals);
      CHECK(resid.frobenius_norm() <= 1e-10 * l.frobenius_norm());
      CHECK(eig.vectors.unitarity_residual() <= 1e-10);
      CHECK(std::is_sorted(vals.begin(), vals.end()));
      CHECK(std::abs(l.trace().real() - std::accumulate(vals.begin(), vals.end(), 0.0)) <= 1e-12 * n);
      // Phase convention: the largest entry of each column is real positive.
      for (int c = 0; c < n; ++c) {
        int best = 0;
        for (int r = 1; r < n; ++r)
          if (std::abs(v(r, c)) > std::abs(v(best, c))) best = r;
        CHECK(v(best, c).imag() == 0.0);
        CHECK(v(best, c).real() > 0.0);
      }
    }
  }

  const std::vector<double> twice{1.0, 1.0, 2.0};
  const auto degenerate = hermitian_eigen(Matrix::diagonal(twice));
  CHECK_FALSE(degenerate.simple);
  CHECK(kind_of([&] { degenerate.spectrum(); }) == ErrorKind::DegenerateSpectrum);
  EigenOptions capped;
  capped.max_sweeps = 1;
  CHECK(kind_of([&] { hermitian_eigen(random_hermitian(8, 3), capped); }) == ErrorKind::NoConvergence);
}

TEST_CASE("positive QR") {
  const auto id = qr_positive(Matrix::identity(3));
  CHECK((id.q.matrix() - Matrix::identity(3)).max_abs() == 0.0);
  CHECK((id.r - Matrix::identity(3)).max_abs() == 0.0);

  const Matrix u = random_unitary(4, 9).matrix();
  const auto qu = qr_positive(u);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i != j) CHECK(std::abs(qu.r(i, j)) <= 1e-14);
    }
  for (int i = 0; i < 4; ++i) CHECK(std::abs(qu.r(i, i) - 1.0) <= 1e-14);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix m = random_general(4, seed);
    const auto qr = qr_positive(m);
    CHECK((m - qr.q.matrix() * qr.r).frobenius_norm() <= 1e-13 * m.frobenius_norm());
    CHECK(qr.q.unitarity_residual() <= 1e-14);
    CHECK(lower_triangle_max(qr.r) == 0.0);
    for (int i = 0; i < 4; ++i) {
      CHECK(qr.r(i, i).imag() == 0.0);
      CHECK(qr.r(i, i).real() > 0.0);
    }
    const auto again = qr_positive(m);
    CHECK(again.q.matrix() == qr.q.matrix());
    CHECK(again.r == qr.r);

    Matrix bumped = m;
    bumped(1, 2) += 1e-12;
    CHECK((qr_positive(bumped).q.matrix() - qr.q.matrix()).max_abs() <= 1e-10);
  }
  Matrix singular(3, 3);
  singular(0, 0) = 1.0;
  CHECK(kind_of([&] { qr_positive(singular); }) == ErrorKind::SingularInput);
}

TEST_CASE("Hermitian exponential") {
  const Matrix l = random_hermitian(4, 5);
  CHECK((expm_hermitian(l, 0.0) - Matrix::identity(4)).max_abs() <= 1e-14);
  const std::vector<double> d{0.5, -1.0, 2.0};
  const Matrix e = expm_hermitian(Matrix::diagonal(d), 1.0);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(e(i, i) - std::exp(d[i])) <= 1e-14 * std::exp(2.0));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix m = random_hermitian(5, seed + 50);
    CHECK((expm_hermitian(m, 1.0) * expm_hermitian(m, -1.0) - Matrix::identity(5)).max_abs() <= 1e-11);
    // Shifting multiplies by a positive scalar.
    const Matrix a = expm_hermitian(m, 0.7);
    const Matrix b = expm_hermitian(m, 0.7, 1.3) * Complex(std::exp(0.7 * 1.3));
    CHECK((a - b).max_abs() <= 1e-12 * a.max_abs());
  }
}

TEST_CASE("staircase construction and sampling") {
  const auto h = HessenbergFunction::validate({3, 3, 5, 6, 6, 6});
  const auto s1 = random_staircase(h, 42, false);
  const auto s2 = random_staircase(h, 42, false);
  CHECK(s1.matrix.matrix() == s2.matrix.matrix());
  CHECK(staircase_leakage(h, s1.matrix.matrix()) == 0.0);
  CHECK(hermitian_defect(s1.matrix.matrix()) == 0.0);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (!h.allows(i, j)) CHECK(s1.matrix.matrix()(i, j) == Complex(0.0));

  const auto real = random_staircase(h, 42, true);
  CHECK(real.matrix.matrix().max_imag() == 0.0);
  CHECK(real.matrix.real_mode());

  int simple = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed)
    if (hermitian_eigen(random_staircase(h, seed, false).matrix.matrix()).simple) ++simple;
  CHECK(simple == 1000);

  Matrix outside = s1.matrix.matrix();
  outside(0, 5) = 1e-3;
  outside(5, 0) = 1e-3;
  CHECK(kind_of([&] { StaircaseHermitian::from_matrix(h, outside); }) == ErrorKind::BadInput);
  Matrix nonherm = s1.matrix.matrix();
  nonherm(0, 1) += 0.5;
  CHECK(kind_of([&] { StaircaseHermitian::from_matrix(h, nonherm); }) == ErrorKind::NotHermitian);
  CHECK(kind_of([&] { StaircaseHermitian::from_matrix(h, Matrix(3, 3)); }) == ErrorKind::ShapeMismatch);
  CHECK(kind_of([&] { StaircaseHermitian::from_matrix(h, s1.matrix.matrix(), true); }) == ErrorKind::BadInput);

  CHECK(kind_of([&] { Spectrum::from_values({1.0, 1.0}); }) == ErrorKind::DegenerateSpectrum);
  const auto sp = Spectrum::from_values({-1.0, 0.5, 2.0});
  CHECK(sp.min_gap() == 1.5);
  CHECK(sp.range() == 3.0);
  CHECK(sp.simple());
  CHECK(kind_of([&] { UnitaryFrame::from_matrix(random_general(3, 1)); }) == ErrorKind::NotUnitary);
  CHECK(random_unitary(5, 3).unitarity_residual() <= 1e-14);
  CHECK(random_unitary(5, 3, true).matrix().max_imag() == 0.0);
}
