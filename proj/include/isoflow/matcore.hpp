#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "isoflow/hessfn.hpp"

namespace isoflow {

using Complex = std::complex<double>;

// Dense row-major complex matrix. Sizes in this project are small (n <= 12),
// so there is no blocking or expression-template machinery.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols) {}

  static Matrix identity(int n);
  static Matrix zero(int n) { return Matrix(n, n); }
  static Matrix diagonal(std::span<const double> diag);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Complex& operator()(int r, int c) { return data_[std::size_t(r) * cols_ + c]; }
  const Complex& operator()(int r, int c) const { return data_[std::size_t(r) * cols_ + c]; }

  std::span<const Complex> data() const { return data_; }

  Matrix adjoint() const;
  Matrix operator*(const Matrix& rhs) const;
  Matrix operator+(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;
  Matrix operator*(Complex s) const;
  Matrix& operator+=(const Matrix& rhs);
  Matrix& operator-=(const Matrix& rhs);

  double frobenius_norm() const;
  double max_abs() const;
  Complex trace() const;
  /// Largest |imag| over all entries; zero means the matrix is real.
  double max_imag() const;

  bool operator==(const Matrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Complex> data_;
};

/// Max modulus of M - M*, relative to nothing; callers scale.
double hermitian_defect(const Matrix& m);
double skew_hermitian_defect(const Matrix& m);
double off_diagonal_norm(const Matrix& m);  // Frobenius norm of the off-diagonal part
double lower_triangle_max(const Matrix& m);  // max modulus strictly below the diagonal

// Skew-Hermitian matrix (element of u(n)).
class SkewHermitian {
 public:
  static SkewHermitian from_matrix(Matrix m, double tol = 1e-12);
  const Matrix& matrix() const { return m_; }
  int size() const { return m_.rows(); }

 private:
  explicit SkewHermitian(Matrix m) : m_(std::move(m)) {}
  friend SkewHermitian skew_projection(const Matrix& l);
  friend SkewHermitian apply_J(const SkewHermitian& omega);
  friend SkewHermitian apply_J_inverse(const SkewHermitian& omega);
  Matrix m_;
};

class Spectrum {
 public:
  /// Strictly increasing values; throws DegenerateSpectrum otherwise.
  static Spectrum from_values(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  double min_gap() const;
  double range() const { return values_.back() - values_.front(); }
  double max_abs() const;
  /// min gap > rel_tol * max(range, 1).
  bool simple(double rel_tol = 1e-8) const;

 private:
  explicit Spectrum(std::vector<double> v) : values_(std::move(v)) {}
  std::vector<double> values_;
};

class UnitaryFrame {
 public:
  static UnitaryFrame from_matrix(Matrix u, double tol = 1e-10);
  const Matrix& matrix() const { return u_; }
  int size() const { return u_.rows(); }
  /// ||U*U - I||_max.
  double unitarity_residual() const;

 private:
  explicit UnitaryFrame(Matrix u) : u_(std::move(u)) {}
  friend struct EigenDecomposition;
  friend UnitaryFrame assume_unitary(Matrix u);
  Matrix u_;
};

/// Wraps a matrix known to be unitary by construction (no check).
UnitaryFrame assume_unitary(Matrix u);

// Staircase Hermitian matrix: support inside the pattern of h.
class StaircaseHermitian {
 public:
  /// Validates Hermitian symmetry, exact zeros outside the pattern, and zero
  /// imaginary parts in real mode.
  static StaircaseHermitian from_matrix(const HessenbergFunction& h, Matrix m,
                                        bool real_mode = false, double tol = 1e-12);
  /// Projects onto the pattern: zeros outside, Hermitian from the upper
  /// triangle, real diagonal, and imaginary parts dropped in real mode.
  static StaircaseHermitian masked(const HessenbergFunction& h, Matrix m, bool real_mode);
  static StaircaseHermitian diagonal(const HessenbergFunction& h, std::span<const double> diag);

  const HessenbergFunction& pattern() const { return h_; }
  const Matrix& matrix() const { return m_; }
  bool real_mode() const { return real_; }
  int size() const { return m_.rows(); }

  double a(int i) const { return m_(i, i).real(); }
  Complex b(int i, int j) const { return m_(i, j); }

 private:
  StaircaseHermitian(HessenbergFunction h, Matrix m, bool real_mode)
      : h_(std::move(h)), m_(std::move(m)), real_(real_mode) {}
  HessenbergFunction h_;
  Matrix m_;
  bool real_;
};

/// Max modulus of entries outside the h-pattern.
double staircase_leakage(const HessenbergFunction& h, const Matrix& m);

/// P(L) = L_- - L_+.
SkewHermitian skew_projection(const Matrix& l);

/// [A, B] = AB - BA.
Matrix commutator(const Matrix& a, const Matrix& b);

/// (J Omega)_{ij} = |i - j| Omega_{ij}.
SkewHermitian apply_J(const SkewHermitian& omega);
/// Divides the k-th diagonal by k; diagonal of the input must vanish.
SkewHermitian apply_J_inverse(const SkewHermitian& omega);

struct EigenOptions {
  int max_sweeps = 100;
  double gap_rel_tol = 1e-8;  // simplicity gap, relative to max(range, 1)
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  UnitaryFrame vectors;        // columns; largest-modulus entry real positive
  bool simple = false;
  double min_gap = 0.0;
  int sweeps = 0;

  /// Throws DegenerateSpectrum when the spectrum failed the gap test.
  Spectrum spectrum() const;
};

/// Cyclic Jacobi eigensolver for Hermitian matrices.
EigenDecomposition hermitian_eigen(const Matrix& l, const EigenOptions& options = {});

struct QrFactorization {
  UnitaryFrame q;
  Matrix r;  // upper triangular, positive real diagonal
};

/// Householder QR normalized so the factorization is unique.
QrFactorization qr_positive(const Matrix& m);

/// exp(t (L - shift I)) through the eigendecomposition of L.
Matrix expm_hermitian(const Matrix& l, double t, double shift = 0.0);

struct StaircaseSample {
  StaircaseHermitian matrix;
  Spectrum spectrum;
  std::uint64_t seed_used;
};

struct SampleOptions {
  int max_retries = 16;
  double gap_rel_tol = 1e-8;
};

/// Gaussian entries inside the pattern: diagonal N(0, scale^2), off-diagonal
/// real and imaginary parts N(0, scale^2 / 2) (real mode: N(0, scale^2)).
StaircaseSample random_staircase(const HessenbergFunction& h, std::uint64_t seed, bool real_mode,
                                 double scale = 1.0, const SampleOptions& options = {});

/// Haar-distributed unitary (orthogonal when real_mode) from QR of a Gaussian matrix.
UnitaryFrame random_unitary(int n, std::uint64_t seed, bool real_mode = false);

/// Deterministic seed derivation used for retries and batch fan-out.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace isoflow
