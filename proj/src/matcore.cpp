#include "isoflow/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "isoflow/error.hpp"

namespace isoflow {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::ShapeMismatch, std::string(op) + ": shapes differ");
  }
}

void require_square(const Matrix& m, const char* op) {
  if (!m.square()) throw Error(ErrorKind::ShapeMismatch, std::string(op) + ": not square");
}

// Unit-modulus phase of z; exactly real for real z so real inputs stay real.
Complex phase_of(Complex z) {
  const double r = std::abs(z);
  if (r == 0.0) return {1.0, 0.0};
  return {z.real() / r, z.imag() / r};
}

}  // namespace

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  const int n = static_cast<int>(diag.size());
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::adjoint() const {
  Matrix out(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw Error(ErrorKind::ShapeMismatch, "matrix product");
  Matrix out(rows_, rhs.cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int k = 0; k < cols_; ++k) {
      const Complex a = (*this)(r, k);
      if (a == Complex{}) continue;
      for (int c = 0; c < rhs.cols_; ++c) out(r, c) += a * rhs(k, c);
    }
  }
  return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
  Matrix out = *this;
  out += rhs;
  return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
  Matrix out = *this;
  out -= rhs;
  return out;
}

Matrix Matrix::operator*(Complex s) const {
  Matrix out = *this;
  for (auto& z : out.data_) z *= s;
  return out;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
  require_same_shape(*this, rhs, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
  require_same_shape(*this, rhs, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

Complex Matrix::trace() const {
  Complex t{};
  for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double Matrix::max_imag() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z.imag()));
  return m;
}

double hermitian_defect(const Matrix& m) {
  double d = 0.0;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = r; c < m.cols(); ++c) d = std::max(d, std::abs(m(r, c) - std::conj(m(c, r))));
  return d;
}

double skew_hermitian_defect(const Matrix& m) {
  double d = 0.0;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = r; c < m.cols(); ++c) d = std::max(d, std::abs(m(r, c) + std::conj(m(c, r))));
  return d;
}

double off_diagonal_norm(const Matrix& m) {
  double s = 0.0;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      if (r != c) s += std::norm(m(r, c));
  return std::sqrt(s);
}

double lower_triangle_max(const Matrix& m) {
  double d = 0.0;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < std::min(r, m.cols()); ++c) d = std::max(d, std::abs(m(r, c)));
  return d;
}

SkewHermitian SkewHermitian::from_matrix(Matrix m, double tol) {
  require_square(m, "SkewHermitian");
  if (skew_hermitian_defect(m) > tol * std::max(1.0, m.max_abs())) {
    throw Error(ErrorKind::BadInput, "matrix is not skew-Hermitian");
  }
  return SkewHermitian(std::move(m));
}

Spectrum Spectrum::from_values(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::BadInput, "empty spectrum");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      throw Error(ErrorKind::DegenerateSpectrum, "spectrum is not strictly increasing");
    }
  }
  return Spectrum(std::move(values));
}

double Spectrum::min_gap() const {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < values_.size(); ++i) g = std::min(g, values_[i] - values_[i - 1]);
  return g;
}

double Spectrum::max_abs() const {
  return std::max(std::abs(values_.front()), std::abs(values_.back()));
}

bool Spectrum::simple(double rel_tol) const {
  return min_gap() > rel_tol * std::max(range(), 1.0);
}

UnitaryFrame UnitaryFrame::from_matrix(Matrix u, double tol) {
  require_square(u, "UnitaryFrame");
  UnitaryFrame f(std::move(u));
  if (f.unitarity_residual() > tol) throw Error(ErrorKind::NotUnitary, "U*U differs from I");
  return f;
}

double UnitaryFrame::unitarity_residual() const {
  Matrix g = u_.adjoint() * u_;
  double d = 0.0;
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < g.cols(); ++c) d = std::max(d, std::abs(g(r, c) - (r == c ? 1.0 : 0.0)));
  return d;
}

UnitaryFrame assume_unitary(Matrix u) { return UnitaryFrame(std::move(u)); }

double staircase_leakage(const HessenbergFunction& h, const Matrix& m) {
  double d = 0.0;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      if (!h.allows(r, c)) d = std::max(d, std::abs(m(r, c)));
  return d;
}

StaircaseHermitian StaircaseHermitian::from_matrix(const HessenbergFunction& h, Matrix m,
                                                   bool real_mode, double tol) {
  if (!m.square() || m.rows() != h.size()) {
    throw Error(ErrorKind::ShapeMismatch, "matrix size does not match h");
  }
  const double scale = std::max(1.0, m.max_abs());
  if (hermitian_defect(m) > tol * scale) throw Error(ErrorKind::NotHermitian, "L != L*");
  if (staircase_leakage(h, m) != 0.0) {
    throw Error(ErrorKind::BadInput, "nonzero entry outside the staircase pattern");
  }
  if (real_mode && m.max_imag() != 0.0) {
    throw Error(ErrorKind::BadInput, "real mode requires zero imaginary parts");
  }
  return masked(h, std::move(m), real_mode);
}

StaircaseHermitian StaircaseHermitian::masked(const HessenbergFunction& h, Matrix m,
                                              bool real_mode) {
  const int n = h.size();
  if (!m.square() || m.rows() != n) {
    throw Error(ErrorKind::ShapeMismatch, "matrix size does not match h");
  }
  for (int r = 0; r < n; ++r) {
    m(r, r) = m(r, r).real();
    for (int c = r + 1; c < n; ++c) {
      if (!h.allows(r, c)) {
        m(r, c) = 0.0;
      } else if (real_mode) {
        m(r, c) = m(r, c).real();
      }
      m(c, r) = std::conj(m(r, c));
    }
  }
  return StaircaseHermitian(h, std::move(m), real_mode);
}

StaircaseHermitian StaircaseHermitian::diagonal(const HessenbergFunction& h,
                                                std::span<const double> diag) {
  if (static_cast<int>(diag.size()) != h.size()) {
    throw Error(ErrorKind::ShapeMismatch, "diagonal length does not match h");
  }
  return StaircaseHermitian(h, Matrix::diagonal(diag), true);
}

SkewHermitian skew_projection(const Matrix& l) {
  require_square(l, "skew_projection");
  if (hermitian_defect(l) > 1e-12 * std::max(1.0, l.max_abs())) {
    throw Error(ErrorKind::NotHermitian, "skew_projection expects a Hermitian matrix");
  }
  Matrix p(l.rows(), l.cols());
  for (int r = 0; r < l.rows(); ++r)
    for (int c = 0; c < l.cols(); ++c) {
      if (r < c) p(r, c) = -l(r, c);
      if (r > c) p(r, c) = l(r, c);
    }
  return SkewHermitian(std::move(p));
}

Matrix commutator(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "commutator");
  require_square(a, "commutator");
  return a * b - b * a;
}

SkewHermitian apply_J(const SkewHermitian& omega) {
  Matrix m = omega.matrix();
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) m(r, c) *= static_cast<double>(std::abs(r - c));
  return SkewHermitian(std::move(m));
}

SkewHermitian apply_J_inverse(const SkewHermitian& omega) {
  Matrix m = omega.matrix();
  for (int i = 0; i < m.rows(); ++i) {
    if (m(i, i) != Complex{}) {
      throw Error(ErrorKind::NonzeroDiagonal, "J^{-1} is defined on zero-diagonal matrices");
    }
  }
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      if (r != c) m(r, c) /= static_cast<double>(std::abs(r - c));
  return SkewHermitian(std::move(m));
}

Spectrum EigenDecomposition::spectrum() const {
  if (!simple) throw Error(ErrorKind::DegenerateSpectrum, "eigenvalue gap below tolerance");
  return Spectrum::from_values(values);
}

EigenDecomposition hermitian_eigen(const Matrix& l, const EigenOptions& options) {
  require_square(l, "hermitian_eigen");
  const int n = l.rows();
  if (hermitian_defect(l) > 1e-12 * std::max(1.0, l.max_abs())) {
    throw Error(ErrorKind::NotHermitian, "hermitian_eigen expects a Hermitian matrix");
  }
  Matrix a = l;
  Matrix v = Matrix::identity(n);
  const double norm = std::max(a.frobenius_norm(), std::numeric_limits<double>::min());
  const double eps = std::numeric_limits<double>::epsilon();

  int sweep = 0;
  for (;; ++sweep) {
    if (off_diagonal_norm(a) <= eps * norm) break;
    if (sweep >= options.max_sweeps) {
      throw Error(ErrorKind::NoConvergence, "Jacobi sweeps exhausted");
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Negligible against both diagonal entries: drop it outright.
        if (sweep > 3 && mag <= 0.5 * eps * std::min(std::abs(app), std::abs(aqq))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const Complex e = phase_of(apq);
        const double tau = (aqq - app) / (2.0 * mag);
        const double t =
            (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // V = [[c, s e], [-s conj(e), c]] on coordinates (p, q).
        const Complex vpq = s * e;
        const Complex vqp = -s * std::conj(e);
        for (int k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp + vqp * akq;
          a(k, q) = vpq * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk + std::conj(vqp) * aqk;
          a(q, k) = std::conj(vpq) * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (int k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp + vqp * vkq;
          v(k, q) = vpq * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return a(x, x).real() < a(y, y).real(); });

  EigenDecomposition out{{}, assume_unitary(Matrix(n, n)), false, 0.0, sweep};
  out.values.resize(n);
  Matrix u(n, n);
  for (int col = 0; col < n; ++col) {
    const int src = order[col];
    out.values[col] = a(src, src).real();
    int best = 0;
    for (int r = 1; r < n; ++r)
      if (std::abs(v(r, src)) > std::abs(v(best, src))) best = r;
    const Complex fix = std::conj(phase_of(v(best, src)));
    for (int r = 0; r < n; ++r) u(r, col) = v(r, src) * fix;
    u(best, col) = std::abs(v(best, src));
  }
  out.vectors = assume_unitary(std::move(u));
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 1; i < n; ++i) gap = std::min(gap, out.values[i] - out.values[i - 1]);
  out.min_gap = n > 1 ? gap : 0.0;
  const double range = n > 1 ? out.values.back() - out.values.front() : 0.0;
  out.simple = n == 1 || gap > options.gap_rel_tol * std::max(range, 1.0);
  return out;
}

QrFactorization qr_positive(const Matrix& m) {
  require_square(m, "qr_positive");
  const int n = m.rows();
  Matrix r = m;
  Matrix q = Matrix::identity(n);
  const double scale = std::max(m.max_abs(), std::numeric_limits<double>::min());
  std::vector<Complex> v(n);

  for (int k = 0; k < n; ++k) {
    double xnorm2 = 0.0;
    for (int i = k; i < n; ++i) xnorm2 += std::norm(r(i, k));
    const double xnorm = std::sqrt(xnorm2);
    if (xnorm <= 1e-14 * scale) throw Error(ErrorKind::SingularInput, "rank-deficient column");
    const Complex alpha = -phase_of(r(k, k)) * xnorm;
    for (int i = 0; i < n; ++i) v[i] = 0.0;
    v[k] = r(k, k) - alpha;
    for (int i = k + 1; i < n; ++i) v[i] = r(i, k);
    double vnorm2 = 0.0;
    for (int i = k; i < n; ++i) vnorm2 += std::norm(v[i]);
    if (vnorm2 == 0.0) continue;
    // R <- H R, Q <- Q H with H = I - 2 v v* / (v* v).
    for (int c = k; c < n; ++c) {
      Complex dot{};
      for (int i = k; i < n; ++i) dot += std::conj(v[i]) * r(i, c);
      const Complex f = 2.0 * dot / vnorm2;
      for (int i = k; i < n; ++i) r(i, c) -= f * v[i];
    }
    for (int row = 0; row < n; ++row) {
      Complex dot{};
      for (int i = k; i < n; ++i) dot += q(row, i) * v[i];
      const Complex f = 2.0 * dot / vnorm2;
      for (int i = k; i < n; ++i) q(row, i) -= f * std::conj(v[i]);
    }
    for (int i = k + 1; i < n; ++i) r(i, k) = 0.0;
  }
  // Q D, D* R with D = phase(diag R) makes diag(R) positive real.
  for (int k = 0; k < n; ++k) {
    const Complex d = phase_of(r(k, k));
    for (int row = 0; row < n; ++row) q(row, k) *= d;
    for (int c = k; c < n; ++c) r(k, c) *= std::conj(d);
    r(k, k) = std::abs(r(k, k));
  }
  return QrFactorization{assume_unitary(std::move(q)), std::move(r)};
}

Matrix expm_hermitian(const Matrix& l, double t, double shift) {
  const auto eig = hermitian_eigen(l);
  const int n = l.rows();
  const Matrix& u = eig.vectors.matrix();
  Matrix out(n, n);
  for (int k = 0; k < n; ++k) {
    const double w = std::exp(t * (eig.values[k] - shift));
    for (int r = 0; r < n; ++r) {
      const Complex urw = u(r, k) * w;
      for (int c = 0; c < n; ++c) out(r, c) += urw * std::conj(u(c, k));
    }
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream).
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

StaircaseSample random_staircase(const HessenbergFunction& h, std::uint64_t seed, bool real_mode,
                                 double scale, const SampleOptions& options) {
  const int n = h.size();
  std::uint64_t current = seed;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    std::mt19937_64 rng(current);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = scale * gauss(rng);
    const double off = real_mode ? scale : scale / std::sqrt(2.0);
    for (auto [i, j] : h.pattern_pairs()) {
      const double re = off * gauss(rng);
      const double im = real_mode ? 0.0 : off * gauss(rng);
      m(i, j) = Complex(re, im);
      m(j, i) = std::conj(m(i, j));
    }
    auto eig = hermitian_eigen(m, EigenOptions{100, options.gap_rel_tol});
    if (eig.simple) {
      return StaircaseSample{StaircaseHermitian::masked(h, std::move(m), real_mode),
                             eig.spectrum(), current};
    }
    current = derive_seed(seed, static_cast<std::uint64_t>(attempt));
  }
  throw Error(ErrorKind::DegenerateSpectrum, "no simple spectrum after bounded retries");
}

UnitaryFrame random_unitary(int n, std::uint64_t seed, bool real_mode) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) g(r, c) = Complex(gauss(rng), real_mode ? 0.0 : gauss(rng));
  return qr_positive(g).q;
}

}  // namespace isoflow
