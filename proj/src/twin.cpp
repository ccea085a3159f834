#include "isoflow/twin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "isoflow/error.hpp"

namespace isoflow {

namespace {

Matrix lambda_matrix(const Spectrum& lambda) { return Matrix::diagonal(lambda.values()); }

// First k columns of u.
Matrix leading_columns(const Matrix& u, int k) {
  Matrix out(u.rows(), k);
  for (int r = 0; r < u.rows(); ++r)
    for (int c = 0; c < k; ++c) out(r, c) = u(r, c);
  return out;
}

double max_abs_difference(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

double spectral_norm(const Matrix& a) {
  if (a.cols() == 0 || a.rows() == 0) return 0.0;
  const Matrix gram = a.adjoint() * a;
  const auto eig = hermitian_eigen(gram);
  return std::sqrt(std::max(0.0, eig.values.back()));
}

std::vector<Complex> random_phases(int n, std::mt19937_64& rng, bool real_mode) {
  std::vector<Complex> t(n);
  if (real_mode) {
    std::bernoulli_distribution coin(0.5);
    for (auto& x : t) x = coin(rng) ? 1.0 : -1.0;
  } else {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (auto& x : t) x = std::polar(1.0, angle(rng));
  }
  return t;
}

Matrix diagonal_of(const std::vector<Complex>& t) {
  Matrix d(static_cast<int>(t.size()), static_cast<int>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) d(static_cast<int>(i), static_cast<int>(i)) = t[i];
  return d;
}

}  // namespace

Matrix FlagFrame::projector(int k) const {
  const Matrix cols = leading_columns(u_.matrix(), k);
  return cols * cols.adjoint();
}

Membership in_Z_h(const UnitaryFrame& u, const Spectrum& lambda, const HessenbergFunction& h,
                  double tol, double unitarity_tol) {
  if (u.size() != lambda.size() || u.size() != h.size()) {
    throw Error(ErrorKind::ShapeMismatch, "frame, spectrum and h sizes differ");
  }
  if (u.unitarity_residual() > unitarity_tol) {
    throw Error(ErrorKind::NotUnitary, "frame is not unitary to tolerance");
  }
  const Matrix& m = u.matrix();
  const Matrix conj = m.adjoint() * lambda_matrix(lambda) * m;
  Membership out;
  out.residual = staircase_leakage(h, conj);
  out.member = out.residual <= tol;
  return out;
}

FlagFrame twin_flag(const StaircaseHermitian& l, double tol) {
  const auto eig = hermitian_eigen(l.matrix());
  const Spectrum lambda = eig.spectrum();
  FlagFrame frame(assume_unitary(eig.vectors.matrix().adjoint()));
  const auto m = in_Z_h(frame.frame(), lambda, l.pattern(), tol);
  if (!m.member) {
    throw Error(ErrorKind::NoConvergence, "eigenframe misses Z_h, residual " + std::to_string(m.residual));
  }
  return frame;
}

double hessenberg_flag_residual(const FlagFrame& frame, const Spectrum& lambda,
                                const HessenbergFunction& h) {
  const int n = frame.size();
  const Matrix& u = frame.frame().matrix();
  const Matrix lam = lambda_matrix(lambda);
  double worst = 0.0;
  for (int i = 1; i <= n; ++i) {
    const int hi = h(i);
    if (hi == n) continue;
    // ||(I - Pi_{h(i)}) Lambda Pi_i||_2 = ||(I - Pi_{h(i)}) Lambda U_i||_2.
    const Matrix ui = leading_columns(u, i);
    const Matrix uh = leading_columns(u, hi);
    const Matrix image = lam * ui;
    const Matrix rest = image - uh * (uh.adjoint() * image);
    worst = std::max(worst, spectral_norm(rest));
  }
  return worst;
}

StaircaseHermitian staircase_from_frame(const UnitaryFrame& u, const Spectrum& lambda,
                                        const HessenbergFunction& h, bool real_mode, double tol) {
  const auto m = in_Z_h(u, lambda, h, tol);
  if (!m.member) {
    throw Error(ErrorKind::NotInZh, "frame residual " + std::to_string(m.residual) + " above tolerance");
  }
  const Matrix& w = u.matrix();
  return StaircaseHermitian::masked(h, w.adjoint() * lambda_matrix(lambda) * w, real_mode);
}

bool QuotientReport::pass(const TwinTolerances& tol) const {
  return max_left_membership <= tol.membership && max_right_membership <= tol.membership &&
         max_left_change <= tol.invariance && max_projector_change <= tol.invariance &&
         max_entry_law_error <= tol.entry_law;
}

QuotientReport double_quotient_invariants(const UnitaryFrame& u, const Spectrum& lambda,
                                          const HessenbergFunction& h, std::uint64_t seed,
                                          int trials, bool real_mode, const TwinTolerances& tol) {
  if (!in_Z_h(u, lambda, h, tol.membership, tol.unitarity).member) {
    throw Error(ErrorKind::NotInZh, "frame is not in Z_h");
  }
  const int n = u.size();
  const Matrix& w = u.matrix();
  const Matrix lam = lambda_matrix(lambda);
  const Matrix base = w.adjoint() * lam * w;
  const FlagFrame flag(u);
  std::vector<Matrix> projectors;
  for (int k = 1; k <= n; ++k) projectors.push_back(flag.projector(k));

  std::mt19937_64 rng(seed);
  QuotientReport out;
  out.trials = trials;
  for (int trial = 0; trial < trials; ++trial) {
    const auto t1 = random_phases(n, rng, real_mode);
    const auto t2 = random_phases(n, rng, real_mode);
    const Matrix d1 = diagonal_of(t1);
    const Matrix d2 = diagonal_of(t2);

    const UnitaryFrame left = assume_unitary(d1 * w);
    out.max_left_membership = std::max(out.max_left_membership, in_Z_h(left, lambda, h, 1.0, 1.0).residual);
    const Matrix moved = left.matrix().adjoint() * lam * left.matrix();
    out.max_left_change = std::max(out.max_left_change, max_abs_difference(moved, base));

    const UnitaryFrame right = assume_unitary(w * d2);
    out.max_right_membership = std::max(out.max_right_membership, in_Z_h(right, lambda, h, 1.0, 1.0).residual);
    const FlagFrame right_flag(right);
    for (int k = 1; k <= n; ++k) {
      out.max_projector_change =
          std::max(out.max_projector_change, max_abs_difference(right_flag.projector(k), projectors[k - 1]));
    }

    // (U D2)* Lambda (U D2) = D L D^{-1} with D = D2^{-1}; compare with t_i t_j^{-1} b_ij.
    const Matrix conjugated = right.matrix().adjoint() * lam * right.matrix();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Complex ti = std::conj(t2[i]);
        const Complex tj = std::conj(t2[j]);
        const Complex expected = ti * base(i, j) / tj;
        out.max_entry_law_error = std::max(out.max_entry_law_error, std::abs(conjugated(i, j) - expected));
      }
    }
  }
  return out;
}

TwinBatchReport twin_batch(const HessenbergFunction& h, int count, std::uint64_t seed, bool real_mode,
                           int jobs, int trials, const TwinTolerances& tol) {
  if (count < 0 || jobs < 1) throw Error(ErrorKind::BadInput, "count >= 0 and jobs >= 1 required");
  TwinBatchReport report{h, real_mode, tol, std::vector<TwinSample>(count)};

  auto run_one = [&](int idx) {
    TwinSample s;
    s.seed = derive_seed(seed, static_cast<std::uint64_t>(idx));
    const auto sample = random_staircase(h, s.seed, real_mode);
    const FlagFrame frame = twin_flag(sample.matrix, tol.membership);
    const auto eig = hermitian_eigen(sample.matrix.matrix());
    const Spectrum lambda = eig.spectrum();
    s.membership = in_Z_h(frame.frame(), lambda, h, tol.membership, tol.unitarity).residual;
    s.flag = hessenberg_flag_residual(frame, lambda, h);
    const auto back = staircase_from_frame(frame.frame(), lambda, h, real_mode, tol.membership);
    s.roundtrip = max_abs_difference(back.matrix(), sample.matrix.matrix());
    s.quotient = double_quotient_invariants(frame.frame(), lambda, h, derive_seed(s.seed, 1), trials,
                                            real_mode, tol);
    s.pass = s.membership <= tol.membership && s.flag <= tol.membership && s.quotient.pass(tol);
    report.samples[idx] = s;
  };

  const int workers = std::min(jobs, std::max(count, 1));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) run_one(i);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int i = w; i < count; i += workers) run_one(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  report.pass = true;
  for (const auto& s : report.samples) {
    report.max_membership = std::max(report.max_membership, s.membership);
    report.max_flag = std::max(report.max_flag, s.flag);
    report.max_roundtrip = std::max(report.max_roundtrip, s.roundtrip);
    report.max_invariance = std::max({report.max_invariance, s.quotient.max_left_change,
                                      s.quotient.max_projector_change});
    report.max_entry_law = std::max(report.max_entry_law, s.quotient.max_entry_law_error);
    report.pass = report.pass && s.pass;
  }
  return report;
}

}  // namespace isoflow
