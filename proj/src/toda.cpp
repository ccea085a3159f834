#include "isoflow/toda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isoflow/error.hpp"

namespace isoflow {

namespace {

double relative_drift(const std::vector<double>& now, const Spectrum& initial) {
  double d = 0.0;
  for (int i = 0; i < initial.size(); ++i) d = std::max(d, std::abs(now[i] - initial[i]));
  return d / std::max(1.0, initial.max_abs());
}

Matrix lin_comb(const Matrix& base, double dt, std::initializer_list<std::pair<double, const Matrix*>> terms) {
  Matrix out = base;
  for (auto [coef, m] : terms) {
    if (coef == 0.0) continue;
    const Complex f = dt * coef;
    for (int r = 0; r < out.rows(); ++r)
      for (int c = 0; c < out.cols(); ++c) out(r, c) += f * (*m)(r, c);
  }
  return out;
}

Matrix signed_field(const Matrix& l, double sign) {
  Matrix f = toda_field(l);
  return sign > 0 ? f : f * Complex(-1.0);
}

Matrix rk4_step(const Matrix& l, double dt, double sign) {
  const Matrix k1 = signed_field(l, sign);
  const Matrix k2 = signed_field(lin_comb(l, dt, {{0.5, &k1}}), sign);
  const Matrix k3 = signed_field(lin_comb(l, dt, {{0.5, &k2}}), sign);
  const Matrix k4 = signed_field(lin_comb(l, dt, {{1.0, &k3}}), sign);
  return lin_comb(l, dt, {{1.0 / 6, &k1}, {1.0 / 3, &k2}, {1.0 / 3, &k3}, {1.0 / 6, &k4}});
}

struct DopriResult {
  Matrix next;
  double error_norm;
};

DopriResult dopri_step(const Matrix& l, double dt, double sign, const IntegrationConfig& cfg) {
  const Matrix k1 = signed_field(l, sign);
  const Matrix k2 = signed_field(lin_comb(l, dt, {{1.0 / 5, &k1}}), sign);
  const Matrix k3 = signed_field(lin_comb(l, dt, {{3.0 / 40, &k1}, {9.0 / 40, &k2}}), sign);
  const Matrix k4 = signed_field(
      lin_comb(l, dt, {{44.0 / 45, &k1}, {-56.0 / 15, &k2}, {32.0 / 9, &k3}}), sign);
  const Matrix k5 = signed_field(lin_comb(l, dt,
                                          {{19372.0 / 6561, &k1},
                                           {-25360.0 / 2187, &k2},
                                           {64448.0 / 6561, &k3},
                                           {-212.0 / 729, &k4}}),
                                 sign);
  const Matrix k6 = signed_field(lin_comb(l, dt,
                                          {{9017.0 / 3168, &k1},
                                           {-355.0 / 33, &k2},
                                           {46732.0 / 5247, &k3},
                                           {49.0 / 176, &k4},
                                           {-5103.0 / 18656, &k5}}),
                                 sign);
  Matrix next = lin_comb(l, dt,
                         {{35.0 / 384, &k1},
                          {500.0 / 1113, &k3},
                          {125.0 / 192, &k4},
                          {-2187.0 / 6784, &k5},
                          {11.0 / 84, &k6}});
  const Matrix k7 = signed_field(next, sign);
  const Matrix err = lin_comb(Matrix(l.rows(), l.cols()), dt,
                              {{35.0 / 384 - 5179.0 / 57600, &k1},
                               {500.0 / 1113 - 7571.0 / 16695, &k3},
                               {125.0 / 192 - 393.0 / 640, &k4},
                               {-2187.0 / 6784 + 92097.0 / 339200, &k5},
                               {11.0 / 84 - 187.0 / 2100, &k6},
                               {-1.0 / 40, &k7}});
  const double scale = cfg.atol + cfg.rtol * std::max(1.0, l.max_abs());
  return DopriResult{std::move(next), err.max_abs() / scale};
}

}  // namespace

Matrix toda_field(const Matrix& l) {
  const int n = l.rows();
  if (l.cols() != n) throw Error(ErrorKind::ShapeMismatch, "field needs a square matrix");
  // [L, P] is Hermitian: sum_k L_ik P_kj - P_ik L_kj on the upper triangle, with
  // P_kj = L_kj below the diagonal and -L_kj above.
  auto p = [&](int r, int c) { return r > c ? l(r, c) : (r < c ? -l(r, c) : Complex(0.0)); };
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Complex s = 0.0;
      for (int k = 0; k < n; ++k) s += l(i, k) * p(k, j) - p(i, k) * l(k, j);
      out(i, j) = s;
      if (j > i) out(j, i) = std::conj(s);
    }
  }
  return out;
}

StaircaseHermitian vector_field(const StaircaseHermitian& l) {
  return StaircaseHermitian::masked(l.pattern(), toda_field(l.matrix()), l.real_mode());
}

Trajectory integrate(const StaircaseHermitian& l0, double t_end, const IntegrationConfig& config) {
  const HessenbergFunction& h = l0.pattern();
  const bool real = l0.real_mode();
  Trajectory traj{{}, {}, hermitian_eigen(l0.matrix()).spectrum()};
  const double sign = t_end >= 0.0 ? 1.0 : -1.0;
  const double span = std::abs(t_end);

  Matrix l = l0.matrix();
  double f_prev = lyapunov_F(l0);
  traj.states.push_back(FlowState{0.0, l0});
  traj.diagnostics.push_back(StateDiagnostics{0.0, 0.0, f_prev, off_diagonal_norm(l)});

  double t = 0.0;
  double dt = config.adaptive ? std::min(config.step, config.max_step) : config.step;
  double err_prev = 1e-4;
  double leak_since_sample = 0.0;
  long since_sample = 0;

  while (t < span) {
    const double remaining = span - t;
    double dt_eff = std::min(dt, remaining);
    // Absorb a roundoff sliver into the last step instead of taking a micro-step.
    if (remaining - dt_eff <= 1e-9 * dt) dt_eff = remaining;
    Matrix next;
    if (!config.adaptive) {
      next = rk4_step(l, dt_eff, sign);
    } else {
      for (;;) {
        if (dt_eff < config.min_step && dt_eff < remaining) {
          throw Error(ErrorKind::StepUnderflow, "adaptive step collapsed at t=" + std::to_string(t));
        }
        auto trial = dopri_step(l, dt_eff, sign, config);
        if (trial.error_norm <= 1.0) {
          const double e = std::max(trial.error_norm, 1e-10);
          double factor = 0.9 * std::pow(e, -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
          factor = std::clamp(factor, 0.2, 5.0);
          err_prev = e;
          next = std::move(trial.next);
          dt = std::min(config.max_step, dt_eff * factor);
          break;
        }
        dt_eff *= std::max(0.2, 0.9 * std::pow(trial.error_norm, -0.2));
      }
    }
    t = (dt_eff >= remaining) ? span : t + dt_eff;
    ++traj.steps;
    ++since_sample;

    const double leak = staircase_leakage(h, next);
    leak_since_sample = std::max(leak_since_sample, leak);
    traj.max_leakage = std::max(traj.max_leakage, leak);
    if (real) traj.max_imag = std::max(traj.max_imag, next.max_imag());
    l = StaircaseHermitian::masked(h, std::move(next), real).matrix();

    double f = 0.0;
    for (int i = 0; i < l.rows(); ++i) f += (i + 1) * l(i, i).real();
    traj.max_lyapunov_increase = std::max(traj.max_lyapunov_increase, sign * (f - f_prev));
    f_prev = f;

    if (since_sample >= config.sample_every || t >= span) {
      const auto eig = hermitian_eigen(l);
      const double drift = relative_drift(eig.values, traj.initial_spectrum);
      traj.max_drift = std::max(traj.max_drift, drift);
      if (drift > config.drift_tol) {
        throw Error(ErrorKind::DriftExceeded,
                    "spectrum drift " + std::to_string(drift) + " at t=" + std::to_string(t));
      }
      auto state = StaircaseHermitian::masked(h, l, real);
      traj.states.push_back(FlowState{sign * t, state});
      traj.diagnostics.push_back(
          StateDiagnostics{drift, leak_since_sample, f, off_diagonal_norm(l)});
      leak_since_sample = 0.0;
      since_sample = 0;
    }
  }
  return traj;
}

StaircaseHermitian qr_solution(const StaircaseHermitian& l0, double t, double max_exponent) {
  if (t == 0.0) return l0;
  const auto eig = hermitian_eigen(l0.matrix());
  const double lo = eig.values.front();
  const double hi = eig.values.back();
  const double width = std::max(hi - lo, std::numeric_limits<double>::min());
  const double mid = 0.5 * (lo + hi);
  const long chunks = std::max(1L, static_cast<long>(std::ceil(std::abs(t) * width / max_exponent)));
  const double dt = t / static_cast<double>(chunks);

  const HessenbergFunction& h = l0.pattern();
  Matrix l = l0.matrix();
  for (long k = 0; k < chunks; ++k) {
    // Positive scalar factors do not change Q, so the shift only guards the range.
    const auto qr = qr_positive(expm_hermitian(l, dt, mid));
    const Matrix& q = qr.q.matrix();
    l = StaircaseHermitian::masked(h, q.adjoint() * l * q, l0.real_mode()).matrix();
  }
  return StaircaseHermitian::masked(h, std::move(l), l0.real_mode());
}

std::vector<double> linearization_spectrum(const HessenbergFunction& h, const Spectrum& spectrum,
                                           const Permutation& sigma, bool real_mode) {
  std::vector<double> out;
  for (auto [i, j] : h.pattern_pairs()) {
    const double w = spectrum[sigma[j]] - spectrum[sigma[i]];
    out.push_back(w);
    if (!real_mode) out.push_back(w);
  }
  return out;
}

EquilibriumReport equilibrium_report(const HessenbergFunction& h, const Spectrum& spectrum,
                                     const Permutation& sigma, bool real_mode) {
  EquilibriumReport report{sigma, 0, linearization_spectrum(h, spectrum, sigma, real_mode)};
  report.morse_index = static_cast<int>(
      std::count_if(report.linearization.begin(), report.linearization.end(),
                    [](double w) { return w < 0.0; }));
  return report;
}

Permutation match_diagonal(const Matrix& l, const Spectrum& spectrum) {
  const int n = l.rows();
  Permutation sigma(n);
  for (int i = 0; i < n; ++i) {
    const double a = l(i, i).real();
    int best = 0;
    for (int k = 1; k < n; ++k)
      if (std::abs(spectrum[k] - a) < std::abs(spectrum[best] - a)) best = k;
    sigma[i] = best;
  }
  if (!is_permutation(sigma)) {
    throw Error(ErrorKind::NotConverged, "diagonal does not match the spectrum bijectively");
  }
  return sigma;
}

LimitClassification classify_limits(const StaircaseHermitian& l0, const ClassifyOptions& options) {
  const Spectrum spectrum = hermitian_eigen(l0.matrix()).spectrum();
  const double width = std::max(spectrum.range(), std::numeric_limits<double>::min());
  const double threshold = options.threshold * std::min(1.0, spectrum.range());
  const double chunk = options.chunk_exponent / width;

  auto run = [&](double sign, double& elapsed, double& off) {
    StaircaseHermitian l = l0;
    elapsed = 0.0;
    off = off_diagonal_norm(l.matrix());
    while (off >= threshold && elapsed < options.horizon) {
      l = qr_solution(l, sign * chunk, options.chunk_exponent);
      elapsed += chunk;
      off = off_diagonal_norm(l.matrix());
    }
    if (off >= threshold) {
      throw Error(ErrorKind::NotConverged, "off-diagonal norm " + std::to_string(off) +
                                               " above threshold at horizon");
    }
    return match_diagonal(l.matrix(), spectrum);
  };

  LimitClassification out;
  out.sigma_plus = run(1.0, out.time_plus, out.off_diagonal_plus);
  out.sigma_minus = run(-1.0, out.time_minus, out.off_diagonal_minus);
  const auto& h = l0.pattern();
  out.plus = equilibrium_report(h, spectrum, out.sigma_plus, l0.real_mode());
  out.minus = equilibrium_report(h, spectrum, out.sigma_minus, l0.real_mode());
  return out;
}

NumericLinearization numeric_linearization(const HessenbergFunction& h, const Spectrum& spectrum,
                                           const Permutation& sigma, bool real_mode,
                                           double delta) {
  if (!spectrum.simple()) throw Error(ErrorKind::DegenerateSpectrum, "spectrum not simple");
  const auto pairs = h.pattern_pairs();
  const int per = real_mode ? 1 : 2;
  const int dim = per * static_cast<int>(pairs.size());
  const int n = h.size();

  Matrix base(n, n);
  for (int i = 0; i < n; ++i) base(i, i) = spectrum[sigma[i]];

  auto perturb = [&](int coord, double amount) {
    Matrix m = base;
    const auto [i, j] = pairs[coord / per];
    const Complex dz = (coord % per == 0) ? Complex(amount, 0.0) : Complex(0.0, amount);
    m(i, j) += dz;
    m(j, i) += std::conj(dz);
    return m;
  };
  auto read = [&](const Matrix& f, int coord) {
    const auto [i, j] = pairs[coord / per];
    return coord % per == 0 ? f(i, j).real() : f(i, j).imag();
  };

  NumericLinearization out;
  out.jacobian.assign(dim, std::vector<double>(dim, 0.0));
  for (int col = 0; col < dim; ++col) {
    // The field is quadratic, so central differences are exact up to roundoff.
    const Matrix fp = toda_field(perturb(col, delta));
    const Matrix fm = toda_field(perturb(col, -delta));
    for (int row = 0; row < dim; ++row) {
      out.jacobian[row][col] = (read(fp, row) - read(fm, row)) / (2.0 * delta);
    }
  }
  out.diagonal.resize(dim);
  for (int k = 0; k < dim; ++k) {
    out.diagonal[k] = out.jacobian[k][k];
    for (int c = 0; c < dim; ++c)
      if (c != k) out.max_off_diagonal = std::max(out.max_off_diagonal, std::abs(out.jacobian[k][c]));
  }
  const auto analytic = linearization_spectrum(h, spectrum, sigma, real_mode);
  out.hyperbolic = true;
  const double floor = 1e-12 * std::max(1.0, spectrum.range());
  for (int k = 0; k < dim; ++k) {
    if (out.diagonal[k] < 0.0) ++out.negative_count;
    if (std::abs(out.diagonal[k]) <= floor) out.hyperbolic = false;
    out.max_relative_error = std::max(
        out.max_relative_error, std::abs(out.diagonal[k] - analytic[k]) / std::abs(analytic[k]));
  }
  return out;
}

double lyapunov_F(const StaircaseHermitian& l) {
  double f = 0.0;
  for (int i = 0; i < l.size(); ++i) f += (i + 1) * l.a(i);
  return f;
}

double dissipation_rate(const StaircaseHermitian& l) {
  double s = 0.0;
  for (auto [i, j] : l.pattern().pattern_pairs()) s += (j - i) * std::norm(l.b(i, j));
  return -2.0 * s;
}

double gradient_identity(const Matrix& l) {
  const int n = l.rows();
  std::vector<double> weights(n);
  for (int i = 0; i < n; ++i) weights[i] = i + 1;
  const Matrix bracket = commutator(l, Matrix::diagonal(weights));
  const Matrix lhs = apply_J_inverse(SkewHermitian::from_matrix(bracket)).matrix() * Complex(-1.0);
  const Matrix p = skew_projection(l).matrix();
  return (lhs - p).max_abs();
}

}  // namespace isoflow
