#pragma once

#include <vector>

#include "isoflow/hessfn.hpp"
#include "isoflow/matcore.hpp"

namespace isoflow {

/// [L, P(L)] on a raw matrix, no masking.
Matrix toda_field(const Matrix& l);

/// The generalized Toda vector field L' = [L, P(L)], projected onto the
/// pattern of L. Leakage before projection is roundoff only.
StaircaseHermitian vector_field(const StaircaseHermitian& l);

struct FlowState {
  double t = 0.0;
  StaircaseHermitian l;
};

struct StateDiagnostics {
  double drift = 0.0;         // max |lambda_i(t) - lambda_i(0)| / max(1, max|lambda|)
  double leakage = 0.0;       // worst pre-mask leakage since the previous sample
  double lyapunov = 0.0;      // F = Tr(L N)
  double off_diagonal = 0.0;  // Frobenius norm of the off-diagonal part
};

struct IntegrationConfig {
  double step = 1e-3;
  bool adaptive = false;  // Dormand-Prince 5(4) with PI control
  double rtol = 1e-11;
  double atol = 1e-13;
  double min_step = 1e-10;
  double max_step = 0.05;
  int sample_every = 100;  // accepted steps between recorded states
  double drift_tol = 1e-6;
};

struct Trajectory {
  std::vector<FlowState> states;
  std::vector<StateDiagnostics> diagnostics;
  Spectrum initial_spectrum;
  long steps = 0;
  double max_leakage = 0.0;
  double max_drift = 0.0;
  // Largest F increase over one step, in the forward-time sense (for a
  // backward run this is the largest decrease). Nonpositive means monotone.
  double max_lyapunov_increase = 0.0;
  double max_imag = 0.0;  // largest imaginary part met, real mode only
};

/// Integrates from t = 0 to t_end; negative t_end runs the negated field.
Trajectory integrate(const StaircaseHermitian& l0, double t_end,
                     const IntegrationConfig& config = {});

/// Exact solution: exp(t L0) = Q R with positive diag(R), L(t) = Q* L0 Q.
/// The time span is split so that each factorization sees exp of spectral
/// width at most max_exponent; the flow property makes this exact.
StaircaseHermitian qr_solution(const StaircaseHermitian& l0, double t,
                               double max_exponent = 4.0);

struct EquilibriumReport {
  Permutation sigma;
  int morse_index = 0;              // stable-manifold dimension
  std::vector<double> linearization;  // analytic eigenvalues
};

EquilibriumReport equilibrium_report(const HessenbergFunction& h, const Spectrum& spectrum,
                                     const Permutation& sigma, bool real_mode = false);

struct ClassifyOptions {
  double horizon = 4000.0;
  double chunk_exponent = 4.0;
  // Converged when the off-diagonal norm drops below this times min(1, range).
  double threshold = 1e-6;
};

struct LimitClassification {
  Permutation sigma_minus;
  Permutation sigma_plus;
  EquilibriumReport minus;
  EquilibriumReport plus;
  double off_diagonal_minus = 0.0;
  double off_diagonal_plus = 0.0;
  double time_minus = 0.0;  // time needed to reach the threshold (as |t|)
  double time_plus = 0.0;
};

/// Reads sigma from a (near-)diagonal matrix by nearest eigenvalue.
Permutation match_diagonal(const Matrix& l, const Spectrum& spectrum);

LimitClassification classify_limits(const StaircaseHermitian& l0,
                                    const ClassifyOptions& options = {});

/// {lambda_sigma(j) - lambda_sigma(i) : i < j <= h(i)}, doubled unless real.
std::vector<double> linearization_spectrum(const HessenbergFunction& h, const Spectrum& spectrum,
                                           const Permutation& sigma, bool real_mode = false);

struct NumericLinearization {
  // Jacobian of the field in b-coordinates (re, im per pattern pair; re only
  // in real mode) at A_sigma, by central differences.
  std::vector<std::vector<double>> jacobian;
  std::vector<double> diagonal;
  double max_off_diagonal = 0.0;
  int negative_count = 0;
  bool hyperbolic = false;
  double max_relative_error = 0.0;  // diagonal vs analytic list
};

NumericLinearization numeric_linearization(const HessenbergFunction& h, const Spectrum& spectrum,
                                           const Permutation& sigma, bool real_mode = false,
                                           double delta = 1e-3);

/// F = Tr(L N) = sum_i i a_i.
double lyapunov_F(const StaircaseHermitian& l);
/// Exact dF/dt = -2 sum_{i<j<=h(i)} (j - i) |b_ij|^2.
double dissipation_rate(const StaircaseHermitian& l);

/// ||-J^{-1}([L, N]) - P(L)||_max.
double gradient_identity(const Matrix& l);

}  // namespace isoflow
