#pragma once

#include <cstdint>
#include <vector>

#include "isoflow/hessfn.hpp"
#include "isoflow/matcore.hpp"

namespace isoflow {

// Flag F^U with F^U_i spanned by the first i columns of U.
class FlagFrame {
 public:
  explicit FlagFrame(UnitaryFrame u) : u_(std::move(u)) {}

  const UnitaryFrame& frame() const { return u_; }
  int size() const { return u_.size(); }
  /// Orthogonal projector onto F^U_k.
  Matrix projector(int k) const;

 private:
  UnitaryFrame u_;
};

struct TwinTolerances {
  double unitarity = 1e-10;
  double membership = 1e-8;
  double invariance = 1e-10;
  double entry_law = 1e-12;
};

struct Membership {
  bool member = false;
  double residual = 0.0;  // max modulus of U* Lambda U outside the pattern
};

/// Tests U* Lambda U in M_h. Throws NotUnitary.
Membership in_Z_h(const UnitaryFrame& u, const Spectrum& lambda, const HessenbergFunction& h,
                  double tol = 1e-8, double unitarity_tol = 1e-10);

/// U = W* for L = W Lambda W*, so U* Lambda U = L. Throws DegenerateSpectrum,
/// and NoConvergence when the frame misses Z_h.
FlagFrame twin_flag(const StaircaseHermitian& l, double tol = 1e-8);

/// max_i ||(I - Pi_{h(i)}) Lambda Pi_i||_2.
double hessenberg_flag_residual(const FlagFrame& frame, const Spectrum& lambda,
                                const HessenbergFunction& h);

/// U* Lambda U masked to the pattern. Throws NotInZh when the frame fails membership.
StaircaseHermitian staircase_from_frame(const UnitaryFrame& u, const Spectrum& lambda,
                                        const HessenbergFunction& h, bool real_mode,
                                        double tol = 1e-8);

struct QuotientReport {
  int trials = 0;
  double max_left_membership = 0.0;   // residual of D1 U
  double max_right_membership = 0.0;  // residual of U D2
  double max_left_change = 0.0;       // ||(D1 U)* Lambda (D1 U) - U* Lambda U||_max
  double max_projector_change = 0.0;  // max_i ||Pi_i(U D2) - Pi_i(U)||_max
  double max_entry_law_error = 0.0;   // D L D^{-1} vs t_i t_j^{-1} b_ij
  bool pass(const TwinTolerances& tol = {}) const;
};

/// Random diagonal unitaries (signs in real mode) acting on both sides.
/// Throws NotInZh when U is not in Z_h.
QuotientReport double_quotient_invariants(const UnitaryFrame& u, const Spectrum& lambda,
                                          const HessenbergFunction& h, std::uint64_t seed,
                                          int trials = 100, bool real_mode = false,
                                          const TwinTolerances& tol = {});

struct TwinSample {
  std::uint64_t seed = 0;
  double membership = 0.0;
  double flag = 0.0;
  double roundtrip = 0.0;  // ||staircase_from_frame(twin_flag(L)) - L||_max
  QuotientReport quotient;
  bool pass = false;
};

struct TwinBatchReport {
  HessenbergFunction h;
  bool real_mode = false;
  TwinTolerances tolerances;
  std::vector<TwinSample> samples;
  double max_membership = 0.0;
  double max_flag = 0.0;
  double max_roundtrip = 0.0;
  double max_invariance = 0.0;
  double max_entry_law = 0.0;
  bool pass = false;
};

/// Round-trip and invariance checks over `count` random staircase samples.
/// Samples are split across `jobs` threads; results keep the seed order.
TwinBatchReport twin_batch(const HessenbergFunction& h, int count, std::uint64_t seed,
                           bool real_mode = false, int jobs = 1, int trials = 10,
                           const TwinTolerances& tol = {});

}  // namespace isoflow
