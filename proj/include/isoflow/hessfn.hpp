#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace isoflow {

// One-line notation, 0-based: perm[i] is the image of i.
using Permutation = std::vector<int>;

struct Limits {
  int max_factorial_n = 8;   // loops over all of S_n
  int max_enumerate_n = 14;  // Catalan-sized enumeration
};

class HessenbergFunction {
 public:
  // Values are the 1-based list (h(1), ..., h(n)).
  static HessenbergFunction validate(std::vector<int> values);
  static HessenbergFunction minimal(int n);
  static HessenbergFunction maximal(int n);
  static HessenbergFunction identity(int n);

  int size() const { return static_cast<int>(values_.size()); }
  const std::vector<int>& values() const { return values_; }

  /// h(i) for 1-based i.
  int operator()(int i) const { return values_[i - 1]; }

  /// Dual function g(i) = min{ j | h(j) >= i }, 1-based values.
  std::vector<int> dual() const;

  /// d(h) = sum (h(i) - i); the complex dimension of X_h.
  int complex_dimension() const;

  bool is_indecomposable() const;

  /// Entry (r, c), 0-based, may be nonzero in a staircase matrix.
  bool allows(int r, int c) const {
    if (r > c) std::swap(r, c);
    return c + 1 <= values_[r];
  }

  /// Above-diagonal pattern pairs (i, j), 0-based, i < j <= h(i), row-major.
  std::vector<std::pair<int, int>> pattern_pairs() const;

  std::string to_string() const;

  bool operator==(const HessenbergFunction&) const = default;

 private:
  explicit HessenbergFunction(std::vector<int> values) : values_(std::move(values)) {}
  std::vector<int> values_;
};

struct SparsityGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // 0-based, first < second

  std::vector<std::vector<int>> components() const;
  bool connected() const { return components().size() <= 1; }
  std::string to_dot(const std::string& name = "sparsity") const;
};

SparsityGraph sparsity_graph(const HessenbergFunction& h);

// Lexicographic stream over all Hessenberg functions of size n.
class HessenbergEnumerator {
 public:
  explicit HessenbergEnumerator(int n, const Limits& limits = {});
  std::optional<HessenbergFunction> next();

 private:
  int n_;
  std::vector<int> current_;
  bool started_ = false;
  bool done_ = false;
};

std::vector<HessenbergFunction> enumerate_all(int n, const Limits& limits = {});

std::uint64_t catalan(int n);

struct EnumerationCounts {
  std::uint64_t total = 0;
  std::uint64_t indecomposable = 0;
};
EnumerationCounts count_hessenberg(int n, const Limits& limits = {});

// Permutations.
Permutation identity_permutation(int n);
Permutation reversal_permutation(int n);
Permutation from_one_line(const std::vector<int>& one_based);
std::vector<int> to_one_line(const Permutation& perm);
Permutation inverse(const Permutation& perm);
/// sigma * (i j): right multiplication by a transposition swaps positions i, j.
Permutation times_transposition(Permutation perm, int i, int j);
bool is_permutation(const Permutation& perm);
/// All of S_n in lexicographic order of one-line notation.
std::vector<Permutation> all_permutations(int n, const Limits& limits = {});
std::uint64_t factorial(int n);

/// #{ i < j <= h(i) | sigma(i) > sigma(j) }.
int hess_inversions(const HessenbergFunction& h, const Permutation& sigma);

struct BettiTable {
  // betti[k] is beta_{2k}, k = 0..d(h).
  std::vector<std::uint64_t> betti;

  std::uint64_t total() const;
  bool symmetric() const;
};

BettiTable betti_table(const HessenbergFunction& h, const Limits& limits = {});

/// Coefficients of (sum_k beta_{2k} t^{2k}) / (1 - t^2)^n at t^0, t^2, ..., t^cutoff.
std::vector<std::uint64_t> equivariant_series(const BettiTable& betti, int n, int cutoff);
std::vector<std::uint64_t> equivariant_series(const HessenbergFunction& h, int cutoff,
                                              const Limits& limits = {});

}  // namespace isoflow
