#include "isoflow/hessfn.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "isoflow/error.hpp"

namespace isoflow {

HessenbergFunction HessenbergFunction::validate(std::vector<int> values) {
  const int n = static_cast<int>(values.size());
  if (n == 0) throw Error(ErrorKind::NotHessenberg, "empty value list");
  for (int i = 0; i < n; ++i) {
    const int v = values[i];
    if (v < 1 || v > n) {
      throw Error(ErrorKind::NotHessenberg,
                  "h(" + std::to_string(i + 1) + ")=" + std::to_string(v) + " outside [1," +
                      std::to_string(n) + "]");
    }
    if (v < i + 1) {
      throw Error(ErrorKind::NotHessenberg,
                  "h(" + std::to_string(i + 1) + ")=" + std::to_string(v) + " < " +
                      std::to_string(i + 1));
    }
    if (i > 0 && v < values[i - 1]) {
      throw Error(ErrorKind::NotHessenberg,
                  "h is not nondecreasing at " + std::to_string(i + 1));
    }
  }
  return HessenbergFunction(std::move(values));
}

HessenbergFunction HessenbergFunction::minimal(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = std::min(i + 2, n);
  return validate(std::move(v));
}

HessenbergFunction HessenbergFunction::maximal(int n) { return validate(std::vector<int>(n, n)); }

HessenbergFunction HessenbergFunction::identity(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 1);
  return validate(std::move(v));
}

std::vector<int> HessenbergFunction::dual() const {
  const int n = size();
  std::vector<int> g(n);
  for (int i = 1; i <= n; ++i) {
    int j = 1;
    while (values_[j - 1] < i) ++j;  // h(n) = n guarantees termination
    g[i - 1] = j;
  }
  return g;
}

int HessenbergFunction::complex_dimension() const {
  int d = 0;
  for (int i = 0; i < size(); ++i) d += values_[i] - (i + 1);
  return d;
}

bool HessenbergFunction::is_indecomposable() const {
  for (int i = 0; i + 1 < size(); ++i) {
    if (values_[i] <= i + 1) return false;
  }
  return true;
}

std::vector<std::pair<int, int>> HessenbergFunction::pattern_pairs() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < size(); ++i) {
    for (int j = i + 1; j < values_[i]; ++j) out.emplace_back(i, j);
  }
  return out;
}

std::string HessenbergFunction::to_string() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < size(); ++i) os << (i ? "," : "") << values_[i];
  os << ')';
  return os.str();
}

std::vector<std::vector<int>> SparsityGraph::components() const {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : edges) parent[find(a)] = find(b);
  std::vector<std::vector<int>> comps;
  std::vector<int> slot(n, -1);
  for (int v = 0; v < n; ++v) {
    const int r = find(v);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    comps[slot[r]].push_back(v);
  }
  return comps;
}

std::string SparsityGraph::to_dot(const std::string& name) const {
  std::ostringstream os;
  os << "graph " << name << " {\n";
  for (int v = 0; v < n; ++v) os << "  " << v + 1 << ";\n";
  for (auto [a, b] : edges) os << "  " << a + 1 << " -- " << b + 1 << ";\n";
  os << "}\n";
  return os.str();
}

SparsityGraph sparsity_graph(const HessenbergFunction& h) {
  return SparsityGraph{h.size(), h.pattern_pairs()};
}

HessenbergEnumerator::HessenbergEnumerator(int n, const Limits& limits) : n_(n) {
  if (n < 1) throw Error(ErrorKind::BadInput, "n must be positive");
  if (n > limits.max_enumerate_n) {
    throw Error(ErrorKind::ResourceLimit,
                "enumeration bounded by n <= " + std::to_string(limits.max_enumerate_n));
  }
}

std::optional<HessenbergFunction> HessenbergEnumerator::next() {
  if (done_) return std::nullopt;
  if (!started_) {
    started_ = true;
    current_.resize(n_);
    std::iota(current_.begin(), current_.end(), 1);
    return HessenbergFunction::validate(current_);
  }
  // Rightmost position that can grow; the suffix is reset to its smallest
  // admissible values, which gives the lexicographic successor.
  int pos = n_ - 2;
  while (pos >= 0 && current_[pos] == n_) --pos;
  if (pos < 0) {
    done_ = true;
    return std::nullopt;
  }
  ++current_[pos];
  for (int k = pos + 1; k < n_; ++k) current_[k] = std::max(k + 1, current_[pos]);
  return HessenbergFunction::validate(current_);
}

std::vector<HessenbergFunction> enumerate_all(int n, const Limits& limits) {
  HessenbergEnumerator e(n, limits);
  std::vector<HessenbergFunction> out;
  while (auto h = e.next()) out.push_back(std::move(*h));
  return out;
}

std::uint64_t catalan(int n) {
  // C_{k+1} = C_k * 2(2k+1) / (k+2), exact at every step.
  std::uint64_t c = 1;
  for (int k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

EnumerationCounts count_hessenberg(int n, const Limits& limits) {
  EnumerationCounts counts;
  HessenbergEnumerator e(n, limits);
  while (auto h = e.next()) {
    ++counts.total;
    if (h->is_indecomposable()) ++counts.indecomposable;
  }
  return counts;
}

Permutation identity_permutation(int n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

Permutation reversal_permutation(int n) {
  Permutation p(n);
  for (int i = 0; i < n; ++i) p[i] = n - 1 - i;
  return p;
}

Permutation from_one_line(const std::vector<int>& one_based) {
  Permutation p(one_based.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = one_based[i] - 1;
  if (!is_permutation(p)) throw Error(ErrorKind::BadInput, "not a permutation");
  return p;
}

std::vector<int> to_one_line(const Permutation& perm) {
  std::vector<int> out(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out[i] = perm[i] + 1;
  return out;
}

Permutation inverse(const Permutation& perm) {
  Permutation inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
  return inv;
}

Permutation times_transposition(Permutation perm, int i, int j) {
  std::swap(perm[i], perm[j]);
  return perm;
}

bool is_permutation(const Permutation& perm) {
  std::vector<bool> seen(perm.size(), false);
  for (int v : perm) {
    if (v < 0 || v >= static_cast<int>(perm.size()) || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
  return f;
}

std::vector<Permutation> all_permutations(int n, const Limits& limits) {
  if (n > limits.max_factorial_n) {
    throw Error(ErrorKind::ResourceLimit,
                "S_n loops bounded by n <= " + std::to_string(limits.max_factorial_n));
  }
  std::vector<Permutation> out;
  out.reserve(factorial(n));
  Permutation p = identity_permutation(n);
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

int hess_inversions(const HessenbergFunction& h, const Permutation& sigma) {
  int count = 0;
  for (auto [i, j] : h.pattern_pairs()) {
    if (sigma[i] > sigma[j]) ++count;
  }
  return count;
}

std::uint64_t BettiTable::total() const {
  return std::accumulate(betti.begin(), betti.end(), std::uint64_t{0});
}

bool BettiTable::symmetric() const {
  return std::equal(betti.begin(), betti.end(), betti.rbegin());
}

BettiTable betti_table(const HessenbergFunction& h, const Limits& limits) {
  BettiTable table;
  table.betti.assign(h.complex_dimension() + 1, 0);
  for (const auto& sigma : all_permutations(h.size(), limits)) {
    ++table.betti[hess_inversions(h, sigma)];
  }
  return table;
}

std::vector<std::uint64_t> equivariant_series(const BettiTable& betti, int n, int cutoff) {
  if (cutoff < 0 || cutoff % 2 != 0) {
    throw Error(ErrorKind::BadInput, "cutoff must be even and nonnegative");
  }
  const int top = cutoff / 2;
  // 1/(1-t^2)^n has coefficient binom(m+n-1, n-1) at t^{2m}.
  std::vector<std::uint64_t> free_part(top + 1);
  for (int m = 0; m <= top; ++m) {
    std::uint64_t c = 1;
    for (int r = 1; r <= n - 1; ++r) c = c * static_cast<std::uint64_t>(m + r) / r;
    free_part[m] = c;
  }
  std::vector<std::uint64_t> out(top + 1, 0);
  for (int k = 0; k <= top; ++k) {
    for (int j = 0; j <= k && j < static_cast<int>(betti.betti.size()); ++j) {
      out[k] += betti.betti[j] * free_part[k - j];
    }
  }
  return out;
}

std::vector<std::uint64_t> equivariant_series(const HessenbergFunction& h, int cutoff,
                                              const Limits& limits) {
  return equivariant_series(betti_table(h, limits), h.size(), cutoff);
}

}  // namespace isoflow
