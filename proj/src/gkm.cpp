#include "isoflow/gkm.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "isoflow/error.hpp"

namespace isoflow {

namespace {

// a - coef * b for sorted sparse vectors.
SparseVector axpy(const SparseVector& a, const Rational& coef, const SparseVector& b) {
  SparseVector out;
  out.reserve(a.size() + b.size());
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      out.push_back(*ia++);
    } else if (ia == a.end() || ib->first < ia->first) {
      out.emplace_back(ib->first, -coef * ib->second);
      ++ib;
    } else {
      Rational v = ia->second - coef * ib->second;
      if (sgn(v) != 0) out.emplace_back(ia->first, std::move(v));
      ++ia;
      ++ib;
    }
  }
  return out;
}

const Rational* find_entry(const SparseVector& v, int col) {
  auto it = std::lower_bound(v.begin(), v.end(), col,
                             [](const auto& e, int c) { return e.first < c; });
  return (it != v.end() && it->first == col) ? &it->second : nullptr;
}

std::size_t entry_size(const Rational& q) {
  return mpz_sizeinbase(q.get_num_mpz_t(), 2) + mpz_sizeinbase(q.get_den_mpz_t(), 2);
}

void require_rank_size(const GkmGraph& graph, const GkmLimits& limits) {
  if (graph.size() > limits.max_rank_n) {
    throw Error(ErrorKind::ResourceLimit,
                "rank tables bounded by n <= " + std::to_string(limits.max_rank_n));
  }
}

// m -> index of m + other in `out`, for every pair of monomials.
std::vector<std::vector<int>> product_table(const MonomialBasis& a, const MonomialBasis& b,
                                            const MonomialBasis& out) {
  std::vector<std::vector<int>> table(a.size(), std::vector<int>(b.size()));
  std::vector<int> e(a.variables());
  for (int x = 0; x < a.size(); ++x) {
    for (int y = 0; y < b.size(); ++y) {
      for (int v = 0; v < a.variables(); ++v) e[v] = a.exponents(x)[v] + b.exponents(y)[v];
      table[x][y] = out.index(e);
    }
  }
  return table;
}

// Pointwise product of two flat classes.
SparseVector pointwise_product(const SparseVector& x, const MonomialBasis& bx, const SparseVector& y,
                               const MonomialBasis& by, const MonomialBasis& bout,
                               const std::vector<std::vector<int>>& table) {
  std::map<int, Rational> acc;
  auto iy_begin = y.begin();
  for (auto ix = x.begin(); ix != x.end();) {
    const int v = ix->first / bx.size();
    auto ix_end = ix;
    while (ix_end != x.end() && ix_end->first / bx.size() == v) ++ix_end;
    while (iy_begin != y.end() && iy_begin->first / by.size() < v) ++iy_begin;
    auto iy_end = iy_begin;
    while (iy_end != y.end() && iy_end->first / by.size() == v) ++iy_end;
    for (auto a = ix; a != ix_end; ++a) {
      for (auto b = iy_begin; b != iy_end; ++b) {
        const int m = table[a->first % bx.size()][b->first % by.size()];
        acc[v * bout.size() + m] += a->second * b->second;
      }
    }
    ix = ix_end;
  }
  SparseVector out;
  for (auto& [c, q] : acc)
    if (sgn(q) != 0) out.emplace_back(c, q);
  return out;
}

}  // namespace

MonomialBasis::MonomialBasis(int n, int degree) : n_(n), degree_(degree) {
  if (n < 1 || degree < 0) throw Error(ErrorKind::BadInput, "monomial basis needs n >= 1, k >= 0");
  std::vector<int> e(n, 0);
  std::function<void(int, int)> rec = [&](int var, int left) {
    if (var == n - 1) {
      e[var] = left;
      lookup_.emplace(e, static_cast<int>(monomials_.size()));
      monomials_.push_back(e);
      return;
    }
    for (int p = left; p >= 0; --p) {
      e[var] = p;
      rec(var + 1, left - p);
    }
  };
  rec(0, degree);
}

int MonomialBasis::index(const std::vector<int>& exponents) const {
  auto it = lookup_.find(exponents);
  return it == lookup_.end() ? -1 : it->second;
}

const char* to_string(GkmMode mode) { return mode == GkmMode::X ? "X" : "Y"; }

std::vector<int> GkmEdge::weight(int n) const {
  std::vector<int> w(n, 0);
  w[plus] = 1;
  w[minus] = -1;
  return w;
}

int GkmGraph::vertex_index(const Permutation& sigma) const {
  auto it = index_.find(sigma);
  if (it == index_.end()) throw Error(ErrorKind::BadInput, "not a vertex of the graph");
  return it->second;
}

std::vector<int> GkmGraph::degrees() const {
  std::vector<int> deg(vertices_.size(), 0);
  for (const auto& e : edges_) {
    ++deg[e.from];
    ++deg[e.to];
  }
  return deg;
}

std::vector<std::vector<int>> GkmGraph::tangent_weights(int v) const {
  const auto& sigma = vertices_[v];
  std::vector<std::vector<int>> out;
  for (auto [i, j] : h_.pattern_pairs()) {
    std::vector<int> w(size(), 0);
    const int p = mode_ == GkmMode::X ? i : sigma[i];
    const int q = mode_ == GkmMode::X ? j : sigma[j];
    w[p] = 1;
    w[q] = -1;
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<std::vector<int>> GkmGraph::incident_labels(int v) const {
  std::vector<std::vector<int>> out;
  for (const auto& e : edges_) {
    if (e.from != v && e.to != v) continue;
    auto w = e.weight(size());
    if (e.to == v) {
      for (auto& x : w) x = -x;
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::string GkmGraph::to_dot() const {
  std::ostringstream os;
  os << "graph gkm_" << to_string(mode_) << " {\n";
  auto name = [&](int v) {
    std::string s = "\"";
    for (int x : vertices_[v]) s += std::to_string(x + 1);
    return s + "\"";
  };
  for (int v = 0; v < static_cast<int>(vertices_.size()); ++v) os << "  " << name(v) << ";\n";
  for (const auto& e : edges_) {
    os << "  " << name(e.from) << " -- " << name(e.to) << " [label=\"(";
    const auto w = e.weight(size());
    for (int k = 0; k < size(); ++k) os << (k ? "," : "") << w[k];
    os << ")\"];\n";
  }
  os << "}\n";
  return os.str();
}

GkmGraph build_graph(const HessenbergFunction& h, GkmMode mode, const GkmLimits& limits) {
  if (!h.is_indecomposable()) {
    throw Error(ErrorKind::Decomposable, "GKM graph needs indecomposable h, got " + h.to_string());
  }
  if (h.size() > limits.max_graph_n) {
    throw Error(ErrorKind::ResourceLimit,
                "graph construction bounded by n <= " + std::to_string(limits.max_graph_n));
  }
  GkmGraph g(h, mode);
  Limits perm_limits;
  perm_limits.max_factorial_n = std::max(perm_limits.max_factorial_n, limits.max_graph_n);
  g.vertices_ = all_permutations(h.size(), perm_limits);
  for (int v = 0; v < static_cast<int>(g.vertices_.size()); ++v) g.index_.emplace(g.vertices_[v], v);
  const auto pairs = h.pattern_pairs();
  for (int v = 0; v < static_cast<int>(g.vertices_.size()); ++v) {
    const auto& sigma = g.vertices_[v];
    for (auto [i, j] : pairs) {
      const int w = g.index_.at(times_transposition(sigma, i, j));
      if (v > w) continue;
      GkmEdge e{v, w, i, j, i, j};
      if (mode == GkmMode::Y) {
        e.plus = sigma[i];
        e.minus = sigma[j];
      }
      g.edges_.push_back(e);
    }
  }
  return g;
}

bool pairwise_noncollinear(const std::vector<std::vector<int>>& weights) {
  for (std::size_t a = 0; a < weights.size(); ++a) {
    for (std::size_t b = a + 1; b < weights.size(); ++b) {
      const auto& u = weights[a];
      const auto& w = weights[b];
      bool collinear = true;
      for (std::size_t r = 0; r < u.size() && collinear; ++r)
        for (std::size_t s = r + 1; s < u.size() && collinear; ++s)
          if (static_cast<long>(u[r]) * w[s] - static_cast<long>(u[s]) * w[r] != 0) collinear = false;
      if (collinear) return false;
    }
  }
  return true;
}

bool pairwise_noncollinear(const HessenbergFunction& h) {
  std::vector<std::vector<int>> weights;
  for (auto [i, j] : h.pattern_pairs()) {
    std::vector<int> w(h.size(), 0);
    w[i] = 1;
    w[j] = -1;
    weights.push_back(std::move(w));
  }
  return pairwise_noncollinear(weights);
}

int RowSpace::choose_pivot(const SparseVector& v) const {
  // Smallest entry by bit size keeps the fill-in coefficients small.
  int best = v.front().first;
  std::size_t best_size = entry_size(v.front().second);
  for (const auto& [c, q] : v) {
    const std::size_t s = entry_size(q);
    if (s < best_size) {
      best = c;
      best_size = s;
    }
  }
  return best;
}

SparseVector RowSpace::reduce(const SparseVector& v) const {
  std::vector<std::pair<int, Rational>> hits;
  for (const auto& [c, q] : v)
    if (pivot_row_[c] >= 0) hits.emplace_back(c, q);
  if (hits.empty()) return v;
  if (hits.size() == 1) {
    return axpy(v, hits.front().second, rows_[pivot_row_[hits.front().first]]);
  }
  std::vector<Rational> acc(dim_);
  std::vector<char> touched(dim_, 0);
  std::vector<int> cols;
  auto touch = [&](int c) {
    if (!touched[c]) {
      touched[c] = 1;
      cols.push_back(c);
    }
  };
  for (const auto& [c, q] : v) {
    acc[c] = q;
    touch(c);
  }
  // Rows vanish on the other pivot columns, so the coefficients stay fixed.
  for (const auto& [c, coef] : hits) {
    for (const auto& [col, x] : rows_[pivot_row_[c]]) {
      acc[col] -= coef * x;
      touch(col);
    }
  }
  std::sort(cols.begin(), cols.end());
  SparseVector out;
  for (int c : cols)
    if (sgn(acc[c]) != 0) out.emplace_back(c, std::move(acc[c]));
  return out;
}

bool RowSpace::insert(const SparseVector& v) {
  SparseVector r = reduce(v);
  if (r.empty()) return false;
  const int p = choose_pivot(r);
  const Rational inv = 1 / *find_entry(r, p);
  for (auto& [c, q] : r) q *= inv;
  for (auto& row : rows_) {
    if (const Rational* x = find_entry(row, p)) {
      const Rational coef = *x;
      row = axpy(row, coef, r);
    }
  }
  pivot_row_[p] = static_cast<int>(rows_.size());
  pivot_of_row_.push_back(p);
  rows_.push_back(std::move(r));
  return true;
}

std::vector<int> RowSpace::free_columns() const {
  std::vector<int> out;
  for (int c = 0; c < dim_; ++c)
    if (pivot_row_[c] < 0) out.push_back(c);
  return out;
}

std::vector<SparseVector> RowSpace::kernel_basis() const {
  const auto free = free_columns();
  std::vector<int> slot(dim_, -1);
  for (std::size_t k = 0; k < free.size(); ++k) slot[free[k]] = static_cast<int>(k);
  std::vector<SparseVector> basis(free.size());
  for (std::size_t k = 0; k < free.size(); ++k) basis[k].emplace_back(free[k], Rational(1));
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const int p = pivot_of_row_[r];
    for (const auto& [c, q] : rows_[r]) {
      if (c == p) continue;
      basis[slot[c]].emplace_back(p, -q);
    }
  }
  for (auto& v : basis) std::sort(v.begin(), v.end(), [](auto& a, auto& b) { return a.first < b.first; });
  return basis;
}

EquivariantClass SolutionSpace::to_class(const SparseVector& flat) const {
  EquivariantClass cls{basis.variables(), degree, {}};
  cls.values.assign(vertex_count, std::vector<Rational>(basis.size()));
  for (const auto& [c, q] : flat) cls.values[c / basis.size()][c % basis.size()] = q;
  return cls;
}

SparseVector SolutionSpace::to_flat(const EquivariantClass& cls) const {
  SparseVector out;
  for (int v = 0; v < static_cast<int>(cls.values.size()); ++v)
    for (int m = 0; m < basis.size(); ++m)
      if (sgn(cls.values[v][m]) != 0) out.emplace_back(v * basis.size() + m, cls.values[v][m]);
  return out;
}

SparseVector SolutionSpace::coordinates(const SparseVector& flat) const {
  SparseVector out;
  for (const auto& [c, q] : flat) {
    auto it = free_position.find(c);
    if (it != free_position.end()) out.emplace_back(it->second, q);
  }
  return out;
}

std::vector<SparseVector> congruence_rows(const GkmGraph& graph, const MonomialBasis& basis) {
  const int n = graph.size();
  const int bsize = basis.size();
  // For a label e_p - e_q, substituting eps_p = eps_q sends monomial m to
  // target(m); grouped by target, the sources form one constraint each.
  std::map<std::pair<int, int>, std::vector<std::vector<int>>> groups_by_label;
  auto groups_for = [&](int p, int q) -> const std::vector<std::vector<int>>& {
    auto key = std::make_pair(p, q);
    auto it = groups_by_label.find(key);
    if (it != groups_by_label.end()) return it->second;
    std::map<std::vector<int>, std::vector<int>> by_target;
    for (int m = 0; m < bsize; ++m) {
      std::vector<int> t = basis.exponents(m);
      t[q] += t[p];
      t[p] = 0;
      by_target[t].push_back(m);
    }
    std::vector<std::vector<int>> groups;
    for (auto& [t, src] : by_target) groups.push_back(std::move(src));
    return groups_by_label.emplace(key, std::move(groups)).first->second;
  };
  (void)n;
  std::vector<SparseVector> rows;
  for (const auto& e : graph.edges()) {
    for (const auto& group : groups_for(e.plus, e.minus)) {
      SparseVector row;
      for (int m : group) row.emplace_back(e.from * bsize + m, Rational(1));
      for (int m : group) row.emplace_back(e.to * bsize + m, Rational(-1));
      rows.push_back(std::move(row));  // from < to keeps the row sorted
    }
  }
  return rows;
}

bool satisfies_congruences(const GkmGraph& graph, const EquivariantClass& cls) {
  const MonomialBasis basis(cls.n, cls.degree);
  if (cls.n != graph.size() || static_cast<int>(cls.values.size()) != static_cast<int>(graph.vertices().size())) {
    throw Error(ErrorKind::ShapeMismatch, "class does not match the graph");
  }
  for (const auto& row : congruence_rows(graph, basis)) {
    Rational s = 0;
    for (const auto& [c, q] : row) s += q * cls.values[c / basis.size()][c % basis.size()];
    if (sgn(s) != 0) return false;
  }
  return true;
}

CohomologyComputer::CohomologyComputer(const GkmGraph& graph, const GkmLimits& limits)
    : graph_(graph), limits_(limits) {
  require_rank_size(graph, limits);
}

const SolutionSpace& CohomologyComputer::solutions(int degree) {
  if (auto it = cache_.find(degree); it != cache_.end()) return it->second;
  if (degree < 0) throw Error(ErrorKind::BadInput, "negative degree");
  MonomialBasis basis(graph_.size(), degree);
  const int vertices = static_cast<int>(graph_.vertices().size());
  const long unknowns = static_cast<long>(vertices) * basis.size();
  if (unknowns > limits_.max_unknowns) {
    throw Error(ErrorKind::ResourceLimit, "congruence system with " + std::to_string(unknowns) +
                                              " unknowns exceeds the bound");
  }
  RowSpace space(static_cast<int>(unknowns));
  for (const auto& row : congruence_rows(graph_, basis)) space.insert(row);
  SolutionSpace sol{degree, std::move(basis), vertices, space.kernel_basis(), space.free_columns(), {}};
  for (std::size_t k = 0; k < sol.free_columns.size(); ++k)
    sol.free_position.emplace(sol.free_columns[k], static_cast<int>(k));
  return cache_.emplace(degree, std::move(sol)).first->second;
}

int CohomologyComputer::ideal_rank(int degree) {
  if (degree <= 0) return 0;
  if (auto it = ideal_cache_.find(degree); it != ideal_cache_.end()) return it->second;
  const SolutionSpace& lower = solutions(degree - 1);
  const SolutionSpace& upper = solutions(degree);
  const MonomialBasis linear(graph_.size(), 1);
  const auto table = product_table(linear, lower.basis, upper.basis);
  RowSpace span(upper.rank());
  const int vertices = upper.vertex_count;
  for (int var = 0; var < graph_.size() && span.rank() < upper.rank(); ++var) {
    SparseVector eps;
    for (int v = 0; v < vertices; ++v) eps.emplace_back(v * linear.size() + var, Rational(1));
    for (const auto& s : lower.kernel) {
      if (span.rank() == upper.rank()) break;
      span.insert(upper.coordinates(
          pointwise_product(eps, linear, s, lower.basis, upper.basis, table)));
    }
  }
  ideal_cache_.emplace(degree, span.rank());
  return span.rank();
}

int CohomologyComputer::generated_rank(int degree) {
  const SolutionSpace& upper = solutions(degree);
  if (degree <= 1) return upper.rank();
  // A_k = Sol_1 * A_{k-1} + ideal; A_1 = Sol_1. Each level keeps the flat
  // vectors that were accepted into the span as its basis.
  const SolutionSpace& linear_sol = solutions(1);
  std::vector<SparseVector> previous = linear_sol.kernel;
  for (int k = 2; k <= degree; ++k) {
    const SolutionSpace& lower = solutions(k - 1);
    const SolutionSpace& cur = solutions(k);
    const auto table = product_table(linear_sol.basis, lower.basis, cur.basis);
    RowSpace span(cur.rank());
    std::vector<SparseVector> accepted;
    auto offer = [&](SparseVector flat) {
      if (span.rank() < cur.rank() && span.insert(cur.coordinates(flat))) {
        accepted.push_back(std::move(flat));
      }
    };
    for (const auto& a : linear_sol.kernel)
      for (const auto& b : previous)
        offer(pointwise_product(a, linear_sol.basis, b, lower.basis, cur.basis, table));
    const MonomialBasis linear(graph_.size(), 1);
    for (int var = 0; var < graph_.size(); ++var) {
      SparseVector eps;
      for (int v = 0; v < cur.vertex_count; ++v) eps.emplace_back(v * linear.size() + var, Rational(1));
      for (const auto& s : lower.kernel) offer(pointwise_product(eps, linear, s, lower.basis, cur.basis, table));
    }
    if (k == degree) return span.rank();
    previous = std::move(accepted);
  }
  return upper.rank();
}

int equivariant_rank(const GkmGraph& graph, int degree, const GkmLimits& limits) {
  CohomologyComputer computer(graph, limits);
  return computer.equivariant_rank(degree);
}

PoincareReport poincare_consistency(const HessenbergFunction& h, int cutoff, GkmMode mode,
                                    const GkmLimits& limits) {
  const GkmGraph graph = build_graph(h, mode, limits);
  CohomologyComputer computer(graph, limits);
  PoincareReport report;
  report.series = equivariant_series(h, cutoff);
  report.pass = true;
  for (int k = 0; 2 * k <= cutoff; ++k) {
    report.table.degrees.push_back(2 * k);
    report.table.equivariant.push_back(computer.equivariant_rank(k));
    if (report.table.equivariant.back() != report.series[k]) report.pass = false;
  }
  return report;
}

RankTable ordinary_ranks(const GkmGraph& graph, int cutoff, const GkmLimits& limits) {
  if (cutoff < 0 || cutoff % 2 != 0) throw Error(ErrorKind::BadInput, "cutoff must be even");
  CohomologyComputer computer(graph, limits);
  RankTable table;
  for (int k = 0; 2 * k <= cutoff; ++k) {
    table.degrees.push_back(2 * k);
    table.equivariant.push_back(computer.equivariant_rank(k));
    table.ordinary.push_back(computer.ordinary_rank(k));
  }
  return table;
}

EquivariantClass xi_transform(const GkmGraph& source, const EquivariantClass& cls,
                              XiDirection direction) {
  const bool forward = direction == XiDirection::XtoY;
  if ((source.mode() == GkmMode::X) != forward) {
    throw Error(ErrorKind::BadInput, "direction does not match the source graph mode");
  }
  if (!satisfies_congruences(source, cls)) {
    throw Error(ErrorKind::SourceConstraintViolation, "class violates source congruences");
  }
  const MonomialBasis basis(cls.n, cls.degree);
  EquivariantClass out{cls.n, cls.degree, {}};
  out.values.assign(cls.values.size(), std::vector<Rational>(basis.size()));
  std::vector<int> e(cls.n);
  for (std::size_t v = 0; v < cls.values.size(); ++v) {
    const Permutation& sigma = source.vertices()[v];
    const Permutation map = forward ? sigma : inverse(sigma);
    for (int m = 0; m < basis.size(); ++m) {
      if (sgn(cls.values[v][m]) == 0) continue;
      const auto& src = basis.exponents(m);
      for (int i = 0; i < cls.n; ++i) e[map[i]] = src[i];
      out.values[v][basis.index(e)] = cls.values[v][m];
    }
  }
  return out;
}

GenerationReport degree2_generation(const GkmGraph& graph, int up_to, const GkmLimits& limits) {
  const int d = graph.hessenberg().complex_dimension();
  if (up_to < 0 || up_to > 2 * d) throw Error(ErrorKind::BadInput, "up_to must lie in [0, 2d(h)]");
  CohomologyComputer computer(graph, limits);
  GenerationReport report;
  for (int k = 0; 2 * k <= up_to; ++k) {
    const int ideal = computer.ideal_rank(k);
    const int ordinary = computer.equivariant_rank(k) - ideal;
    const int generated = computer.generated_rank(k) - ideal;
    report.degrees.push_back(2 * k);
    report.ordinary.push_back(ordinary);
    report.generated.push_back(generated);
    if (generated < ordinary) {
      report.first_failure = 2 * k;
      break;
    }
  }
  return report;
}

}  // namespace isoflow
