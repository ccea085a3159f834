#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "isoflow/hessfn.hpp"

namespace isoflow {

using Rational = mpq_class;
using SparseVector = std::vector<std::pair<int, Rational>>;  // sorted by index, no zeros

// Homogeneous monomials of a fixed degree in n variables, lexicographic by
// exponent vector (descending on the first variable).
class MonomialBasis {
 public:
  MonomialBasis(int n, int degree);

  int variables() const { return n_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(monomials_.size()); }
  const std::vector<int>& exponents(int idx) const { return monomials_[idx]; }
  /// Index of the exponent vector, or -1 when it is not in this basis.
  int index(const std::vector<int>& exponents) const;

 private:
  int n_;
  int degree_;
  std::vector<std::vector<int>> monomials_;
  std::map<std::vector<int>, int> lookup_;
};

enum class GkmMode { X, Y };
const char* to_string(GkmMode mode);

struct GkmEdge {
  int from = 0;  // vertex indices, from < to
  int to = 0;
  int i = 0;  // transposition (i j), 0-based, i < j <= h(i)
  int j = 0;
  // Label e_plus - e_minus: X-mode (i, j), Y-mode (sigma(i), sigma(j)) at `from`.
  int plus = 0;
  int minus = 0;

  std::vector<int> weight(int n) const;
};

struct GkmLimits {
  int max_graph_n = 5;
  int max_rank_n = 4;
  long max_unknowns = 6000;
};

class GkmGraph {
 public:
  const HessenbergFunction& hessenberg() const { return h_; }
  GkmMode mode() const { return mode_; }
  int size() const { return h_.size(); }
  const std::vector<Permutation>& vertices() const { return vertices_; }
  const std::vector<GkmEdge>& edges() const { return edges_; }
  int vertex_index(const Permutation& sigma) const;
  std::vector<int> degrees() const;
  /// Signed-up-to-sign weights of the tangent representation at vertex v.
  std::vector<std::vector<int>> tangent_weights(int v) const;
  /// Labels of the edges at v, oriented away from v.
  std::vector<std::vector<int>> incident_labels(int v) const;
  std::string to_dot() const;

 private:
  friend GkmGraph build_graph(const HessenbergFunction&, GkmMode, const GkmLimits&);
  GkmGraph(HessenbergFunction h, GkmMode mode) : h_(std::move(h)), mode_(mode) {}
  HessenbergFunction h_;
  GkmMode mode_;
  std::vector<Permutation> vertices_;
  std::map<Permutation, int> index_;
  std::vector<GkmEdge> edges_;
};

GkmGraph build_graph(const HessenbergFunction& h, GkmMode mode, const GkmLimits& limits = {});

bool pairwise_noncollinear(const std::vector<std::vector<int>>& weights);
bool pairwise_noncollinear(const HessenbergFunction& h);

// Exact row space over Q kept in reduced row echelon form.
class RowSpace {
 public:
  explicit RowSpace(int dim) : dim_(dim), pivot_row_(dim, -1) {}

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(rows_.size()); }
  /// Adds v to the span; true when the rank grew.
  bool insert(const SparseVector& v);
  SparseVector reduce(const SparseVector& v) const;
  bool contains(const SparseVector& v) const { return reduce(v).empty(); }
  /// Basis of { x | r . x = 0 for every row r }.
  std::vector<SparseVector> kernel_basis() const;
  std::vector<int> free_columns() const;

 private:
  int choose_pivot(const SparseVector& v) const;
  int dim_;
  std::vector<SparseVector> rows_;
  std::vector<int> pivot_of_row_;
  std::vector<int> pivot_row_;
};

struct EquivariantClass {
  int n = 0;
  int degree = 0;
  // values[v] holds coefficients on MonomialBasis(n, degree), vertex order of the graph.
  std::vector<std::vector<Rational>> values;
};

/// The GKM congruence system at one polynomial degree (cohomological degree 2k).
struct SolutionSpace {
  int degree = 0;
  MonomialBasis basis;
  int vertex_count = 0;
  std::vector<SparseVector> kernel;  // basis of the solution space, flat coordinates
  std::vector<int> free_columns;     // kernel[i] has a 1 at free_columns[i]
  std::map<int, int> free_position;

  int rank() const { return static_cast<int>(kernel.size()); }
  int unknowns() const { return vertex_count * basis.size(); }
  EquivariantClass to_class(const SparseVector& flat) const;
  SparseVector to_flat(const EquivariantClass& cls) const;
  /// Coordinates of a solution in this basis (its entries at the free columns).
  SparseVector coordinates(const SparseVector& flat) const;
};

/// Builds and caches the congruence solution spaces of one graph.
class CohomologyComputer {
 public:
  explicit CohomologyComputer(const GkmGraph& graph, const GkmLimits& limits = {});

  const GkmGraph& graph() const { return graph_; }
  const SolutionSpace& solutions(int degree);
  int equivariant_rank(int degree) { return solutions(degree).rank(); }
  /// dim of sum_i eps_i * H_T^{2(k-1)} inside H_T^{2k}.
  int ideal_rank(int degree);
  int ordinary_rank(int degree) { return equivariant_rank(degree) - ideal_rank(degree); }

  /// Rank of the span of products of degree-one solutions together with the ideal.
  int generated_rank(int degree);

 private:
  const GkmGraph& graph_;
  GkmLimits limits_;
  std::map<int, SolutionSpace> cache_;
  std::map<int, int> ideal_cache_;
};

/// Linear constraints (one row per edge and target monomial) for degree k.
std::vector<SparseVector> congruence_rows(const GkmGraph& graph, const MonomialBasis& basis);
bool satisfies_congruences(const GkmGraph& graph, const EquivariantClass& cls);

int equivariant_rank(const GkmGraph& graph, int degree, const GkmLimits& limits = {});

struct RankTable {
  std::vector<int> degrees;  // cohomological degrees 2k
  std::vector<std::uint64_t> equivariant;
  std::vector<std::uint64_t> ordinary;  // empty when not computed
};

struct PoincareReport {
  RankTable table;  // equivariant column from the graph
  std::vector<std::uint64_t> series;
  bool pass = false;
};

PoincareReport poincare_consistency(const HessenbergFunction& h, int cutoff,
                                    GkmMode mode = GkmMode::X, const GkmLimits& limits = {});

/// Equivariant and ordinary ranks up to cohomological degree cutoff.
RankTable ordinary_ranks(const GkmGraph& graph, int cutoff, const GkmLimits& limits = {});

enum class XiDirection { XtoY, YtoX };

/// Per-vertex substitution eps_i -> eps_sigma(i) (inverse for Y to X).
/// The class must satisfy the source-mode congruences.
EquivariantClass xi_transform(const GkmGraph& source, const EquivariantClass& cls,
                              XiDirection direction);

struct GenerationReport {
  std::vector<int> degrees;
  std::vector<int> generated;  // rank of the degree-two generated part, in the quotient
  std::vector<int> ordinary;
  std::optional<int> first_failure;  // cohomological degree
  bool pass() const { return !first_failure.has_value(); }
};

GenerationReport degree2_generation(const GkmGraph& graph, int up_to,
                                    const GkmLimits& limits = {});

}  // namespace isoflow
