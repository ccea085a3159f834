// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria, capped at 1.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "isoflow/error.hpp"
#include "isoflow/gkm.hpp"
#include "isoflow/hessfn.hpp"
#include "isoflow/toda.hpp"
#include "isoflow/twin.hpp"

using namespace isoflow;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects detail text and failure messages from worker threads.
class Checker {
 public:
  void require(bool ok, const std::string& what) {
    if (ok) return;
    std::lock_guard lock(mu_);
    pass_ = false;
    if (failures_.size() < 5) failures_.push_back(what);
  }
  void note(const std::string& s) {
    std::lock_guard lock(mu_);
    if (!detail_.empty()) detail_ += "; ";
    detail_ += s;
  }
  Outcome outcome() const {
    std::string d = detail_;
    for (const auto& f : failures_) d += (d.empty() ? "" : "; ") + std::string("failed: ") + f;
    return {pass_, d};
  }

 private:
  std::mutex mu_;
  bool pass_ = true;
  std::string detail_;
  std::vector<std::string> failures_;
};

void parallel_for(int count, const std::function<void(int)>& body) {
  const int jobs = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(jobs, count); ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct AtomicMax {
  std::mutex mu;
  double value = 0.0;
  void update(double x) {
    std::lock_guard lock(mu);
    value = std::max(value, x);
  }
};

// h(i) = min(h(i), n) restricted to the first n entries.
HessenbergFunction truncate(const std::vector<int>& h, int n) {
  std::vector<int> v(h.begin(), h.begin() + n);
  for (auto& x : v) x = std::min(x, n);
  return HessenbergFunction::validate(v);
}

std::vector<HessenbergFunction> flow_family() {
  std::vector<HessenbergFunction> out;
  for (int n = 2; n <= 6; ++n) {
    out.push_back(HessenbergFunction::minimal(n));
    out.push_back(HessenbergFunction::maximal(n));
    const auto t = truncate({3, 3, 5, 6, 6, 6}, n);
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  }
  return out;
}

std::vector<HessenbergFunction> indecomposable_upto(int n_max) {
  std::vector<HessenbergFunction> out;
  for (int n = 2; n <= n_max; ++n)
    for (const auto& h : enumerate_all(n))
      if (h.is_indecomposable()) out.push_back(h);
  return out;
}

Outcome criterion1() {
  Checker c;
  const std::vector<std::uint64_t> expected{1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796};
  for (int n = 1; n <= 10; ++n) {
    const auto counts = count_hessenberg(n);
    c.require(counts.total == expected[n - 1], "total at n=" + std::to_string(n));
    c.require(counts.indecomposable == (n == 1 ? 1 : expected[n - 2]),
              "indecomposable at n=" + std::to_string(n));
  }
  c.note("totals C_n and indecomposable C_{n-1} for n=1..10");
  return c.outcome();
}

Outcome criterion2() {
  Checker c;
  c.require(betti_table(HessenbergFunction::minimal(3)).betti == std::vector<std::uint64_t>{1, 4, 1}, "h_min n=3");
  c.require(betti_table(HessenbergFunction::maximal(3)).betti == std::vector<std::uint64_t>{1, 2, 2, 1},
            "h_max n=3");
  int count = 0;
  for (const auto& h : enumerate_all(4)) {
    if (!h.is_indecomposable()) continue;
    const auto b = betti_table(h);
    c.require(b.total() == 24 && b.symmetric(), h.to_string());
    ++count;
  }
  c.require(count == 5, "five indecomposable h at n=4");
  c.note(std::to_string(count) + " indecomposable tables at n=4 sum to 24 and are symmetric");
  return c.outcome();
}

Outcome criterion3(bool real) {
  Checker c;
  const auto family = flow_family();
  constexpr int kSeeds = 50;
  AtomicMax drift, leakage, increase, imag;
  IntegrationConfig cfg;
  cfg.sample_every = 1000;
  parallel_for(static_cast<int>(family.size()) * kSeeds, [&](int idx) {
    const auto& h = family[idx / kSeeds];
    const auto sample = random_staircase(h, 1000 + idx % kSeeds, real);
    const auto traj = integrate(sample.matrix, 30.0, cfg);
    drift.update(traj.max_drift);
    leakage.update(traj.max_leakage);
    increase.update(traj.max_lyapunov_increase);
    imag.update(traj.max_imag);
    const std::string tag = h.to_string() + " seed " + std::to_string(idx % kSeeds);
    c.require(traj.max_drift < 1e-8, "drift " + tag);
    c.require(traj.max_leakage < 1e-12, "leakage " + tag);
    c.require(traj.max_lyapunov_increase < 1e-10, "F increase " + tag);
    if (real) c.require(traj.max_imag == 0.0, "imaginary part " + tag);
  });
  c.note(std::to_string(family.size()) + " h x " + std::to_string(kSeeds) + " seeds to t=30");
  c.note("max drift " + fmt(drift.value) + ", leakage " + fmt(leakage.value) + ", F increase " +
         fmt(increase.value) + (real ? ", imag " + fmt(imag.value) : ""));
  return c.outcome();
}

Outcome criterion4(bool real) {
  Checker c;
  const auto family = flow_family();
  constexpr int kSeeds = 5;
  AtomicMax dist, worst_order;
  double min_order = 1e9;
  std::mutex order_mu;
  IntegrationConfig cfg;
  cfg.sample_every = 1000;  // records t = 0, 1, ..., 10
  parallel_for(static_cast<int>(family.size()) * kSeeds, [&](int idx) {
    const auto& h = family[idx / kSeeds];
    const auto sample = random_staircase(h, 2000 + idx % kSeeds, real);
    const auto traj = integrate(sample.matrix, 10.0, cfg);
    for (int t : {1, 5, 10}) {
      const auto& state = traj.states[t];
      const double d = (state.l.matrix() - qr_solution(sample.matrix, state.t).matrix()).frobenius_norm();
      dist.update(d);
      c.require(std::abs(state.t - t) < 1e-9 && d < 1e-6, "oracle " + h.to_string());
    }
    const Matrix field = toda_field(sample.matrix.matrix());
    std::vector<double> errs;
    for (double delta : {8e-3, 4e-3, 2e-3, 1e-3}) {
      const Matrix fd = (qr_solution(sample.matrix, delta).matrix() - qr_solution(sample.matrix, -delta).matrix()) *
                        Complex(1.0 / (2.0 * delta));
      errs.push_back((fd - field).frobenius_norm());
    }
    for (std::size_t k = 1; k < errs.size(); ++k) {
      const double order = std::log2(errs[k - 1] / errs[k]);
      std::lock_guard lock(order_mu);
      min_order = std::min(min_order, order);
    }
  });
  c.require(min_order >= 1.9, "derivative order " + fmt(min_order));
  c.note("max distance " + fmt(dist.value) + " at t in {1,5,10}; min observed order " + fmt(min_order));
  return c.outcome();
}

Outcome criterion5(bool real) {
  Checker c;
  const std::vector<HessenbergFunction> hs{HessenbergFunction::minimal(4), HessenbergFunction::maximal(5),
                                           HessenbergFunction::validate({3, 3, 5, 6, 6, 6})};
  constexpr int kSeeds = 100;
  for (const auto& h : hs) {
    std::atomic<int> good{0};
    parallel_for(kSeeds, [&](int s) {
      const auto sample = random_staircase(h, 3000 + s, real);
      try {
        const auto cls = classify_limits(sample.matrix);
        if (cls.sigma_plus == reversal_permutation(h.size()) && cls.sigma_minus == identity_permutation(h.size()))
          ++good;
      } catch (const Error&) {
      }
    });
    c.require(good >= 99, h.to_string() + " converged " + std::to_string(good.load()));
    c.note(h.to_string() + " " + std::to_string(good.load()) + "/100");
  }
  const auto sp = Spectrum::from_values({-1.3, 0.2, 0.9, 2.4});
  const auto perms = all_permutations(4);
  AtomicMax rel;
  int checked = 0;
  for (const auto& h : enumerate_all(4)) {
    if (!h.is_indecomposable()) continue;
    for (const auto& sigma : perms) {
      const auto num = numeric_linearization(h, sp, sigma, real);
      rel.update(num.max_relative_error);
      const int expect = (real ? 1 : 2) * hess_inversions(h, sigma);
      c.require(num.max_relative_error < 1e-6 && num.negative_count == expect && num.hyperbolic,
                "linearization " + h.to_string());
      ++checked;
    }
  }
  c.note(std::to_string(checked) + " equilibria over S_4, max relative error " + fmt(rel.value));
  return c.outcome();
}

Outcome criterion6(bool real) {
  Checker c;
  const auto family = indecomposable_upto(6);
  AtomicMax ratio, stencil;
  parallel_for(1000, [&](int i) {
    const auto& h = family[i % family.size()];
    const Matrix l = random_staircase(h, 4000 + i, real).matrix.matrix();
    const double r = gradient_identity(l) / l.max_abs();
    ratio.update(r);
    c.require(r <= 1e-14, "gradient identity " + h.to_string());
  });
  const auto flows = flow_family();
  IntegrationConfig cfg;
  cfg.sample_every = 1;
  parallel_for(static_cast<int>(flows.size()), [&](int k) {
    const auto sample = random_staircase(flows[k], 5000 + k, real);
    const auto traj = integrate(sample.matrix, 3.0, cfg);
    const double dt = cfg.step;
    const auto& F = traj.diagnostics;
    for (std::size_t s = 2; s + 2 < traj.states.size(); s += 37) {
      const double numeric =
          (F[s - 2].lyapunov - 8.0 * F[s - 1].lyapunov + 8.0 * F[s + 1].lyapunov - F[s + 2].lyapunov) / (12.0 * dt);
      const double exact = dissipation_rate(traj.states[s].l);
      const double err = std::abs(numeric - exact) / std::max(1.0, std::abs(exact));
      stencil.update(err);
      c.require(err <= 1e-8, "dF/dt " + flows[k].to_string());
    }
  });
  c.note("1000 inputs, max identity ratio " + fmt(ratio.value) + "; dF/dt max error " + fmt(stencil.value));
  return c.outcome();
}

Outcome criterion7() {
  Checker c;
  for (const auto& h : {HessenbergFunction::minimal(3), HessenbergFunction::maximal(3),
                        HessenbergFunction::minimal(4)}) {
    const auto x = poincare_consistency(h, 8, GkmMode::X);
    const auto y = poincare_consistency(h, 8, GkmMode::Y);
    c.require(x.pass && y.pass, "series " + h.to_string());
    c.require(x.table.equivariant == y.table.equivariant, "modes " + h.to_string());
    const auto gx = build_graph(h, GkmMode::X);
    const auto gy = build_graph(h, GkmMode::Y);
    CohomologyComputer cx(gx);
    CohomologyComputer cy(gy);
    for (int k = 0; k <= 4; ++k) {
      const auto& sx = cx.solutions(k);
      const auto& sy = cy.solutions(k);
      RowSpace image(sy.unknowns());
      bool congruent = true;
      for (const auto& v : sx.kernel) {
        const auto cls = xi_transform(gx, sx.to_class(v), XiDirection::XtoY);
        congruent = congruent && satisfies_congruences(gy, cls);
        image.insert(sy.to_flat(cls));
      }
      c.require(congruent && image.rank() == sx.rank(), "xi " + h.to_string() + " degree " + std::to_string(2 * k));
    }
    std::ostringstream ranks;
    for (auto r : x.table.equivariant) ranks << r << ' ';
    c.note(h.to_string() + " ranks " + ranks.str() + "(X = Y)");
  }
  return c.outcome();
}

Outcome criterion8() {
  Checker c;
  for (const auto& h : {HessenbergFunction::minimal(3), HessenbergFunction::maximal(3),
                        HessenbergFunction::minimal(4)}) {
    const int d = h.complex_dimension();
    const auto t = ordinary_ranks(build_graph(h, GkmMode::X), 2 * d + 4);
    const auto b = betti_table(h).betti;
    for (std::size_t k = 0; k < t.ordinary.size(); ++k)
      c.require(t.ordinary[k] == (k < b.size() ? b[k] : 0), h.to_string() + " degree " + std::to_string(2 * k));
    std::ostringstream ranks;
    for (auto r : t.ordinary) ranks << r << ' ';
    c.note(h.to_string() + " " + ranks.str());
  }
  return c.outcome();
}

Outcome criterion9() {
  Checker c;
  const auto full = degree2_generation(build_graph(HessenbergFunction::maximal(3), GkmMode::X), 6);
  const auto small = degree2_generation(build_graph(HessenbergFunction::minimal(3), GkmMode::X), 4);
  const auto fail = degree2_generation(build_graph(HessenbergFunction::validate({3, 4, 4, 4}), GkmMode::X), 10);
  c.require(full.pass(), "h_max n=3");
  c.require(small.pass(), "h_min n=3");
  c.require(fail.first_failure && *fail.first_failure == 4, "(3,4,4,4) failure degree");
  c.note("(3,4,4,4) first failure at degree " + (fail.first_failure ? std::to_string(*fail.first_failure) : "none"));
  return c.outcome();
}

Outcome criterion10(bool real) {
  Checker c;
  const auto family = indecomposable_upto(6);
  double membership = 0, flag = 0, invariance = 0, entry = 0;
  for (const auto& h : family) {
    const auto r = twin_batch(h, 100, 6000, real, static_cast<int>(std::thread::hardware_concurrency()));
    c.require(r.pass, h.to_string());
    membership = std::max(membership, r.max_membership);
    flag = std::max(flag, r.max_flag);
    invariance = std::max(invariance, r.max_invariance);
    entry = std::max(entry, r.max_entry_law);
  }
  c.require(membership <= 1e-8 && flag <= 1e-8, "residuals");
  c.require(invariance <= 1e-10, "invariance");
  c.require(entry <= 1e-12, "entry law");
  c.note(std::to_string(family.size()) + " h x 100 samples; max membership " + fmt(membership) + ", flag " +
         fmt(flag) + ", invariance " + fmt(invariance) + ", entry law " + fmt(entry));
  return c.outcome();
}

Outcome criterion11() {
  Checker c;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> parts{
      {"3", [] { return criterion3(true); }}, {"4", [] { return criterion4(true); }},
      {"5", [] { return criterion5(true); }}, {"6", [] { return criterion6(true); }},
      {"10", [] { return criterion10(true); }}};
  for (const auto& [name, f] : parts) {
    const auto o = f();
    c.require(o.pass, std::string("real ") + name + ": " + o.detail);
    c.note(std::string(name) + (o.pass ? " ok" : " FAIL"));
  }
  return c.outcome();
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, criterion1},
      {2, criterion2},
      {3, [] { return criterion3(false); }},
      {4, [] { return criterion4(false); }},
      {5, [] { return criterion5(false); }},
      {6, [] { return criterion6(false); }},
      {7, criterion7},
      {8, criterion8},
      {9, criterion9},
      {10, [] { return criterion10(false); }},
      {11, criterion11},
  };
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", id, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
