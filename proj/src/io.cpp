#include "isoflow/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "isoflow/error.hpp"

namespace isoflow {

namespace {

std::string one_line(const Permutation& sigma) {
  std::string s;
  for (int x : sigma) s += std::to_string(x + 1);
  return s;
}

Json one_line_json(const Permutation& sigma) { return Json(to_one_line(sigma)); }

}  // namespace

std::string exact_decimal(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
  return buf;
}

Json header_json(const OutputHeader& header) {
  return Json{{"tool", "isoflow"},
              {"version", kVersion},
              {"command", header.command},
              {"config", header.config},
              {"tolerances", header.tolerances}};
}

std::string header_comment(const OutputHeader& header) {
  std::ostringstream os;
  os << "# isoflow " << kVersion << "\n";
  os << "# command: " << header.command << "\n";
  os << "# config: " << header.config.dump() << "\n";
  os << "# tolerances: " << header.tolerances.dump() << "\n";
  return os.str();
}

Json matrix_json(const Matrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json rr = Json::array();
    Json ir = Json::array();
    for (int c = 0; c < m.cols(); ++c) {
      rr.push_back(exact_decimal(m(r, c).real()));
      ir.push_back(exact_decimal(m(r, c).imag()));
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

Matrix matrix_from_json(const Json& j) {
  try {
    const int rows = j.at("rows").get<int>();
    const int cols = j.at("cols").get<int>();
    if (rows < 0 || cols < 0) throw Error(ErrorKind::BadInput, "negative matrix shape");
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double re = std::strtod(j.at("re").at(r).at(c).get<std::string>().c_str(), nullptr);
        const double im = std::strtod(j.at("im").at(r).at(c).get<std::string>().c_str(), nullptr);
        m(r, c) = Complex(re, im);
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::BadInput, std::string("malformed matrix JSON: ") + e.what());
  }
}

std::string matrix_csv(const Matrix& m) {
  std::ostringstream os;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) os << ',';
      os << exact_decimal(m(r, c).real()) << ',' << exact_decimal(m(r, c).imag());
    }
    os << '\n';
  }
  return os.str();
}

Json enumeration_json(int n, const std::vector<HessenbergFunction>& list) {
  Json rows = Json::array();
  std::uint64_t indecomposable = 0;
  for (const auto& h : list) {
    rows.push_back(Json{{"h", h.values()},
                        {"d", h.complex_dimension()},
                        {"indecomposable", h.is_indecomposable()}});
    if (h.is_indecomposable()) ++indecomposable;
  }
  return Json{{"n", n},
              {"rows", rows},
              {"total", list.size()},
              {"indecomposable", indecomposable},
              {"catalan_n", catalan(n)},
              {"catalan_n_minus_1", n >= 1 ? catalan(n - 1) : 0}};
}

std::string enumeration_csv(const std::vector<HessenbergFunction>& list) {
  std::ostringstream os;
  os << "h,d,indecomposable\n";
  for (const auto& h : list) {
    os << '"' << h.to_string() << "\"," << h.complex_dimension() << ',' << (h.is_indecomposable() ? 1 : 0)
       << '\n';
  }
  return os.str();
}

Json betti_json(const HessenbergFunction& h, const BettiTable& table,
                const std::vector<std::uint64_t>& series) {
  Json degrees = Json::array();
  for (std::size_t k = 0; k < table.betti.size(); ++k) degrees.push_back(2 * k);
  return Json{{"h", h.values()},
              {"d", h.complex_dimension()},
              {"degrees", degrees},
              {"betti", table.betti},
              {"total", table.total()},
              {"symmetric", table.symmetric()},
              {"equivariant_series", series}};
}

std::string betti_csv(const BettiTable& table) {
  std::ostringstream os;
  os << "degree,betti\n";
  for (std::size_t k = 0; k < table.betti.size(); ++k) os << 2 * k << ',' << table.betti[k] << '\n';
  return os.str();
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  if (traj.states.empty()) return os.str();
  const auto& first = traj.states.front().l;
  const int n = first.size();
  const auto pairs = first.pattern().pattern_pairs();
  os << 't';
  for (int i = 1; i <= n; ++i) os << ",a" << i;
  for (auto [i, j] : pairs) os << ",re_b" << i + 1 << '_' << j + 1 << ",im_b" << i + 1 << '_' << j + 1;
  os << ",drift,leakage,F\n";
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    const auto& st = traj.states[s];
    const auto& dg = traj.diagnostics[s];
    os << exact_decimal(st.t);
    for (int i = 0; i < n; ++i) os << ',' << exact_decimal(st.l.a(i));
    for (auto [i, j] : pairs) {
      os << ',' << exact_decimal(st.l.b(i, j).real()) << ',' << exact_decimal(st.l.b(i, j).imag());
    }
    os << ',' << exact_decimal(dg.drift) << ',' << exact_decimal(dg.leakage) << ','
       << exact_decimal(dg.lyapunov) << '\n';
  }
  return os.str();
}

Json trajectory_json(const Trajectory& traj) {
  Json states = Json::array();
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    const auto& dg = traj.diagnostics[s];
    states.push_back(Json{{"t", exact_decimal(traj.states[s].t)},
                          {"matrix", matrix_json(traj.states[s].l.matrix())},
                          {"drift", dg.drift},
                          {"leakage", dg.leakage},
                          {"F", dg.lyapunov},
                          {"off_diagonal", dg.off_diagonal}});
  }
  return Json{{"spectrum", traj.initial_spectrum.values()},
              {"steps", traj.steps},
              {"max_drift", traj.max_drift},
              {"max_leakage", traj.max_leakage},
              {"max_lyapunov_increase", traj.max_lyapunov_increase},
              {"max_imag", traj.max_imag},
              {"states", states}};
}

std::string decay_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << "t,series,value\n";
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    const auto& st = traj.states[s];
    const std::string t = exact_decimal(st.t);
    for (auto [i, j] : st.l.pattern().pattern_pairs()) {
      os << t << ",b" << i + 1 << '_' << j + 1 << ',' << exact_decimal(std::abs(st.l.b(i, j))) << '\n';
    }
    os << t << ",offdiag," << exact_decimal(traj.diagnostics[s].off_diagonal) << '\n';
  }
  return os.str();
}

Json equilibrium_json(const EquilibriumReport& report) {
  return Json{{"sigma", one_line_json(report.sigma)},
              {"sigma_one_line", one_line(report.sigma)},
              {"morse_index", report.morse_index},
              {"linearization", report.linearization}};
}

Json classification_json(const LimitClassification& cls) {
  return Json{{"sigma_minus", one_line_json(cls.sigma_minus)},
              {"sigma_plus", one_line_json(cls.sigma_plus)},
              {"minus", equilibrium_json(cls.minus)},
              {"plus", equilibrium_json(cls.plus)},
              {"off_diagonal_minus", cls.off_diagonal_minus},
              {"off_diagonal_plus", cls.off_diagonal_plus},
              {"time_minus", cls.time_minus},
              {"time_plus", cls.time_plus}};
}

Json rank_table_json(const RankTable& table) {
  Json j{{"degrees", table.degrees}, {"equivariant", table.equivariant}};
  if (!table.ordinary.empty()) j["ordinary"] = table.ordinary;
  return j;
}

std::string rank_table_csv(const RankTable& table) {
  std::ostringstream os;
  const bool ord = !table.ordinary.empty();
  os << "degree,equivariant" << (ord ? ",ordinary" : "") << '\n';
  for (std::size_t k = 0; k < table.degrees.size(); ++k) {
    os << table.degrees[k] << ',' << table.equivariant[k];
    if (ord) os << ',' << table.ordinary[k];
    os << '\n';
  }
  return os.str();
}

Json graph_json(const GkmGraph& graph) {
  Json vertices = Json::array();
  for (const auto& v : graph.vertices()) vertices.push_back(one_line_json(v));
  Json edges = Json::array();
  for (const auto& e : graph.edges()) {
    edges.push_back(Json{{"from", e.from},
                         {"to", e.to},
                         {"transposition", {e.i + 1, e.j + 1}},
                         {"weight", e.weight(graph.size())}});
  }
  return Json{{"h", graph.hessenberg().values()},
              {"mode", to_string(graph.mode())},
              {"vertices", vertices},
              {"edges", edges}};
}

Json generation_json(const GenerationReport& report) {
  Json j{{"degrees", report.degrees},
         {"generated", report.generated},
         {"ordinary", report.ordinary},
         {"pass", report.pass()}};
  j["first_failure"] = report.first_failure ? Json(*report.first_failure) : Json(nullptr);
  return j;
}

Json twin_json(const TwinBatchReport& report) {
  Json samples = Json::array();
  for (const auto& s : report.samples) {
    samples.push_back(Json{{"seed", s.seed},
                           {"membership", s.membership},
                           {"flag", s.flag},
                           {"roundtrip", s.roundtrip},
                           {"left_change", s.quotient.max_left_change},
                           {"projector_change", s.quotient.max_projector_change},
                           {"entry_law", s.quotient.max_entry_law_error},
                           {"pass", s.pass}});
  }
  const auto& t = report.tolerances;
  return Json{{"h", report.h.values()},
              {"real", report.real_mode},
              {"tolerances",
               {{"unitarity", t.unitarity}, {"membership", t.membership}, {"invariance", t.invariance},
                {"entry_law", t.entry_law}}},
              {"max_membership", report.max_membership},
              {"max_flag", report.max_flag},
              {"max_roundtrip", report.max_roundtrip},
              {"max_invariance", report.max_invariance},
              {"max_entry_law", report.max_entry_law},
              {"pass", report.pass},
              {"samples", samples}};
}

}  // namespace isoflow
