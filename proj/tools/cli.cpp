#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "isoflow/gkm.hpp"
#include "isoflow/io.hpp"
#include "isoflow/matcore.hpp"
#include "isoflow/toda.hpp"
#include "isoflow/twin.hpp"

namespace isoflow::cli {

namespace {

struct Context {
  std::ostream& out;
  std::ostream& err;
};

// Echo of every option of a subcommand: given values, else defaults.
Json echo_config(const CLI::App& sub) {
  Json j = Json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config" || name.empty()) continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      std::string joined;
      for (std::size_t i = 0; i < res.size(); ++i) joined += (i ? "," : "") + res[i];
      j[name] = joined;
    } else if (opt->get_expected_min() == 0) {
      j[name] = "false";
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

void emit(const std::string& doc, const std::string& path, std::ostream& fallback) {
  if (path.empty()) {
    fallback << doc;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::BadInput, "cannot open output file " + path);
  f << doc;
  if (!f) throw Error(ErrorKind::BadInput, "failed writing " + path);
}

std::string json_doc(const OutputHeader& header, Json body) {
  Json doc{{"header", header_json(header)}};
  for (auto& [k, v] : body.items()) doc[k] = v;
  return doc.dump(2) + "\n";
}

int cmd_enumerate(const CLI::App& sub, Context ctx, int n, const std::string& format, const std::string& path) {
  OutputHeader header{"enumerate", echo_config(sub), Json::object()};
  if (format == "json") {
    emit(json_doc(header, Json{{"report", enumeration_json(n, enumerate_all(n))}}), path, ctx.out);
    return kPass;
  }
  std::ofstream file;
  if (!path.empty()) {
    file.open(path, std::ios::binary);
    if (!file) throw Error(ErrorKind::BadInput, "cannot open output file " + path);
  }
  std::ostream& os = path.empty() ? ctx.out : file;
  os << header_comment(header) << "h,d,indecomposable\n";
  HessenbergEnumerator it(n);
  std::uint64_t total = 0;
  std::uint64_t indecomposable = 0;
  while (auto h = it.next()) {
    os << '"' << h->to_string() << "\"," << h->complex_dimension() << ',' << (h->is_indecomposable() ? 1 : 0)
       << '\n';
    ++total;
    if (h->is_indecomposable()) ++indecomposable;
  }
  os << "# total " << total << " catalan(n) " << catalan(n) << "\n";
  os << "# indecomposable " << indecomposable << " catalan(n-1) " << catalan(n - 1) << "\n";
  return kPass;
}

int cmd_betti(const CLI::App& sub, Context ctx, const HessenbergFunction& h, int cutoff,
              const std::string& format, const std::string& path) {
  OutputHeader header{"betti", echo_config(sub), Json::object()};
  const auto table = betti_table(h);
  const auto series = equivariant_series(table, h.size(), cutoff);
  if (format == "csv") {
    emit(header_comment(header) + betti_csv(table), path, ctx.out);
  } else {
    emit(json_doc(header, Json{{"report", betti_json(h, table, series)}}), path, ctx.out);
  }
  return kPass;
}

int cmd_graph(const CLI::App& sub, Context ctx, const HessenbergFunction& h, const std::string& gkm,
              const std::string& format, const std::string& path) {
  OutputHeader header{"graph", echo_config(sub), Json::object()};
  if (gkm == "none") {
    const auto g = sparsity_graph(h);
    if (format == "json") {
      Json edges = Json::array();
      for (auto [a, b] : g.edges) edges.push_back({a + 1, b + 1});
      const Json body{{"h", h.values()}, {"n", g.n}, {"edges", edges}, {"connected", g.connected()}};
      emit(json_doc(header, Json{{"report", body}}), path, ctx.out);
    } else {
      emit("// isoflow " + std::string(kVersion) + " graph " + h.to_string() + "\n" + g.to_dot("sparsity"), path,
           ctx.out);
    }
    return kPass;
  }
  const auto graph = build_graph(h, gkm == "X" ? GkmMode::X : GkmMode::Y);
  if (format == "json") {
    emit(json_doc(header, Json{{"report", graph_json(graph)}}), path, ctx.out);
  } else {
    emit("// isoflow " + std::string(kVersion) + " gkm " + gkm + " " + h.to_string() + "\n" + graph.to_dot(), path,
         ctx.out);
  }
  return kPass;
}

struct FlowOptions {
  std::string h;
  std::uint64_t seed = 1;
  double t_end = 30.0;
  double step = 1e-3;
  bool adaptive = false;
  bool real = false;
  bool diagonal = false;
  int sample_every = 100;
  double drift_tol = 1e-6;
  bool oracle = false;
  std::vector<double> oracle_times{1.0, 5.0, 10.0};
  double oracle_tol = 1e-6;
  bool no_classify = false;
  double horizon = 4000.0;
  double threshold = 1e-6;
  std::string format = "csv";
  std::string out;
  std::string report;
  std::string decay;
};

int cmd_flow(const CLI::App& sub, Context ctx, const FlowOptions& o) {
  const auto h = parse_hessenberg(o.h);
  IntegrationConfig cfg;
  cfg.step = o.step;
  cfg.adaptive = o.adaptive;
  cfg.sample_every = o.sample_every;
  cfg.drift_tol = o.drift_tol;
  OutputHeader header{"flow", echo_config(sub),
                      Json{{"drift", cfg.drift_tol},
                           {"rtol", cfg.rtol},
                           {"atol", cfg.atol},
                           {"oracle", o.oracle_tol},
                           {"convergence", o.threshold}}};

  const auto sample = random_staircase(h, o.seed, o.real);
  const StaircaseHermitian l0 =
      o.diagonal ? StaircaseHermitian::diagonal(h, sample.spectrum.values()) : sample.matrix;
  const bool at_equilibrium = vector_field(l0).matrix().max_abs() == 0.0;

  Json report{{"h", h.values()},
              {"seed", o.seed},
              {"seed_used", sample.seed_used},
              {"real", o.real},
              {"spectrum", sample.spectrum.values()},
              {"initial", matrix_json(l0.matrix())},
              {"at_equilibrium", at_equilibrium}};
  int code = kPass;

  const Trajectory traj = integrate(l0, o.t_end, cfg);
  report["integration"] = Json{{"steps", traj.steps},
                               {"t_end", o.t_end},
                               {"max_drift", traj.max_drift},
                               {"max_leakage", traj.max_leakage},
                               {"max_lyapunov_increase", traj.max_lyapunov_increase},
                               {"max_imag", traj.max_imag},
                               {"final", matrix_json(traj.states.back().l.matrix())}};

  if (o.oracle) {
    Json lines = Json::array();
    for (double t : o.oracle_times) {
      const auto numeric = integrate(l0, t, cfg);
      const auto exact = qr_solution(l0, t);
      const double dist = (numeric.states.back().l.matrix() - exact.matrix()).frobenius_norm();
      const bool ok = dist < o.oracle_tol;
      if (!ok) code = kNumerical;
      lines.push_back(Json{{"t", t}, {"frobenius", dist}, {"pass", ok}});
    }
    report["oracle"] = lines;
  }

  if (!o.no_classify) {
    try {
      if (at_equilibrium) {
        const auto sigma = match_diagonal(l0.matrix(), sample.spectrum);
        report["classification"] = Json{{"sigma_minus", to_one_line(sigma)},
                                        {"sigma_plus", to_one_line(sigma)},
                                        {"equilibrium", equilibrium_json(equilibrium_report(
                                                            h, sample.spectrum, sigma, o.real))}};
      } else {
        ClassifyOptions copt;
        copt.horizon = o.horizon;
        copt.threshold = o.threshold;
        const auto cls = classify_limits(l0, copt);
        Json cj = classification_json(cls);
        cj["sink_is_reversal"] = cls.sigma_plus == reversal_permutation(h.size());
        cj["source_is_identity"] = cls.sigma_minus == identity_permutation(h.size());
        report["classification"] = cj;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotConverged) throw;
      report["classification"] = Json{{"error", e.what()}};
      code = kNumerical;
    }
  }

  if (!o.out.empty()) {
    if (o.format == "json") {
      emit(json_doc(header, Json{{"trajectory", trajectory_json(traj)}}), o.out, ctx.out);
    } else {
      emit(header_comment(header) + trajectory_csv(traj), o.out, ctx.out);
    }
  }
  if (!o.decay.empty()) emit(header_comment(header) + decay_csv(traj), o.decay, ctx.out);
  emit(json_doc(header, Json{{"report", report}}), o.report, ctx.out);
  return code;
}

struct GkmOptions {
  std::string h;
  std::string mode = "both";
  int cutoff = 8;
  bool ordinary = false;
  bool generation = false;
  int up_to = -1;
  std::string dot;
  std::string graph_json;
  std::string format = "json";
  std::string out;
};

int cmd_gkm(const CLI::App& sub, Context ctx, const GkmOptions& o) {
  const auto h = parse_hessenberg(o.h);
  if (o.cutoff < 0 || o.cutoff % 2 != 0) throw Error(ErrorKind::BadInput, "cutoff must be even and >= 0");
  OutputHeader header{"gkm", echo_config(sub), Json{{"arithmetic", "exact rational"}}};
  std::vector<GkmMode> modes;
  if (o.mode != "Y") modes.push_back(GkmMode::X);
  if (o.mode != "X") modes.push_back(GkmMode::Y);

  const auto series = equivariant_series(h, o.cutoff);
  Json body{{"h", h.values()}, {"series", series}};
  std::string csv = header_comment(header);
  std::vector<RankTable> tables;
  bool consistent = true;
  for (GkmMode mode : modes) {
    const auto graph = build_graph(h, mode);
    CohomologyComputer computer(graph);
    RankTable table;
    for (int k = 0; 2 * k <= o.cutoff; ++k) {
      table.degrees.push_back(2 * k);
      table.equivariant.push_back(computer.equivariant_rank(k));
      if (o.ordinary) table.ordinary.push_back(computer.ordinary_rank(k));
    }
    const bool match = table.equivariant == series;
    consistent = consistent && match;
    Json mj{{"ranks", rank_table_json(table)}, {"matches_series", match}};
    if (o.generation) {
      const int up_to = o.up_to >= 0 ? o.up_to : 2 * h.complex_dimension();
      mj["generation"] = generation_json(degree2_generation(graph, up_to));
    }
    body[to_string(mode)] = mj;
    csv += std::string("# mode ") + to_string(mode) + "\n" + rank_table_csv(table);
    tables.push_back(std::move(table));
    if (!o.dot.empty() && mode == modes.front()) emit(graph.to_dot(), o.dot, ctx.out);
    if (!o.graph_json.empty() && mode == modes.front())
      emit(json_doc(header, Json{{"report", graph_json(graph)}}), o.graph_json, ctx.out);
  }
  if (tables.size() == 2) {
    const bool agree = tables[0].equivariant == tables[1].equivariant && tables[0].ordinary == tables[1].ordinary;
    body["modes_agree"] = agree;
    consistent = consistent && agree;
  }
  body["pass"] = consistent;
  emit(o.format == "csv" ? csv : json_doc(header, Json{{"report", body}}), o.out, ctx.out);
  return consistent ? kPass : kNumerical;
}

struct TwinOptions {
  std::string h;
  int seeds = 100;
  std::uint64_t seed = 1;
  bool real = false;
  int jobs = 1;
  int trials = 10;
  std::string out;
};

int cmd_twin(const CLI::App& sub, Context ctx, const TwinOptions& o) {
  const auto h = parse_hessenberg(o.h);
  const TwinTolerances tol;
  const auto report = twin_batch(h, o.seeds, o.seed, o.real, o.jobs, o.trials, tol);
  OutputHeader header{"twin", echo_config(sub),
                      Json{{"unitarity", tol.unitarity},
                           {"membership", tol.membership},
                           {"invariance", tol.invariance},
                           {"entry_law", tol.entry_law}}};
  emit(json_doc(header, Json{{"report", twin_json(report)}}), o.out, ctx.out);
  return report.pass ? kPass : kNumerical;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ResourceLimit:
      return kResourceLimit;
    case ErrorKind::NoConvergence:
    case ErrorKind::DegenerateSpectrum:
    case ErrorKind::SingularInput:
    case ErrorKind::StepUnderflow:
    case ErrorKind::DriftExceeded:
    case ErrorKind::NotConverged:
    case ErrorKind::NotInZh:
    case ErrorKind::NotUnitary:
      return kNumerical;
    default:
      return kBadInput;
  }
}

HessenbergFunction parse_hessenberg(const std::string& text) {
  auto shorthand = [&](const std::string& prefix) -> int {
    if (text.rfind(prefix, 0) != 0) return -1;
    try {
      std::size_t used = 0;
      const int n = std::stoi(text.substr(prefix.size()), &used);
      if (used != text.size() - prefix.size()) throw Error(ErrorKind::BadInput, "bad size in " + text);
      return n;
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::BadInput, "bad size in " + text);
    }
  };
  if (int n = shorthand("min:"); n >= 0) return HessenbergFunction::minimal(n);
  if (int n = shorthand("max:"); n >= 0) return HessenbergFunction::maximal(n);
  std::string body = text;
  if (!body.empty() && body.front() == '(' && body.back() == ')') body = body.substr(1, body.size() - 2);
  std::vector<int> values;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stoi(item, &used));
      if (used != item.size() && item.find_first_not_of(' ', used) != std::string::npos) {
        throw Error(ErrorKind::BadInput, "bad entry '" + item + "'");
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::BadInput, "bad entry '" + item + "'");
    }
  }
  return HessenbergFunction::validate(values);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toda flows on staircase matrices and GKM cohomology of Hessenberg spaces", "isoflow"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_config("--config", "", "TOML config file; flags override it");
  app.set_version_flag("--version", std::string("isoflow ") + kVersion);
  app.require_subcommand(1);
  Context ctx{out, err};
  std::function<int()> action;

  const auto formats = CLI::IsMember({"csv", "json"});

  int en_n = 3;
  std::string en_format = "csv", en_out;
  auto* en = app.add_subcommand("enumerate", "List Hessenberg functions with d(h) and counts");
  en->add_option("-n,--n", en_n, "size")->required()->check(CLI::Range(1, 64));
  en->add_option("--format", en_format, "csv or json")->check(formats)->capture_default_str();
  en->add_option("--out", en_out, "output path (stdout when empty)");
  en->callback([&] { action = [&] { return cmd_enumerate(*en, ctx, en_n, en_format, en_out); }; });

  std::string be_h, be_format = "json", be_out;
  int be_cutoff = 8;
  auto* be = app.add_subcommand("betti", "Betti table and equivariant Poincare series");
  be->add_option("--h", be_h, "Hessenberg function, e.g. 2,3,3 or min:4")->required();
  be->add_option("--cutoff", be_cutoff, "series cutoff degree (even)")->capture_default_str();
  be->add_option("--format", be_format, "csv or json")->check(formats)->capture_default_str();
  be->add_option("--out", be_out, "output path");
  be->callback([&] {
    action = [&] { return cmd_betti(*be, ctx, parse_hessenberg(be_h), be_cutoff, be_format, be_out); };
  });

  std::string gr_h, gr_gkm = "none", gr_format = "dot", gr_out;
  auto* gr = app.add_subcommand("graph", "Sparsity graph or GKM graph export");
  gr->add_option("--h", gr_h, "Hessenberg function")->required();
  gr->add_option("--gkm", gr_gkm, "none, X or Y")->check(CLI::IsMember({"none", "X", "Y"}))->capture_default_str();
  gr->add_option("--format", gr_format, "dot or json")->check(CLI::IsMember({"dot", "json"}))->capture_default_str();
  gr->add_option("--out", gr_out, "output path");
  gr->callback([&] {
    action = [&] { return cmd_graph(*gr, ctx, parse_hessenberg(gr_h), gr_gkm, gr_format, gr_out); };
  });

  FlowOptions fo;
  auto* fl = app.add_subcommand("flow", "Integrate the Toda flow from a random staircase matrix");
  fl->add_option("--h", fo.h, "Hessenberg function")->required();
  fl->add_option("--seed", fo.seed, "sample seed")->envname("ISOFLOW_SEED")->capture_default_str();
  fl->add_option("--t-end", fo.t_end, "final time (negative runs backward)")->capture_default_str();
  fl->add_option("--step", fo.step, "RK4 step or initial adaptive step")->check(CLI::PositiveNumber)->capture_default_str();
  fl->add_flag("--adaptive", fo.adaptive, "Dormand-Prince with PI step control");
  fl->add_flag("--real", fo.real, "real symmetric inputs");
  fl->add_flag("--diagonal", fo.diagonal, "start at the diagonal matrix of the sampled spectrum");
  fl->add_option("--sample-every", fo.sample_every, "steps between recorded states")->check(CLI::PositiveNumber)->capture_default_str();
  fl->add_option("--drift-tol", fo.drift_tol, "relative spectrum drift bound")->capture_default_str();
  fl->add_flag("--oracle", fo.oracle, "compare with the QR solution");
  fl->add_option("--oracle-times", fo.oracle_times, "comparison times")->delimiter(',')->capture_default_str();
  fl->add_option("--oracle-tol", fo.oracle_tol, "Frobenius agreement bound")->capture_default_str();
  fl->add_flag("--no-classify", fo.no_classify, "skip the limit classification");
  fl->add_option("--horizon", fo.horizon, "classification time horizon")->capture_default_str();
  fl->add_option("--threshold", fo.threshold, "off-diagonal convergence threshold")->capture_default_str();
  fl->add_option("--format", fo.format, "trajectory format, csv or json")->check(formats)->capture_default_str();
  fl->add_option("--out", fo.out, "trajectory output path");
  fl->add_option("--report", fo.report, "report JSON path (stdout when empty)");
  fl->add_option("--decay", fo.decay, "long-format off-diagonal decay CSV path");
  fl->callback([&] { action = [&] { return cmd_flow(*fl, ctx, fo); }; });

  GkmOptions go;
  auto* gk = app.add_subcommand("gkm", "Equivariant and ordinary ranks from the GKM graph");
  gk->add_option("--h", go.h, "indecomposable Hessenberg function")->required();
  gk->add_option("--mode", go.mode, "X, Y or both")->check(CLI::IsMember({"X", "Y", "both"}))->capture_default_str();
  gk->add_option("--cutoff", go.cutoff, "largest cohomological degree")->capture_default_str();
  gk->add_flag("--ordinary", go.ordinary, "also compute ordinary ranks");
  gk->add_flag("--generation", go.generation, "check generation in degree two");
  gk->add_option("--up-to", go.up_to, "generation check bound (default 2d(h))");
  gk->add_option("--dot", go.dot, "DOT export path of the first graph");
  gk->add_option("--graph-json", go.graph_json, "JSON export path of the first graph");
  gk->add_option("--format", go.format, "csv or json")->check(formats)->capture_default_str();
  gk->add_option("--out", go.out, "output path");
  gk->callback([&] { action = [&] { return cmd_gkm(*gk, ctx, go); }; });

  TwinOptions to;
  auto* tw = app.add_subcommand("twin", "Round-trip and torus invariance checks for Z_h");
  tw->add_option("--h", to.h, "Hessenberg function")->required();
  tw->add_option("--seeds", to.seeds, "number of samples")->check(CLI::NonNegativeNumber)->capture_default_str();
  tw->add_option("--seed", to.seed, "base seed")->envname("ISOFLOW_SEED")->capture_default_str();
  tw->add_flag("--real", to.real, "real symmetric inputs");
  tw->add_option("--jobs", to.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  tw->add_option("--trials", to.trials, "torus trials per sample")->check(CLI::NonNegativeNumber)->capture_default_str();
  tw->add_option("--out", to.out, "output path");
  tw->callback([&] { action = [&] { return cmd_twin(*tw, ctx, to); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kBadInput;
  }

  try {
    return action ? action() : kBadInput;
  } catch (const Error& e) {
    err << "isoflow: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}

}  // namespace isoflow::cli
