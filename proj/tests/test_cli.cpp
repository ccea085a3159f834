#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using namespace isoflow;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args) {
  args.push_back("--format");
  args.push_back("json");
  const auto r = run(args);
  REQUIRE(r.code == 0);
  return json::parse(r.out);
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("isoflow_test_" + name);
}

}  // namespace

TEST_CASE("parsing Hessenberg arguments") {
  CHECK(cli::parse_hessenberg("2,3,3").values() == std::vector<int>{2, 3, 3});
  CHECK(cli::parse_hessenberg("(2,3,3)").values() == std::vector<int>{2, 3, 3});
  CHECK(cli::parse_hessenberg("min:4").values() == std::vector<int>{2, 3, 4, 4});
  CHECK(cli::parse_hessenberg("max:3").values() == std::vector<int>{3, 3, 3});
  CHECK_THROWS_AS(cli::parse_hessenberg("2,x,3"), Error);
  CHECK_THROWS_AS(cli::parse_hessenberg("3,2,3"), Error);
  CHECK_THROWS_AS(cli::parse_hessenberg(""), Error);
}

TEST_CASE("enumerate") {
  const auto r = run({"enumerate", "-n", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# isoflow", 0) == 0);
  const auto rows = data_lines(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == "h,d,indecomposable");
  int indecomposable = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) indecomposable += rows[i].back() == '1';
  CHECK(indecomposable == 2);

  CHECK(data_lines(run({"enumerate", "-n", "1"}).out).size() == 2);
  CHECK(data_lines(run({"enumerate", "-n", "10"}).out).size() == 16797);

  const auto j = run_json({"enumerate", "-n", "4"});
  CHECK(j["header"]["command"] == "enumerate");
  CHECK(j["header"]["config"]["n"] == "4");
  CHECK(j.dump().find("14") != std::string::npos);
}

TEST_CASE("betti") {
  const auto j = run_json({"betti", "--h", "2,3,3"});
  CHECK(j["report"]["betti"] == json::array({1, 4, 1}));
  CHECK(j["report"]["total"] == 6);
  const auto csv = run({"betti", "--h", "max:3"});
  REQUIRE(csv.code == 0);
  CHECK(data_lines(csv.out).size() >= 5);
}

TEST_CASE("graph output") {
  const auto dot = run({"graph", "--h", "max:2", "--gkm", "X"});
  REQUIRE(dot.code == 0);
  CHECK(dot.out.find("graph") != std::string::npos);
  CHECK(dot.out.find("--") != std::string::npos);
  const auto g = run({"graph", "--h", "min:3", "--gkm", "Y", "--format", "json"});
  REQUIRE(g.code == 0);
  CHECK(g.out.find("\"edges\"") != std::string::npos);
}

TEST_CASE("gkm modes agree") {
  const auto j = run_json({"gkm", "--h", "min:3", "--mode", "both", "--cutoff", "4"});
  CHECK(j["report"]["modes_agree"] == true);
  CHECK(j["report"]["pass"] == true);
  CHECK(j["report"]["X"]["ranks"]["equivariant"] == json::array({1, 7, 19}));
  CHECK(j["report"]["X"]["ranks"] == j["report"]["Y"]["ranks"]);
  // Failure of degree-two generation is a result, not an error.
  const auto gen = run_json({"gkm", "--h", "3,4,4,4", "--mode", "X", "--generation", "--up-to", "8"});
  CHECK(gen["report"]["X"]["generation"]["pass"] == false);
  CHECK(gen["report"]["X"]["generation"]["first_failure"] == 4);
  CHECK(run({"gkm", "--h", "min:3", "--generation", "--up-to", "4"}).code == 0);
}

TEST_CASE("flow") {
  const auto j = run_json({"flow", "--h", "min:3", "--seed", "1", "--t-end", "30",
                           "--sample-every", "1000"});
  const auto& r = j["report"];
  CHECK(r["at_equilibrium"] == false);
  CHECK(r["classification"]["sigma_plus"] == json::array({3, 2, 1}));
  CHECK(r["classification"]["sigma_minus"] == json::array({1, 2, 3}));
  CHECK(r["integration"]["max_drift"].get<double>() < 1e-6);
  CHECK(r["integration"]["max_leakage"].get<double>() == 0.0);

  const auto d = run_json({"flow", "--h", "min:4", "--diagonal", "--t-end", "1"});
  CHECK(d["report"]["at_equilibrium"] == true);

  const auto o = run_json({"flow", "--h", "min:3", "--seed", "2", "--t-end", "5", "--oracle",
                           "--oracle-times", "1,5", "--no-classify"});
  REQUIRE(o["report"]["oracle"].size() == 2);
  for (const auto& e : o["report"]["oracle"]) {
    CHECK(e["pass"] == true);
    CHECK(e["frobenius"].get<double>() < 1e-6);
  }

  const auto path = temp_file("trajectory.csv");
  REQUIRE(run({"flow", "--h", "min:3", "--seed", "1", "--t-end", "1", "--sample-every", "100",
               "--no-classify", "--out", path.string()})
              .code == 0);
  std::ifstream f(path);
  const auto rows = data_lines(std::string(std::istreambuf_iterator<char>(f), {}));
  std::filesystem::remove(path);
  REQUIRE(rows.size() == 12);
  CHECK(rows[0].rfind("t,", 0) == 0);
}

TEST_CASE("reproducibility") {
  const std::vector<std::string> args{"flow", "--h", "2,3,4,4", "--seed", "17", "--t-end", "3",
                                      "--sample-every", "50", "--no-classify"};
  CHECK(run(args).out == run(args).out);
  const std::vector<std::string> tw{"twin", "--h", "min:4", "--seeds", "20", "--seed", "3"};
  auto one = tw;
  one.insert(one.end(), {"--jobs", "1"});
  auto four = tw;
  four.insert(four.end(), {"--jobs", "4"});
  const auto a = json::parse(run(one).out);
  const auto b = json::parse(run(four).out);
  CHECK(a["report"] == b["report"]);
}

TEST_CASE("twin") {
  const auto r = run({"twin", "--h", "min:4", "--seeds", "100", "--seed", "1"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["report"]["pass"] == true);
  CHECK(j["report"]["samples"].size() == 100);
  CHECK(run({"twin", "--h", "max:3", "--seeds", "10", "--real"}).code == 0);
}

TEST_CASE("exit codes") {
  CHECK(run({"betti", "--h", "3,2,3"}).code == cli::kBadInput);
  CHECK(run({"graph", "--h", "2,2,3", "--gkm", "X"}).code == cli::kBadInput);
  CHECK(run({"gkm", "--h", "min:6"}).code == cli::kResourceLimit);
  CHECK(run({"enumerate", "-n", "40"}).code == cli::kResourceLimit);
  CHECK(run({"flow", "--h", "min:3", "--seed", "1", "--t-end", "0.001", "--horizon", "0.001"})
            .code == cli::kNumerical);
  CHECK(run({"nosuch"}).code != 0);
  CHECK(run({"--version"}).code == 0);
  CHECK(run({"--version"}).out.find("0.1.0") != std::string::npos);
  CHECK(cli::exit_code_for(ErrorKind::NoConvergence) == cli::kNumerical);
  CHECK(cli::exit_code_for(ErrorKind::ResourceLimit) == cli::kResourceLimit);
  CHECK(cli::exit_code_for(ErrorKind::NotHessenberg) == cli::kBadInput);
}

TEST_CASE("config file, environment and flags") {
  const auto path = temp_file("config.toml");
  {
    std::ofstream f(path);
    f << "[flow]\nseed = 9\nt-end = 0.5\n";
  }
  const std::vector<std::string> base{"--config", path.string(), "flow", "--h", "min:3",
                                      "--no-classify", "--format", "json"};
  auto j = json::parse(run(base).out);
  CHECK(j["header"]["config"]["seed"] == "9");
  CHECK(j["report"]["seed"] == 9);
  CHECK(j["report"]["integration"]["t_end"] == 0.5);

  auto flagged = base;
  flagged.insert(flagged.end(), {"--seed", "4"});
  j = json::parse(run(flagged).out);
  CHECK(j["report"]["seed"] == 4);

  ::setenv("ISOFLOW_SEED", "13", 1);
  j = run_json({"flow", "--h", "min:3", "--t-end", "0.1", "--no-classify"});
  CHECK(j["report"]["seed"] == 13);
  j = json::parse(run(base).out);
  CHECK(j["report"]["seed"] == 9);
  j = run_json({"flow", "--h", "min:3", "--t-end", "0.1", "--no-classify", "--seed", "2"});
  CHECK(j["report"]["seed"] == 2);
  ::unsetenv("ISOFLOW_SEED");
  std::filesystem::remove(path);
}

TEST_CASE("output files carry the header") {
  const auto path = temp_file("betti.csv");
  REQUIRE(run({"betti", "--h", "min:4", "--format", "csv", "--out", path.string()}).code == 0);
  std::ifstream f(path);
  std::string first;
  std::getline(f, first);
  CHECK(first.rfind("# isoflow 0.1.0", 0) == 0);
  std::filesystem::remove(path);
}
