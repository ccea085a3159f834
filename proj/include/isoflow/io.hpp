#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "isoflow/gkm.hpp"
#include "isoflow/hessfn.hpp"
#include "isoflow/matcore.hpp"
#include "isoflow/toda.hpp"
#include "isoflow/twin.hpp"

namespace isoflow {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

// Provenance block carried by every output file.
struct OutputHeader {
  std::string command;
  Json config = Json::object();
  Json tolerances = Json::object();
};

Json header_json(const OutputHeader& header);
/// "# "-prefixed lines for CSV files.
std::string header_comment(const OutputHeader& header);

/// Round-trip decimal form of a double ("%.17g").
std::string exact_decimal(double x);

Json matrix_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
/// One line per row, re and im interleaved.
std::string matrix_csv(const Matrix& m);

Json enumeration_json(int n, const std::vector<HessenbergFunction>& list);
std::string enumeration_csv(const std::vector<HessenbergFunction>& list);

Json betti_json(const HessenbergFunction& h, const BettiTable& table,
                const std::vector<std::uint64_t>& series);
std::string betti_csv(const BettiTable& table);

/// t, a_i, (re, im) b_ij over the pattern, drift, leakage, F.
std::string trajectory_csv(const Trajectory& traj);
Json trajectory_json(const Trajectory& traj);
/// Long format: t, series (b_ij or offdiag), value.
std::string decay_csv(const Trajectory& traj);

Json equilibrium_json(const EquilibriumReport& report);
Json classification_json(const LimitClassification& cls);

Json rank_table_json(const RankTable& table);
std::string rank_table_csv(const RankTable& table);
Json graph_json(const GkmGraph& graph);
Json generation_json(const GenerationReport& report);

Json twin_json(const TwinBatchReport& report);

}  // namespace isoflow
