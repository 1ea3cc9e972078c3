#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "formation/control.hpp"
#include "formation/dynamics.hpp"
#include "formation/geometry.hpp"
#include "formation/graph.hpp"
#include "formation/partition.hpp"
#include "formation/spectral.hpp"

namespace formation {

// Graph JSON: {"n": int, "steps": [[new_vertex, [i, j]], ...]}
nlohmann::json graph_to_json(const TriangulatedLamanGraph& g);
TriangulatedLamanGraph graph_from_json(const nlohmann::json& j);

// System JSON: {"graph": {...}, "targets": {"1-2": 1.0, ...},
//               "law": {"family": "inverse_square"}}
nlohmann::json system_to_json(const FormationSystem& sys);
FormationSystem system_from_json(const nlohmann::json& j);

// Configuration JSON: {"points": [[x, y], ...]}
nlohmann::json configuration_to_json(const Configuration& p);
Configuration configuration_from_json(const nlohmann::json& j);

/// Edge key "i-j" with i < j, as used in targets maps and partition reports.
std::string edge_key(const Edge& e);
Edge edge_from_key(const std::string& key);

// Partition report: {"parts": [["1-2","1-3","2-3"], ...],
//                    "line_parts": m, "singletons": k}
nlohmann::json partition_report(const IndependentPartition& partition);

// Spectral report: {"signature": [k,l,m], "class": "...",
//                   "per_part": [[...], ...], "mbif_consistent": bool}
nlohmann::json spectral_report(const Signature& direct, StabilityClass cls,
                               const MbifResult& mbif);

nlohmann::json monte_carlo_report(const MonteCarloStats& stats);

/// Trajectory CSV: header t,x1,y1,...,xn,yn,phi,gradnorm.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Single CSV row of a configuration: x1,y1,...,xn,yn.
std::string configuration_csv_row(const Configuration& p);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace formation
