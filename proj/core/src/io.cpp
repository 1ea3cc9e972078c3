#include "formation/io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "formation/errors.hpp"

namespace formation {

using nlohmann::json;

json graph_to_json(const TriangulatedLamanGraph& g) {
  json steps = json::array();
  for (const HennebergStep& s : g.sequence())
    steps.push_back(json::array(
        {s.new_vertex, json::array({s.anchor.first, s.anchor.second})}));
  return json{{"n", g.vertex_count()}, {"steps", steps}};
}

TriangulatedLamanGraph graph_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    std::vector<HennebergStep> steps;
    for (const auto& s : j.at("steps")) {
      HennebergStep step;
      step.new_vertex = s.at(0).get<int>();
      step.anchor = {s.at(1).at(0).get<int>(), s.at(1).at(1).get<int>()};
      steps.push_back(step);
    }
    return TriangulatedLamanGraph::build_from_henneberg(n, steps);
  } catch (const json::exception& e) {
    raise(errc::io_error, std::string("malformed graph JSON: ") + e.what());
  }
}

std::string edge_key(const Edge& e) {
  const Edge ne = make_edge(e.first, e.second);
  return std::to_string(ne.first) + "-" + std::to_string(ne.second);
}

Edge edge_from_key(const std::string& key) {
  const auto dash = key.find('-');
  if (dash == std::string::npos)
    raise(errc::io_error, "edge key must look like \"i-j\": " + key);
  try {
    return make_edge(std::stoi(key.substr(0, dash)),
                     std::stoi(key.substr(dash + 1)));
  } catch (const std::exception&) {
    raise(errc::io_error, "edge key must look like \"i-j\": " + key);
  }
}

json system_to_json(const FormationSystem& sys) {
  json targets = json::object();
  for (std::size_t e = 0; e < sys.graph.edges().size(); ++e)
    targets[edge_key(sys.graph.edges()[e])] = sys.targets[e];
  const std::string family =
      sys.laws.empty() ? "inverse_square" : sys.laws.front().family;
  return json{{"graph", graph_to_json(sys.graph)},
              {"targets", targets},
              {"law", {{"family", family}}}};
}

FormationSystem system_from_json(const json& j) {
  TriangulatedLamanGraph g = graph_from_json(j.at("graph"));
  std::string family = "inverse_square";
  if (j.contains("law")) family = j.at("law").value("family", family);
  if (family != "inverse_square")
    raise(errc::io_error, "unknown law family: " + family);

  std::vector<double> targets(g.edges().size(), 0.0);
  try {
    const auto& tj = j.at("targets");
    for (auto it = tj.begin(); it != tj.end(); ++it) {
      const Edge e = edge_from_key(it.key());
      targets[static_cast<std::size_t>(g.edge_index(e.first, e.second))] =
          it.value().get<double>();
    }
  } catch (const json::exception& e) {
    raise(errc::io_error, std::string("malformed targets: ") + e.what());
  }
  return build_system(std::move(g), targets);
}

json configuration_to_json(const Configuration& p) {
  json pts = json::array();
  for (const auto& x : p.points) pts.push_back(json::array({x.x(), x.y()}));
  return json{{"points", pts}};
}

Configuration configuration_from_json(const json& j) {
  try {
    Configuration p;
    for (const auto& pt : j.at("points"))
      p.points.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
    return p;
  } catch (const json::exception& e) {
    raise(errc::io_error, std::string("malformed configuration JSON: ") + e.what());
  }
}

json partition_report(const IndependentPartition& partition) {
  json parts = json::array();
  for (const PartFramework& part : partition.parts) {
    json keys = json::array();
    for (const Edge& e : part.edges_global) keys.push_back(edge_key(e));
    parts.push_back(keys);
  }
  return json{{"parts", parts},
              {"line_parts", partition.size()},
              {"singletons", partition.singleton_count()}};
}

json spectral_report(const Signature& direct, StabilityClass cls,
                     const MbifResult& mbif) {
  json per_part = json::array();
  for (const Signature& s : mbif.per_part)
    per_part.push_back(json::array({s.n_plus, s.n_minus, s.n_zero}));
  const bool consistent = mbif.total.n_plus == direct.n_plus &&
                          mbif.total.n_minus == direct.n_minus;
  return json{
      {"signature", json::array({direct.n_plus, direct.n_minus, direct.n_zero})},
      {"class", to_string(cls)},
      {"per_part", per_part},
      {"mbif_consistent", consistent}};
}

json monte_carlo_report(const MonteCarloStats& stats) {
  json per_orbit = json::array();
  for (long c : stats.per_orbit) per_orbit.push_back(c);
  json per_class = json::object();
  for (TerminalClass c :
       {TerminalClass::target_orbit, TerminalClass::line_equilibrium,
        TerminalClass::other_equilibrium, TerminalClass::max_steps_reached})
    per_class[to_string(c)] = stats.class_count(c);
  return json{{"trials", stats.trials},
              {"seed", stats.seed},
              {"box", stats.box},
              {"per_orbit", per_orbit},
              {"per_class", per_class}};
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const int n = traj.configurations.empty() ? 0 : traj.configurations.front().size();
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x" << i << ",y" << i;
  out << ",phi,gradnorm\n";
  out.precision(17);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << traj.times[k];
    for (const auto& x : traj.configurations[k].points)
      out << "," << x.x() << "," << x.y();
    out << "," << traj.potential_values[k] << "," << traj.gradient_norms[k]
        << "\n";
  }
}

std::string configuration_csv_row(const Configuration& p) {
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  for (const auto& x : p.points) {
    if (!first) out << ",";
    out << x.x() << "," << x.y();
    first = false;
  }
  return out.str();
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::io_error, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    raise(errc::io_error, path + ": " + e.what());
  }
}

void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) raise(errc::io_error, "cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace formation
