#pragma once

// Shared fixtures: the canonical small graphs and the analytic equilibria the
// suites revisit.

#include <cmath>
#include <vector>

#include "formation/control.hpp"
#include "formation/geometry.hpp"
#include "formation/graph.hpp"

namespace fixtures {

inline formation::TriangulatedLamanGraph k3() {
  return formation::TriangulatedLamanGraph::build_from_henneberg(3,
                                                                 {{3, {1, 2}}});
}

/// The five-vertex graph built by joining 3 to (1,2), 4 to (2,3), 5 to (3,4).
inline formation::TriangulatedLamanGraph five_vertex() {
  return formation::TriangulatedLamanGraph::build_from_henneberg(
      5, {{3, {1, 2}}, {4, {2, 3}}, {5, {3, 4}}});
}

/// Strip of triangles on n vertices: each new vertex attaches to the two
/// previous ones.
inline formation::TriangulatedLamanGraph strip(int n) {
  std::vector<formation::HennebergStep> steps;
  for (int v = 3; v <= n; ++v) steps.push_back({v, {v - 2, v - 1}});
  return formation::TriangulatedLamanGraph::build_from_henneberg(n, steps);
}

inline formation::FormationSystem unit_system(formation::TriangulatedLamanGraph g) {
  const std::vector<double> targets(g.edges().size(), 1.0);
  return formation::build_system(std::move(g), targets);
}

inline formation::Configuration unit_equilateral() {
  return formation::Configuration{
      {{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}}};
}

/// Collinear equilibrium of the unit-target triangle: the middle agent at the
/// origin, the outer agents at +-1/sqrt(2).
inline formation::Configuration k3_line_equilibrium() {
  const double s = 1.0 / std::sqrt(2.0);
  return formation::Configuration{{{0.0, 0.0}, {-s, 0.0}, {s, 0.0}}};
}

/// Exact equilibrium of the five-vertex unit-target system with agents 1,2,3
/// on one line and 3,4,5 on another: both triangles sit in their collinear
/// equilibrium shape and the bridging edge (2,4) is at its target length
/// (cos phi = -3/4 makes d_24 = 1).
inline formation::Configuration five_vertex_crossed_lines_equilibrium() {
  const double s = 1.0 / std::sqrt(2.0);
  const Eigen::Vector2d x3(s, 0.0);
  const Eigen::Vector2d u(-0.75, std::sqrt(7.0) / 4.0);
  return formation::Configuration{{{0.0, 0.0},
                                   {-s, 0.0},
                                   {x3.x(), x3.y()},
                                   {x3.x() + s * u.x(), x3.y() + s * u.y()},
                                   {x3.x() + std::sqrt(2.0) * u.x(),
                                    x3.y() + std::sqrt(2.0) * u.y()}}};
}

/// The crossed-lines embedding used to exercise the partition cases:
/// 1,2,3 on the x-axis and 3,4,5 on a vertical line (not an equilibrium).
inline formation::Configuration five_vertex_crossed_lines_shape() {
  return formation::Configuration{
      {{0.0, 0.0}, {2.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {1.0, 2.0}}};
}

}  // namespace fixtures
