#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "formation/geometry.hpp"
#include "formation/graph.hpp"

namespace formation {

/// Distance-feedback gain u(d) for one edge, with its derivative and the
/// edge energy  r -> integral_1^r s u(s) ds  that the potential sums.
///
/// A valid law satisfies
///   C1: d(x u(x))/dx > 0 and u has its unique zero at `target`,
///   C2: the edge energy diverges to -infinity as the distance tends to 0+.
/// Both are checked numerically on a grid by `validate_law`.
struct ControlLaw {
  std::string family;
  double target = 1.0;
  std::function<double(double)> gain;             // u(d)
  std::function<double(double)> gain_derivative;  // u'(d)
  std::function<double(double)> edge_energy;      // antiderivative of s*u(s) from 1
};

/// Factory for a per-edge law family, parameterized by the target distance.
using LawFactory = std::function<ControlLaw(double)>;

/// Reference family u(d) = 1 - (target/d)^2. Throws `nonpositive_target`.
ControlLaw law_inverse_square(double target);

/// Grid validation of C1/C2: 400 log-spaced points on [1e-4, 1e4] * target
/// for the monotonicity and sign checks, and divergence of the edge energy
/// sampled at 10^-k * target, k = 1..4. Throws `c1_violated` / `c2_suspect`.
void validate_law(const ControlLaw& law);

/// A triangulated Laman graph with one validated law per edge, target
/// distances satisfying the strict triangle inequalities on every 3-cycle.
/// Immutable after construction; all evaluations are pure.
struct FormationSystem {
  TriangulatedLamanGraph graph;
  std::vector<double> targets;    // canonical edge order
  std::vector<ControlLaw> laws;   // canonical edge order

  int vertex_count() const { return graph.vertex_count(); }
  double target_of(int i, int j) const { return targets[static_cast<std::size_t>(graph.edge_index(i, j))]; }
  const ControlLaw& law_of(int i, int j) const { return laws[static_cast<std::size_t>(graph.edge_index(i, j))]; }
};

/// Validating factory: checks target positivity, the strict triangle
/// inequalities (reporting the offending 3-cycle), and C1/C2 for every law.
FormationSystem build_system(TriangulatedLamanGraph g,
                             const std::vector<double>& targets,
                             const LawFactory& family = law_inverse_square);

/// Assembles a system from prebuilt laws without re-running grid checks.
/// Used for induced subsystems and reductions whose laws are derived from an
/// already validated system.
FormationSystem assemble_system_unchecked(TriangulatedLamanGraph g,
                                          std::vector<double> targets,
                                          std::vector<ControlLaw> laws);

/// Subsystem induced by a subgraph. `subgraph` is the relabeled graph whose
/// local vertex l corresponds to global id vertices_global[l-1]; laws and
/// targets are copied from the parent edge by edge.
FormationSystem induced_subsystem(const FormationSystem& sys,
                                  const TriangulatedLamanGraph& subgraph,
                                  const std::vector<int>& vertices_global);

double potential(const FormationSystem& sys, const Configuration& p);

/// Gradient of the potential; component i is sum_j u_ij(d_ij)(x_i - x_j).
/// The flow of the model is the negative of this vector.
Eigen::VectorXd gradient(const FormationSystem& sys, const Configuration& p);

/// Analytic Hessian assembled from per-edge 2x2 blocks
/// u(d) I + (u'(d)/d) v v^T, v = x_i - x_j, in the Laplacian sign pattern.
Eigen::MatrixXd hessian(const FormationSystem& sys, const Configuration& p);

}  // namespace formation
