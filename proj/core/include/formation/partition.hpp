#pragma once

#include <Eigen/Core>
#include <vector>

#include "formation/geometry.hpp"
#include "formation/graph.hpp"

namespace formation {

/// One block of an independent partition: a triangulated-Laman line
/// sub-framework. `subgraph` is relabeled to 1..|V_i|; local vertex l maps to
/// global id vertices_global[l-1], and `subconfig` lists points in that order.
struct PartFramework {
  std::vector<Edge> edges_global;     // sorted, in g's labels
  std::vector<int> vertices_global;   // sorted ascending
  TriangulatedLamanGraph subgraph;    // relabeled, with its own witness
  Configuration subconfig;

  int local_index(int global_vertex) const;  // 1-based; throws if absent
};

/// The coarsest partition of the edge set whose blocks induce triangulated-
/// Laman line sub-frameworks. Blocks are ordered by their smallest edge.
struct IndependentPartition {
  std::vector<PartFramework> parts;

  int size() const { return static_cast<int>(parts.size()); }
  int singleton_count() const;
  /// Index of the part containing edge (i,j); throws if the edge is unknown.
  int part_of(const Edge& e) const;
};

/// Runs the two-case recursion along the graph's stored witness: when the new
/// vertex lands aligned with its anchor pair the three edges merge into the
/// anchor's block, otherwise the two new edges become singletons. The result
/// does not depend on the witness choice.
IndependentPartition independent_partition(const TriangulatedLamanGraph& g,
                                           const Configuration& p,
                                           double align_tol = kDefaultAlignTol);

/// Exhaustively enumerates all partitions of the edge set whose blocks induce
/// triangulated-Laman line sub-frameworks and checks that each refines
/// `candidate`. Brute-force bound n <= 7 (throws `too_large`).
bool partition_is_coarsest(const TriangulatedLamanGraph& g,
                           const Configuration& p,
                           const IndependentPartition& candidate,
                           double align_tol = kDefaultAlignTol);

/// Parameters of the per-part perturbation solve.
struct EtaSettings {
  int max_iterations = 50;
  double residual_tol = 1e-12;
  /// Newton steps are clamped to this fraction of the shortest incident edge.
  double trust_fraction = 0.25;
};

/// The perturbation map of part i: given new positions for that part's
/// agents, re-places every other agent so that all inter-agent distances
/// outside part i are preserved (each other sub-framework moves inside its
/// own orbit). The unperturbed input returns p bitwise.
///
/// Nondegenerate-triangle vertices are solved by Newton on the 2x2 distance
/// system; aligned vertices are placed by the affine combination whose
/// coefficients are computed once at p and frozen.
Configuration eta_map(const TriangulatedLamanGraph& g, const Configuration& p,
                      const IndependentPartition& partition, int part_index,
                      const Configuration& part_points_perturbed,
                      double align_tol = kDefaultAlignTol,
                      const EtaSettings& settings = {});

/// Analytic derivative of eta_map at the unperturbed point: 2n x 2|V_i|,
/// column-wise directional derivatives. Rows of part-i vertices form the
/// identity; rows of any other part lie in that part's orbit tangent space.
Eigen::MatrixXd eta_derivative(const TriangulatedLamanGraph& g,
                               const Configuration& p,
                               const IndependentPartition& partition,
                               int part_index,
                               double align_tol = kDefaultAlignTol);

}  // namespace formation
