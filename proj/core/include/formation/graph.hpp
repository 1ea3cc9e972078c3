#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

namespace formation {

/// Undirected edge with normalized endpoint order (first < second).
using Edge = std::pair<int, int>;

inline Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// One vertex-add move of a Henneberg construction: `new_vertex` is linked to
/// both endpoints of `anchor`, which must already be an edge. The anchor pair
/// is ordered; (i,j) and (j,i) are distinct steps of the same move.
struct HennebergStep {
  int new_vertex = 0;
  std::pair<int, int> anchor{0, 0};

  friend bool operator==(const HennebergStep&, const HennebergStep&) = default;
};

/// A minimally rigid planar graph built exclusively by vertex-add moves onto
/// existing edges, together with the construction witness that produced it.
///
/// Vertices carry 1-based integer ids in 1..n. The witness base edge is the
/// anchor pair of the first step (or (1,2) when n == 2); replaying the witness
/// from that base reproduces the edge set exactly.
class TriangulatedLamanGraph {
 public:
  /// Empty graph; placeholder state for containers and deferred assignment.
  TriangulatedLamanGraph() = default;

  /// Validates and replays a witness. Throws `anchor_not_edge`,
  /// `duplicate_vertex`, `bad_vertex_label`, or `wrong_step_count`.
  static TriangulatedLamanGraph build_from_henneberg(
      int n, const std::vector<HennebergStep>& steps);

  /// Reconstructs a witness for a bare edge set by peeling degree-2 vertices.
  /// Throws `not_triangulated_laman` when no witness exists.
  static TriangulatedLamanGraph from_edge_set(int n, std::vector<Edge> edges);

  int vertex_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }  // lexicographic
  const std::vector<HennebergStep>& sequence() const { return sequence_; }
  const std::vector<std::array<int, 3>>& cycles3() const { return cycles3_; }
  std::pair<int, int> base_edge() const { return base_; }

  bool has_edge(int i, int j) const;
  /// Index of edge (i,j) in the canonical lexicographic order; throws if absent.
  int edge_index(int i, int j) const;
  const std::vector<int>& neighbors(int v) const;
  int degree(int v) const { return static_cast<int>(neighbors(v).size()); }

  friend bool operator==(const TriangulatedLamanGraph& a,
                         const TriangulatedLamanGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_ && a.sequence_ == b.sequence_;
  }

 private:
  void finalize();  // sorts edges, builds adjacency and 3-cycles

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<HennebergStep> sequence_;
  std::pair<int, int> base_{1, 2};
  std::vector<std::vector<int>> adjacency_;  // 1-based, slot 0 unused
  std::vector<std::array<int, 3>> cycles3_;
};

/// All step-lists over the graph's fixed labels that replay to its edge set.
/// Anchor orientation counts: K3 has six sequences. Exhaustive for n <= 8;
/// larger graphs require `limit` > 0 (throws `too_large` otherwise).
std::vector<std::vector<HennebergStep>> enumerate_henneberg_sequences(
    const TriangulatedLamanGraph& g, std::size_t limit = 0);

/// A witness for `g` whose first |V(sub)| vertices induce exactly the
/// subgraph spanned by `sub_edges` (given in g's labels). The subgraph must
/// itself be triangulated Laman. Throws `not_subgraph` or
/// `not_triangulated_laman`.
std::vector<HennebergStep> leading_subgraph_sequence(
    const TriangulatedLamanGraph& g, const std::vector<Edge>& sub_edges);

}  // namespace formation
