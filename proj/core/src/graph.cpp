#include "formation/graph.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "formation/errors.hpp"

namespace formation {
namespace {

std::string edge_str(int i, int j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

/// Mutable adjacency structure over arbitrary integer labels. Used by the
/// peeling and sequence-search algorithms, which operate on subgraphs whose
/// labels are not contiguous.
struct EdgeGraph {
  std::set<Edge> edges;
  std::map<int, std::set<int>> adj;

  static EdgeGraph from(const std::vector<Edge>& es) {
    EdgeGraph g;
    for (const Edge& e : es) g.add(e.first, e.second);
    return g;
  }

  void add(int a, int b) {
    edges.insert(make_edge(a, b));
    adj[a].insert(b);
    adj[b].insert(a);
  }
  void remove_vertex(int v) {
    auto it = adj.find(v);
    if (it == adj.end()) return;
    for (int u : it->second) {
      adj[u].erase(v);
      edges.erase(make_edge(u, v));
    }
    adj.erase(it);
  }
  bool has_edge(int a, int b) const { return edges.count(make_edge(a, b)) > 0; }
  int degree(int v) const {
    auto it = adj.find(v);
    return it == adj.end() ? 0 : static_cast<int>(it->second.size());
  }
  std::size_t vertex_count() const { return adj.size(); }
};

/// Peels degree-2 vertices with adjacent neighbors down to a single edge and
/// returns the reversed removal order as a witness. Any peel order works for
/// a triangulated Laman graph, so the search is greedy.
std::optional<std::vector<HennebergStep>> find_witness(EdgeGraph g) {
  std::vector<HennebergStep> removed;
  while (g.vertex_count() > 2) {
    int pick = 0, pi = 0, pj = 0;
    for (const auto& [v, nbrs] : g.adj) {
      if (nbrs.size() != 2) continue;
      auto it = nbrs.begin();
      int a = *it++;
      int b = *it;
      if (g.has_edge(a, b)) {
        pick = v;
        pi = std::min(a, b);
        pj = std::max(a, b);
        break;
      }
    }
    if (pick == 0) return std::nullopt;
    removed.push_back({pick, {pi, pj}});
    g.remove_vertex(pick);
  }
  if (g.vertex_count() != 2 || g.edges.size() != 1) return std::nullopt;
  std::reverse(removed.begin(), removed.end());
  return removed;
}

bool is_triangulated_laman(const std::vector<Edge>& edges) {
  EdgeGraph g = EdgeGraph::from(edges);
  if (g.vertex_count() < 2) return false;
  if (edges.size() != 2 * g.vertex_count() - 3) return false;
  return find_witness(std::move(g)).has_value();
}

std::vector<int> vertices_of(const std::vector<Edge>& edges) {
  std::set<int> vs;
  for (const Edge& e : edges) {
    vs.insert(e.first);
    vs.insert(e.second);
  }
  return {vs.begin(), vs.end()};
}

/// Recursive core of Lemma-style leading-sequence construction: returns a
/// witness of `g` whose leading vertices span `sub`. Degree-2 vertices
/// outside the subgraph are peeled first; when none remain, the subgraph is
/// shrunk together with the graph.
std::vector<HennebergStep> leading_sequence_impl(EdgeGraph g,
                                                 std::vector<Edge> sub_edges) {
  const std::vector<int> sub_vertices = vertices_of(sub_edges);
  const std::size_t sub_n = sub_vertices.size();

  if (g.vertex_count() == sub_n) {
    // g equals sub (a triangulated-Laman subgraph is induced); any witness is
    // leading.
    auto w = find_witness(std::move(g));
    return *w;
  }

  // Prefer a degree-2 vertex that is not part of the subgraph.
  for (const auto& [v, nbrs] : g.adj) {
    if (nbrs.size() != 2) continue;
    if (std::binary_search(sub_vertices.begin(), sub_vertices.end(), v)) continue;
    auto it = nbrs.begin();
    int a = *it++;
    int b = *it;
    EdgeGraph rest = g;
    rest.remove_vertex(v);
    auto seq = leading_sequence_impl(std::move(rest), std::move(sub_edges));
    seq.push_back({v, {std::min(a, b), std::max(a, b)}});
    return seq;
  }

  // Every degree-2 vertex of g lies inside sub. Find one.
  int k = 0;
  for (const auto& [v, nbrs] : g.adj) {
    if (nbrs.size() == 2) {
      k = v;
      break;
    }
  }
  auto it = g.adj.at(k).begin();
  int a = *it++;
  int b = *it;

  if (sub_n == 2) {
    // sub is a single edge containing k. Lead with the triangle through k,
    // then rewrite its internal order so the base is exactly sub.
    const Edge sub_edge = sub_edges.front();
    const int i = sub_edge.first == k ? sub_edge.second : sub_edge.first;
    const int j = a == i ? b : a;
    std::vector<Edge> tri = {make_edge(i, j), make_edge(i, k), make_edge(j, k)};
    auto seq = leading_sequence_impl(std::move(g), std::move(tri));
    seq.front() = {j, {std::min(i, k), std::max(i, k)}};
    return seq;
  }

  // k has degree 2 in sub as well; recurse on (g - k, sub - k) and re-insert
  // the step right after sub - k completes.
  std::vector<Edge> sub_minus;
  for (const Edge& e : sub_edges)
    if (e.first != k && e.second != k) sub_minus.push_back(e);
  EdgeGraph rest = g;
  rest.remove_vertex(k);
  auto seq = leading_sequence_impl(std::move(rest), std::move(sub_minus));
  seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(sub_n - 3),
             {k, {std::min(a, b), std::max(a, b)}});
  return seq;
}

void enumerate_impl(EdgeGraph& g, std::vector<HennebergStep>& stack,
                    std::vector<std::vector<HennebergStep>>& out,
                    std::size_t limit) {
  if (limit > 0 && out.size() >= limit) return;
  if (g.vertex_count() == 2) {
    out.emplace_back(stack.rbegin(), stack.rend());
    return;
  }
  std::vector<int> candidates;
  for (const auto& [v, nbrs] : g.adj)
    if (nbrs.size() == 2) candidates.push_back(v);
  for (int v : candidates) {
    auto it = g.adj.at(v).begin();
    int a = *it++;
    int b = *it;
    if (a > b) std::swap(a, b);
    if (!g.has_edge(a, b)) continue;
    EdgeGraph rest = g;
    rest.remove_vertex(v);
    for (auto anchor : {std::pair{a, b}, std::pair{b, a}}) {
      stack.push_back({v, anchor});
      enumerate_impl(rest, stack, out, limit);
      stack.pop_back();
      if (limit > 0 && out.size() >= limit) return;
    }
  }
}

}  // namespace

TriangulatedLamanGraph TriangulatedLamanGraph::build_from_henneberg(
    int n, const std::vector<HennebergStep>& steps) {
  if (n < 2) raise(errc::invalid_argument, "graph needs at least two vertices");
  if (static_cast<int>(steps.size()) != n - 2)
    raise(errc::wrong_step_count,
          "expected " + std::to_string(n - 2) + " steps, got " +
              std::to_string(steps.size()));

  TriangulatedLamanGraph g;
  g.n_ = n;

  auto check_label = [n](int v) {
    if (v < 1 || v > n)
      raise(errc::bad_vertex_label,
            "vertex id " + std::to_string(v) + " outside 1.." + std::to_string(n));
  };

  std::set<int> present;
  std::set<Edge> edge_set;
  if (n == 2) {
    g.base_ = {1, 2};
    present = {1, 2};
    edge_set.insert({1, 2});
  } else {
    const auto& [a, b] = steps.front().anchor;
    check_label(a);
    check_label(b);
    if (a == b) raise(errc::bad_vertex_label, "degenerate base edge");
    g.base_ = make_edge(a, b);
    present = {a, b};
    edge_set.insert(g.base_);
  }

  for (const HennebergStep& s : steps) {
    check_label(s.new_vertex);
    check_label(s.anchor.first);
    check_label(s.anchor.second);
    if (present.count(s.new_vertex))
      raise(errc::duplicate_vertex,
            "vertex " + std::to_string(s.new_vertex) + " added twice");
    if (!edge_set.count(make_edge(s.anchor.first, s.anchor.second)))
      raise(errc::anchor_not_edge,
            "anchor " + edge_str(s.anchor.first, s.anchor.second) +
                " is not an existing edge");
    present.insert(s.new_vertex);
    edge_set.insert(make_edge(s.new_vertex, s.anchor.first));
    edge_set.insert(make_edge(s.new_vertex, s.anchor.second));
  }
  if (static_cast<int>(present.size()) != n)
    raise(errc::bad_vertex_label, "witness does not cover vertices 1..n");

  g.edges_.assign(edge_set.begin(), edge_set.end());
  g.sequence_ = steps;
  g.finalize();
  return g;
}

TriangulatedLamanGraph TriangulatedLamanGraph::from_edge_set(
    int n, std::vector<Edge> edges) {
  if (n < 2) raise(errc::invalid_argument, "graph needs at least two vertices");
  for (Edge& e : edges) {
    e = make_edge(e.first, e.second);
    if (e.first < 1 || e.second > n || e.first == e.second)
      raise(errc::bad_vertex_label, "edge endpoint outside 1..n");
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (static_cast<int>(edges.size()) != 2 * n - 3)
    raise(errc::not_triangulated_laman,
          "edge count " + std::to_string(edges.size()) + " != 2n-3");
  EdgeGraph eg = EdgeGraph::from(edges);
  if (static_cast<int>(eg.vertex_count()) != n)
    raise(errc::not_triangulated_laman, "isolated vertices present");
  auto witness = find_witness(eg);
  if (!witness)
    raise(errc::not_triangulated_laman, "no Henneberg peel order exists");

  TriangulatedLamanGraph g;
  g.n_ = n;
  g.edges_ = std::move(edges);
  g.sequence_ = std::move(*witness);
  g.base_ = n == 2 ? Edge{1, 2}
                   : make_edge(g.sequence_.front().anchor.first,
                               g.sequence_.front().anchor.second);
  g.finalize();
  return g;
}

void TriangulatedLamanGraph::finalize() {
  std::sort(edges_.begin(), edges_.end());
  adjacency_.assign(static_cast<std::size_t>(n_) + 1, {});
  for (const Edge& e : edges_) {
    adjacency_[static_cast<std::size_t>(e.first)].push_back(e.second);
    adjacency_[static_cast<std::size_t>(e.second)].push_back(e.first);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());

  cycles3_.clear();
  for (const Edge& e : edges_) {
    const auto& ni = adjacency_[static_cast<std::size_t>(e.first)];
    for (int k : ni) {
      if (k <= e.second) continue;
      if (has_edge(e.second, k)) cycles3_.push_back({e.first, e.second, k});
    }
  }
  std::sort(cycles3_.begin(), cycles3_.end());
}

bool TriangulatedLamanGraph::has_edge(int i, int j) const {
  return std::binary_search(edges_.begin(), edges_.end(), make_edge(i, j));
}

int TriangulatedLamanGraph::edge_index(int i, int j) const {
  auto it = std::lower_bound(edges_.begin(), edges_.end(), make_edge(i, j));
  if (it == edges_.end() || *it != make_edge(i, j))
    raise(errc::invalid_argument, "no such edge " + edge_str(i, j));
  return static_cast<int>(it - edges_.begin());
}

const std::vector<int>& TriangulatedLamanGraph::neighbors(int v) const {
  if (v < 1 || v > n_)
    raise(errc::bad_vertex_label, "vertex id out of range");
  return adjacency_[static_cast<std::size_t>(v)];
}

std::vector<std::vector<HennebergStep>> enumerate_henneberg_sequences(
    const TriangulatedLamanGraph& g, std::size_t limit) {
  if (g.vertex_count() > 8 && limit == 0)
    raise(errc::too_large,
          "exhaustive enumeration capped at n <= 8; pass a limit");
  EdgeGraph eg = EdgeGraph::from(g.edges());
  std::vector<std::vector<HennebergStep>> out;
  std::vector<HennebergStep> stack;
  enumerate_impl(eg, stack, out, limit);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(
        a.begin(), a.end(), b.begin(), b.end(),
        [](const HennebergStep& x, const HennebergStep& y) {
          return std::tie(x.new_vertex, x.anchor) <
                 std::tie(y.new_vertex, y.anchor);
        });
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<HennebergStep> leading_subgraph_sequence(
    const TriangulatedLamanGraph& g, const std::vector<Edge>& sub_edges) {
  std::vector<Edge> sub;
  sub.reserve(sub_edges.size());
  for (const Edge& e : sub_edges) {
    Edge ne = make_edge(e.first, e.second);
    if (!g.has_edge(ne.first, ne.second))
      raise(errc::not_subgraph,
            "edge " + edge_str(ne.first, ne.second) + " not in graph");
    sub.push_back(ne);
  }
  std::sort(sub.begin(), sub.end());
  sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
  if (sub.empty()) raise(errc::not_subgraph, "empty subgraph");
  if (!is_triangulated_laman(sub))
    raise(errc::not_triangulated_laman, "subgraph is not triangulated Laman");
  return leading_sequence_impl(EdgeGraph::from(g.edges()), std::move(sub));
}

}  // namespace formation
