#include "doctest.h"

#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"

#include "formation/errors.hpp"
#include "formation/graph.hpp"

using namespace formation;

namespace {

std::set<Edge> edge_set(const TriangulatedLamanGraph& g) {
  return {g.edges().begin(), g.edges().end()};
}

}  // namespace

TEST_CASE("K3 from a single step") {
  const auto g = fixtures::k3();
  CHECK(g.vertex_count() == 3);
  CHECK(edge_set(g) == std::set<Edge>{{1, 2}, {1, 3}, {2, 3}});
  CHECK(g.cycles3().size() == 1);
  CHECK(g.cycles3().front() == std::array<int, 3>{1, 2, 3});
}

TEST_CASE("five-vertex figure graph") {
  const auto g = fixtures::five_vertex();
  CHECK(g.edges().size() == 7);
  CHECK(edge_set(g) == std::set<Edge>{{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 4}, {3, 5}, {4, 5}});
}

TEST_CASE("edge count identity |E| = 2n - 3") {
  const auto g = TriangulatedLamanGraph::build_from_henneberg(
      4, {{3, {1, 2}}, {4, {1, 3}}});
  CHECK(g.edges().size() == 5);
  for (int n : {3, 5, 8}) {
    const auto s = fixtures::strip(n);
    CHECK(static_cast<int>(s.edges().size()) == 2 * n - 3);
  }
}

TEST_CASE("degree-2 vertex always exists") {
  for (int n : {3, 4, 6, 8}) {
    const auto g = fixtures::strip(n);
    bool found = false;
    for (int v = 1; v <= n; ++v)
      if (g.degree(v) == 2) found = true;
    CHECK(found);
  }
}

TEST_CASE("witness validation errors") {
  CHECK_THROWS_WITH_AS(TriangulatedLamanGraph::build_from_henneberg(
                           4, {{3, {1, 2}}, {4, {1, 4}}}),
                       doctest::Contains("anchor"), Error);
  try {
    TriangulatedLamanGraph::build_from_henneberg(4, {{3, {1, 2}}, {4, {2, 4}}});
    FAIL("expected anchor_not_edge");
  } catch (const Error& e) {
    CHECK(e.code() == errc::anchor_not_edge);
  }

  try {
    TriangulatedLamanGraph::build_from_henneberg(4, {{3, {1, 2}}, {3, {1, 3}}});
    FAIL("expected duplicate_vertex");
  } catch (const Error& e) {
    CHECK(e.code() == errc::duplicate_vertex);
  }

  try {
    TriangulatedLamanGraph::build_from_henneberg(5, {{3, {1, 2}}});
    FAIL("expected wrong_step_count");
  } catch (const Error& e) {
    CHECK(e.code() == errc::wrong_step_count);
  }

  try {
    TriangulatedLamanGraph::build_from_henneberg(4, {{3, {1, 2}}, {7, {1, 3}}});
    FAIL("expected bad_vertex_label");
  } catch (const Error& e) {
    CHECK(e.code() == errc::bad_vertex_label);
  }
}

TEST_CASE("replay determinism") {
  const std::vector<HennebergStep> steps = {{3, {1, 2}}, {4, {2, 3}}, {5, {3, 4}}};
  const auto a = TriangulatedLamanGraph::build_from_henneberg(5, steps);
  const auto b = TriangulatedLamanGraph::build_from_henneberg(5, steps);
  CHECK(a == b);
}

TEST_CASE("sequence enumeration matches brute force") {
  SUBCASE("single edge has exactly one (empty) sequence") {
    const auto g = TriangulatedLamanGraph::build_from_henneberg(2, {});
    const auto seqs = enumerate_henneberg_sequences(g);
    REQUIRE(seqs.size() == 1);
    CHECK(seqs.front().empty());
  }

  SUBCASE("K3 has six sequences") {
    const auto g = fixtures::k3();
    const auto seqs = enumerate_henneberg_sequences(g);
    CHECK(seqs.size() == 6);
    CHECK(seqs == oracles::brute_force_sequences(g));
  }

  SUBCASE("five-vertex graph matches the exhaustive search") {
    const auto g = fixtures::five_vertex();
    const auto seqs = enumerate_henneberg_sequences(g);
    const auto expected = oracles::brute_force_sequences(g);
    CHECK(seqs.size() == expected.size());
    CHECK(seqs == expected);
  }
}

TEST_CASE("every enumerated sequence replays to the same graph") {
  for (const auto& g : {fixtures::k3(), fixtures::five_vertex(), fixtures::strip(6)}) {
    for (const auto& steps : enumerate_henneberg_sequences(g)) {
      const auto replayed =
          TriangulatedLamanGraph::build_from_henneberg(g.vertex_count(), steps);
      CHECK(edge_set(replayed) == edge_set(g));
    }
  }
}

TEST_CASE("enumeration guard and limit") {
  const auto g = fixtures::strip(9);
  CHECK_THROWS_AS(enumerate_henneberg_sequences(g), Error);
  const auto some = enumerate_henneberg_sequences(g, 10);
  CHECK(some.size() == 10);
}

TEST_CASE("leading subgraph sequences") {
  const auto g = fixtures::five_vertex();

  SUBCASE("triangle 3,4,5 leads") {
    const std::vector<Edge> tri = {{3, 4}, {3, 5}, {4, 5}};
    const auto steps = leading_subgraph_sequence(g, tri);
    const auto replayed = TriangulatedLamanGraph::build_from_henneberg(5, steps);
    CHECK(edge_set(replayed) == edge_set(g));

    // First three appearing vertices must be exactly {3,4,5}.
    std::set<int> lead = {replayed.base_edge().first, replayed.base_edge().second,
                          steps.front().new_vertex};
    CHECK(lead == std::set<int>{3, 4, 5});
  }

  SUBCASE("two-vertex subgraph: base edge (2,3) of K3") {
    const auto k3 = fixtures::k3();
    const auto steps = leading_subgraph_sequence(k3, {{2, 3}});
    REQUIRE(steps.size() == 1);
    CHECK(steps.front().new_vertex == 1);
    CHECK(make_edge(steps.front().anchor.first, steps.front().anchor.second) ==
          Edge{2, 3});
  }

  SUBCASE("sub equals g") {
    const auto k3 = fixtures::k3();
    const auto steps = leading_subgraph_sequence(
        k3, std::vector<Edge>{{1, 2}, {1, 3}, {2, 3}});
    const auto replayed = TriangulatedLamanGraph::build_from_henneberg(3, steps);
    CHECK(edge_set(replayed) == edge_set(k3));
  }

  SUBCASE("errors") {
    try {
      leading_subgraph_sequence(g, {{1, 5}});
      FAIL("expected not_subgraph");
    } catch (const Error& e) {
      CHECK(e.code() == errc::not_subgraph);
    }
    try {
      leading_subgraph_sequence(g, {{1, 2}, {3, 4}});  // disconnected pair
      FAIL("expected not_triangulated_laman");
    } catch (const Error& e) {
      CHECK(e.code() == errc::not_triangulated_laman);
    }
  }

  SUBCASE("property: leading vertices induce the subgraph") {
    // Every triangle of the graph works as a leading subgraph.
    for (const auto& tri : g.cycles3()) {
      const std::vector<Edge> sub = {make_edge(tri[0], tri[1]),
                                     make_edge(tri[0], tri[2]),
                                     make_edge(tri[1], tri[2])};
      const auto steps = leading_subgraph_sequence(g, sub);
      const auto replayed = TriangulatedLamanGraph::build_from_henneberg(5, steps);
      CHECK(edge_set(replayed) == edge_set(g));
      std::set<int> lead = {replayed.base_edge().first,
                            replayed.base_edge().second,
                            steps.front().new_vertex};
      CHECK(lead == std::set<int>{tri[0], tri[1], tri[2]});
      // Edges among the first three vertices are exactly the triangle.
      std::set<Edge> induced;
      for (const Edge& e : g.edges())
        if (lead.count(e.first) && lead.count(e.second)) induced.insert(e);
      CHECK(induced == std::set<Edge>(sub.begin(), sub.end()));
    }
  }
}

TEST_CASE("leading property holds for randomly grown subgraphs") {
  // Grow random triangulated-Laman subgraphs inside each graph and check the
  // reordered witness puts them first.
  std::mt19937_64 rng(2718);
  for (int n : {5, 6, 7}) {
    const auto g = fixtures::strip(n);
    for (int rep = 0; rep < 30; ++rep) {
      // Random subgraph: start from a random edge, then vertex-add inside g.
      std::set<Edge> sub_edges;
      std::set<int> sub_vertices;
      const Edge seed_edge =
          g.edges()[rng() % g.edges().size()];
      sub_edges.insert(seed_edge);
      sub_vertices = {seed_edge.first, seed_edge.second};
      const int grow_steps = static_cast<int>(rng() % static_cast<std::size_t>(n));
      for (int s = 0; s < grow_steps; ++s) {
        std::vector<std::pair<int, Edge>> candidates;
        for (int v = 1; v <= n; ++v) {
          if (sub_vertices.count(v)) continue;
          for (const Edge& e : sub_edges)
            if (g.has_edge(v, e.first) && g.has_edge(v, e.second))
              candidates.emplace_back(v, e);
        }
        if (candidates.empty()) break;
        const auto& [v, anchor] = candidates[rng() % candidates.size()];
        sub_vertices.insert(v);
        sub_edges.insert(make_edge(v, anchor.first));
        sub_edges.insert(make_edge(v, anchor.second));
      }

      const std::vector<Edge> sub(sub_edges.begin(), sub_edges.end());
      const auto steps = leading_subgraph_sequence(g, sub);
      const auto replayed =
          TriangulatedLamanGraph::build_from_henneberg(n, steps);
      CHECK(edge_set(replayed) == edge_set(g));

      // Appearance order: base then step vertices; the first |V(sub)| must
      // be exactly the subgraph's vertex set, inducing exactly its edges.
      std::vector<int> order = {replayed.base_edge().first,
                                replayed.base_edge().second};
      for (const auto& s : steps) order.push_back(s.new_vertex);
      const std::set<int> lead(order.begin(),
                               order.begin() + static_cast<std::ptrdiff_t>(
                                                   sub_vertices.size()));
      CHECK(lead == sub_vertices);
      std::set<Edge> induced;
      for (const Edge& e : g.edges())
        if (lead.count(e.first) && lead.count(e.second)) induced.insert(e);
      CHECK(induced == sub_edges);
    }
  }
}

TEST_CASE("from_edge_set reconstructs a witness") {
  const auto g = fixtures::five_vertex();
  auto rebuilt = TriangulatedLamanGraph::from_edge_set(5, g.edges());
  CHECK(edge_set(rebuilt) == edge_set(g));
  const auto replayed = TriangulatedLamanGraph::build_from_henneberg(
      5, rebuilt.sequence());
  CHECK(edge_set(replayed) == edge_set(g));

  try {
    TriangulatedLamanGraph::from_edge_set(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}, {1, 3}});
    // K4 minus (2,4) is fine; use a genuinely bad set below.
  } catch (const Error&) {
    FAIL("K4 minus an edge is triangulated Laman");
  }
  try {
    // 4-cycle plus a chord count mismatch: 4 edges != 2*4-3.
    TriangulatedLamanGraph::from_edge_set(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}});
    FAIL("expected not_triangulated_laman");
  } catch (const Error& e) {
    CHECK(e.code() == errc::not_triangulated_laman);
  }
}
