#include "formation/partition.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "formation/errors.hpp"

namespace formation {
namespace {

const Eigen::Vector2d& point_of(const Configuration& p, int v) {
  return p.points[static_cast<std::size_t>(v - 1)];
}

struct WalkStep {
  int vertex;        // global id of the vertex placed by this step
  int anchor_a;      // global ids of the anchors
  int anchor_b;
  bool is_aligned;   // case decision frozen at the base configuration
  double c_a = 0.0;  // affine coefficients for the aligned case
  double c_b = 0.0;
};

/// Steps of a leading sequence for part i beyond the part itself, with the
/// aligned/nondegenerate case decision and affine coefficients frozen at p.
std::vector<WalkStep> build_walk(const TriangulatedLamanGraph& g,
                                 const Configuration& p,
                                 const PartFramework& part, double align_tol) {
  const auto steps = leading_subgraph_sequence(g, part.edges_global);
  const std::size_t skip = part.vertices_global.size() - 2;
  std::vector<WalkStep> walk;
  walk.reserve(steps.size() - skip);
  for (std::size_t s = skip; s < steps.size(); ++s) {
    WalkStep w;
    w.vertex = steps[s].new_vertex;
    w.anchor_a = steps[s].anchor.first;
    w.anchor_b = steps[s].anchor.second;
    const Eigen::Vector2d& xa = point_of(p, w.anchor_a);
    const Eigen::Vector2d& xb = point_of(p, w.anchor_b);
    const Eigen::Vector2d& xk = point_of(p, w.vertex);
    w.is_aligned = aligned(xa, xb, xk, align_tol);
    if (w.is_aligned) {
      const double len2 = (xb - xa).squaredNorm();
      w.c_a = (xb - xk).dot(xb - xa) / len2;
      w.c_b = (xa - xk).dot(xa - xb) / len2;
    }
    walk.push_back(w);
  }
  return walk;
}

void check_part_index(const IndependentPartition& partition, int i) {
  if (i < 0 || i >= partition.size())
    raise(errc::part_index_out_of_range,
          "part index " + std::to_string(i) + " out of range");
}

}  // namespace

int PartFramework::local_index(int global_vertex) const {
  auto it = std::lower_bound(vertices_global.begin(), vertices_global.end(),
                             global_vertex);
  if (it == vertices_global.end() || *it != global_vertex)
    raise(errc::invalid_argument, "vertex not in part");
  return static_cast<int>(it - vertices_global.begin()) + 1;
}

int IndependentPartition::singleton_count() const {
  int k = 0;
  for (const auto& part : parts)
    if (part.edges_global.size() == 1) ++k;
  return k;
}

int IndependentPartition::part_of(const Edge& e) const {
  const Edge key = make_edge(e.first, e.second);
  for (int i = 0; i < size(); ++i) {
    const auto& es = parts[static_cast<std::size_t>(i)].edges_global;
    if (std::binary_search(es.begin(), es.end(), key)) return i;
  }
  raise(errc::invalid_argument, "edge not covered by partition");
}

IndependentPartition independent_partition(const TriangulatedLamanGraph& g,
                                           const Configuration& p,
                                           double align_tol) {
  if (p.size() != g.vertex_count())
    raise(errc::dimension_mismatch, "independent_partition: wrong point count");

  std::vector<std::vector<Edge>> blocks;
  std::map<Edge, int> block_of;
  auto put = [&](const Edge& e, int b) {
    blocks[static_cast<std::size_t>(b)].push_back(e);
    block_of[e] = b;
  };

  blocks.emplace_back();
  put(g.base_edge(), 0);

  for (const HennebergStep& s : g.sequence()) {
    const int k = s.new_vertex;
    const int i = s.anchor.first;
    const int j = s.anchor.second;
    if (aligned(point_of(p, i), point_of(p, j), point_of(p, k), align_tol)) {
      const int b = block_of.at(make_edge(i, j));
      put(make_edge(i, k), b);
      put(make_edge(j, k), b);
    } else {
      blocks.emplace_back();
      put(make_edge(i, k), static_cast<int>(blocks.size()) - 1);
      blocks.emplace_back();
      put(make_edge(j, k), static_cast<int>(blocks.size()) - 1);
    }
  }

  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  IndependentPartition out;
  out.parts.reserve(blocks.size());
  for (auto& b : blocks) {
    PartFramework part;
    std::set<int> vs;
    for (const Edge& e : b) {
      vs.insert(e.first);
      vs.insert(e.second);
    }
    part.vertices_global.assign(vs.begin(), vs.end());
    part.edges_global = std::move(b);

    std::vector<Edge> local;
    local.reserve(part.edges_global.size());
    auto local_id = [&part](int v) {
      return static_cast<int>(std::lower_bound(part.vertices_global.begin(),
                                               part.vertices_global.end(), v) -
                              part.vertices_global.begin()) +
             1;
    };
    for (const Edge& e : part.edges_global)
      local.push_back(make_edge(local_id(e.first), local_id(e.second)));
    part.subgraph = TriangulatedLamanGraph::from_edge_set(
        static_cast<int>(part.vertices_global.size()), std::move(local));
    part.subconfig = restrict_to(p, part.vertices_global);
    out.parts.push_back(std::move(part));
  }
  return out;
}

bool partition_is_coarsest(const TriangulatedLamanGraph& g,
                           const Configuration& p,
                           const IndependentPartition& candidate,
                           double align_tol) {
  if (g.vertex_count() > 7)
    raise(errc::too_large, "brute-force coarseness check capped at n <= 7");
  if (p.size() != g.vertex_count())
    raise(errc::dimension_mismatch, "partition_is_coarsest: wrong point count");

  const auto& es = g.edges();
  const int m = static_cast<int>(es.size());

  // Validity of every edge subset as a block, memoized by bitmask.
  const std::uint32_t full = m >= 32 ? 0xFFFFFFFFu : ((1u << m) - 1u);
  std::vector<std::int8_t> block_ok(static_cast<std::size_t>(full) + 1, -1);
  auto vertices_collinear = [&](std::uint32_t mask) {
    std::set<int> vs;
    for (int e = 0; e < m; ++e)
      if (mask & (1u << e)) {
        vs.insert(es[static_cast<std::size_t>(e)].first);
        vs.insert(es[static_cast<std::size_t>(e)].second);
      }
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(vs.size());
    for (int v : vs) pts.push_back(point_of(p, v));
    return collinear(pts, align_tol);
  };
  auto valid_block = [&](std::uint32_t mask) -> bool {
    std::int8_t& memo = block_ok[mask];
    if (memo >= 0) return memo != 0;
    std::vector<Edge> sub;
    std::set<int> vs;
    for (int e = 0; e < m; ++e)
      if (mask & (1u << e)) {
        sub.push_back(es[static_cast<std::size_t>(e)]);
        vs.insert(sub.back().first);
        vs.insert(sub.back().second);
      }
    bool ok = sub.size() == 2 * vs.size() - 3 && vertices_collinear(mask);
    if (ok && sub.size() > 1) {
      // Relabel and try to peel.
      std::vector<int> verts(vs.begin(), vs.end());
      std::vector<Edge> local;
      for (const Edge& e : sub) {
        auto li = [&](int v) {
          return static_cast<int>(std::lower_bound(verts.begin(), verts.end(), v) -
                                  verts.begin()) +
                 1;
        };
        local.push_back(make_edge(li(e.first), li(e.second)));
      }
      try {
        TriangulatedLamanGraph::from_edge_set(static_cast<int>(verts.size()),
                                              std::move(local));
      } catch (const Error&) {
        ok = false;
      }
    }
    memo = ok ? 1 : 0;
    return ok;
  };

  std::vector<std::uint32_t> candidate_masks;
  for (const auto& part : candidate.parts) {
    std::uint32_t mask = 0;
    for (const Edge& e : part.edges_global)
      mask |= 1u << g.edge_index(e.first, e.second);
    candidate_masks.push_back(mask);
  }

  // Enumerate all set partitions of the edges; a block is pruned as soon as
  // its vertex set stops being collinear (alignment is monotone under edge
  // insertion). Every complete valid partition must refine the candidate.
  std::vector<std::uint32_t> stack;
  bool coarsest = true;
  auto rec = [&](auto&& self, int e) -> void {
    if (!coarsest) return;
    if (e == m) {
      for (std::uint32_t b : stack)
        if (!valid_block(b)) return;
      for (std::uint32_t b : stack) {
        bool contained = false;
        for (std::uint32_t c : candidate_masks)
          if ((b & ~c) == 0) {
            contained = true;
            break;
          }
        if (!contained) {
          coarsest = false;
          return;
        }
      }
      return;
    }
    const std::uint32_t bit = 1u << e;
    for (std::size_t b = 0; b < stack.size(); ++b) {
      const std::uint32_t grown = stack[b] | bit;
      if (!vertices_collinear(grown)) continue;
      const std::uint32_t saved = stack[b];
      stack[b] = grown;
      self(self, e + 1);
      stack[b] = saved;
      if (!coarsest) return;
    }
    stack.push_back(bit);
    self(self, e + 1);
    stack.pop_back();
  };
  rec(rec, 0);
  return coarsest;
}

Configuration eta_map(const TriangulatedLamanGraph& g, const Configuration& p,
                      const IndependentPartition& partition, int part_index,
                      const Configuration& part_points_perturbed,
                      double align_tol, const EtaSettings& settings) {
  check_part_index(partition, part_index);
  const PartFramework& part = partition.parts[static_cast<std::size_t>(part_index)];
  if (part_points_perturbed.size() !=
      static_cast<int>(part.vertices_global.size()))
    raise(errc::dimension_mismatch, "eta_map: wrong perturbation size");
  if (p.size() != g.vertex_count())
    raise(errc::dimension_mismatch, "eta_map: wrong point count");

  if (part_points_perturbed == part.subconfig) return p;  // identity anchor

  Configuration q = p;
  for (std::size_t t = 0; t < part.vertices_global.size(); ++t)
    q.points[static_cast<std::size_t>(part.vertices_global[t] - 1)] =
        part_points_perturbed.points[t];
  if (static_cast<int>(part.vertices_global.size()) == g.vertex_count())
    return q;  // the part covers everything; nothing to re-place

  for (const WalkStep& w : build_walk(g, p, part, align_tol)) {
    const Eigen::Vector2d& ya = point_of(q, w.anchor_a);
    const Eigen::Vector2d& yb = point_of(q, w.anchor_b);
    Eigen::Vector2d& yk = q.points[static_cast<std::size_t>(w.vertex - 1)];
    if (w.is_aligned) {
      yk = w.c_a * ya + w.c_b * yb;
      continue;
    }
    const double ra = (point_of(p, w.vertex) - point_of(p, w.anchor_a)).norm();
    const double rb = (point_of(p, w.vertex) - point_of(p, w.anchor_b)).norm();
    const double trust = settings.trust_fraction * std::min(ra, rb);
    // Start from the original position shifted by the mean anchor motion.
    Eigen::Vector2d y = point_of(p, w.vertex) +
                        0.5 * ((ya - point_of(p, w.anchor_a)) +
                               (yb - point_of(p, w.anchor_b)));
    bool converged = false;
    for (int it = 0; it < settings.max_iterations; ++it) {
      const Eigen::Vector2d da = y - ya;
      const Eigen::Vector2d db = y - yb;
      Eigen::Vector2d F(0.5 * (da.squaredNorm() - ra * ra),
                        0.5 * (db.squaredNorm() - rb * rb));
      const double scale = std::max(1.0, std::max(ra * ra, rb * rb));
      if (F.cwiseAbs().maxCoeff() <= settings.residual_tol * scale) {
        converged = true;
        break;
      }
      Eigen::Matrix2d J;
      J.row(0) = da.transpose();
      J.row(1) = db.transpose();
      const double det = J.determinant();
      if (std::abs(det) <= 1e-14 * std::max(1.0, da.norm() * db.norm()))
        raise(errc::newton_diverged,
              "perturbation solve hit a degenerate anchor triangle");
      Eigen::Vector2d step = -J.inverse() * F;
      if (step.norm() > trust) step *= trust / step.norm();
      y += step;
    }
    if (!converged)
      raise(errc::newton_diverged,
            "perturbation too large for vertex " + std::to_string(w.vertex));
    yk = y;
  }
  return q;
}

Eigen::MatrixXd eta_derivative(const TriangulatedLamanGraph& g,
                               const Configuration& p,
                               const IndependentPartition& partition,
                               int part_index, double align_tol) {
  check_part_index(partition, part_index);
  const PartFramework& part = partition.parts[static_cast<std::size_t>(part_index)];
  if (p.size() != g.vertex_count())
    raise(errc::dimension_mismatch, "eta_derivative: wrong point count");

  const int n = g.vertex_count();
  const int cols = 2 * static_cast<int>(part.vertices_global.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2 * n, cols);

  // Identity rows for the part's own vertices.
  for (std::size_t t = 0; t < part.vertices_global.size(); ++t) {
    const int row = 2 * (part.vertices_global[t] - 1);
    D(row, 2 * static_cast<int>(t)) = 1.0;
    D(row + 1, 2 * static_cast<int>(t) + 1) = 1.0;
  }
  if (static_cast<int>(part.vertices_global.size()) == n) return D;

  for (const WalkStep& w : build_walk(g, p, part, align_tol)) {
    const auto row_of = [](int v) { return 2 * (v - 1); };
    const auto Da = D.middleRows(row_of(w.anchor_a), 2);
    const auto Db = D.middleRows(row_of(w.anchor_b), 2);
    if (w.is_aligned) {
      D.middleRows(row_of(w.vertex), 2) = w.c_a * Da + w.c_b * Db;
      continue;
    }
    const Eigen::Vector2d da = point_of(p, w.vertex) - point_of(p, w.anchor_a);
    const Eigen::Vector2d db = point_of(p, w.vertex) - point_of(p, w.anchor_b);
    Eigen::Matrix2d J;
    J.row(0) = da.transpose();
    J.row(1) = db.transpose();
    Eigen::MatrixXd rhs(2, cols);
    rhs.row(0) = da.transpose() * Da;
    rhs.row(1) = db.transpose() * Db;
    D.middleRows(row_of(w.vertex), 2) = J.inverse() * rhs;
  }
  return D;
}

}  // namespace formation
