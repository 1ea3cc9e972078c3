#include "formation/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "formation/errors.hpp"

namespace formation {
namespace {

void require_size(const Configuration& p, int n, const char* where) {
  if (p.size() != n)
    raise(errc::dimension_mismatch,
          std::string(where) + ": configuration has " + std::to_string(p.size()) +
              " points, expected " + std::to_string(n));
}

}  // namespace

Eigen::VectorXd flatten(const Configuration& p) {
  Eigen::VectorXd x(2 * p.size());
  for (int i = 0; i < p.size(); ++i) x.segment<2>(2 * i) = p.points[static_cast<std::size_t>(i)];
  return x;
}

Configuration unflatten(const Eigen::VectorXd& x) {
  Configuration p;
  p.points.resize(static_cast<std::size_t>(x.size() / 2));
  for (std::size_t i = 0; i < p.points.size(); ++i)
    p.points[i] = x.segment<2>(2 * static_cast<int>(i));
  return p;
}

Configuration restrict_to(const Configuration& p, const std::vector<int>& vertices) {
  Configuration q;
  q.points.reserve(vertices.size());
  for (int v : vertices) {
    if (v < 1 || v > p.size())
      raise(errc::dimension_mismatch, "restriction vertex out of range");
    q.points.push_back(p.points[static_cast<std::size_t>(v - 1)]);
  }
  return q;
}

RigidMotion RigidMotion::from_angle(double theta, const Eigen::Vector2d& t) {
  RigidMotion g;
  g.rotation << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  g.translation = t;
  return g;
}

RigidMotion compose(const RigidMotion& g2, const RigidMotion& g1) {
  RigidMotion g;
  g.rotation = g2.rotation * g1.rotation;
  g.translation = g2.rotation * g1.translation + g2.translation;
  return g;
}

Configuration apply_motion(const RigidMotion& gamma, const Configuration& p) {
  Configuration q;
  q.points.reserve(p.points.size());
  for (const auto& x : p.points) q.points.push_back(gamma.rotation * x + gamma.translation);
  return q;
}

Eigen::VectorXd distance_map(const TriangulatedLamanGraph& g, const Configuration& p) {
  require_size(p, g.vertex_count(), "distance_map");
  const auto& es = g.edges();
  Eigen::VectorXd rho(static_cast<int>(es.size()));
  for (std::size_t e = 0; e < es.size(); ++e) {
    const Eigen::Vector2d d = p.points[static_cast<std::size_t>(es[e].first - 1)] -
                              p.points[static_cast<std::size_t>(es[e].second - 1)];
    rho[static_cast<int>(e)] = d.squaredNorm();
  }
  return rho;
}

Eigen::VectorXd edge_lengths(const TriangulatedLamanGraph& g, const Configuration& p) {
  return distance_map(g, p).cwiseSqrt();
}

Eigen::MatrixXd distance_map_jacobian(const TriangulatedLamanGraph& g,
                                      const Configuration& p) {
  require_size(p, g.vertex_count(), "distance_map_jacobian");
  const auto& es = g.edges();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<int>(es.size()), 2 * p.size());
  for (std::size_t e = 0; e < es.size(); ++e) {
    const int i = es[e].first - 1;
    const int j = es[e].second - 1;
    const Eigen::Vector2d d =
        p.points[static_cast<std::size_t>(i)] - p.points[static_cast<std::size_t>(j)];
    J.block<1, 2>(static_cast<int>(e), 2 * i) = 2.0 * d.transpose();
    J.block<1, 2>(static_cast<int>(e), 2 * j) = -2.0 * d.transpose();
  }
  return J;
}

Eigen::MatrixXd orbit_tangent_basis(const Configuration& p) {
  if (p.size() == 0) raise(errc::dimension_mismatch, "empty configuration");
  const int n = p.size();
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));

  Eigen::MatrixXd basis(2 * n, 3);
  for (int i = 0; i < n; ++i) {
    basis(2 * i, 0) = inv;
    basis(2 * i + 1, 0) = 0.0;
    basis(2 * i, 1) = 0.0;
    basis(2 * i + 1, 1) = inv;
    // rotation generator J x_i with J the quarter-turn
    basis(2 * i, 2) = -p.points[static_cast<std::size_t>(i)].y();
    basis(2 * i + 1, 2) = p.points[static_cast<std::size_t>(i)].x();
  }

  const double gen_norm = basis.col(2).norm();
  basis.col(2) -= basis.col(0) * basis.col(0).dot(basis.col(2));
  basis.col(2) -= basis.col(1) * basis.col(1).dot(basis.col(2));
  const double residual = basis.col(2).norm();
  if (residual <= 1e-12 * std::max(1.0, gen_norm))
    raise(errc::degenerate_rotation,
          "rotation generator lies in the translation span");
  basis.col(2) /= residual;
  return basis;
}

double orbit_distance(const Configuration& p, const Configuration& q) {
  if (p.size() != q.size())
    raise(errc::dimension_mismatch, "orbit_distance: unequal sizes");
  const int n = p.size();
  Eigen::Vector2d cp = Eigen::Vector2d::Zero();
  Eigen::Vector2d cq = Eigen::Vector2d::Zero();
  for (const auto& x : p.points) cp += x;
  for (const auto& x : q.points) cq += x;
  cp /= n;
  cq /= n;

  double dot = 0.0, cross = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d a = p.points[static_cast<std::size_t>(i)] - cp;
    const Eigen::Vector2d b = q.points[static_cast<std::size_t>(i)] - cq;
    dot += a.dot(b);
    cross += a.x() * b.y() - a.y() * b.x();
  }
  // Optimal proper rotation maximizes cos(t)*dot + sin(t)*cross.
  const double theta = std::atan2(cross, dot);
  const RigidMotion rot = RigidMotion::from_angle(theta);

  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d a = p.points[static_cast<std::size_t>(i)] - cp;
    const Eigen::Vector2d b = q.points[static_cast<std::size_t>(i)] - cq;
    ss += (rot.rotation * a - b).squaredNorm();
  }
  return std::sqrt(ss / n);
}

bool same_orbit(const Configuration& p, const Configuration& q, double tol) {
  return orbit_distance(p, q) <= tol;
}

bool aligned(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
             const Eigen::Vector2d& c, double align_tol) {
  const Eigen::Vector2d u = b - a;
  const Eigen::Vector2d v = c - a;
  const double cross = u.x() * v.y() - u.y() * v.x();
  return std::abs(cross) <= align_tol * u.norm() * v.norm();
}

bool collinear(const std::vector<Eigen::Vector2d>& pts, double align_tol) {
  if (pts.size() <= 2) return true;
  // Anchor the test on the farthest pair so near-coincident points cannot
  // fake alignment.
  std::size_t ia = 0, ib = 1;
  double best = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = (pts[i] - pts[j]).squaredNorm();
      if (d > best) {
        best = d;
        ia = i;
        ib = j;
      }
    }
  if (best == 0.0) return true;  // all coincident
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k == ia || k == ib) continue;
    if (!aligned(pts[ia], pts[ib], pts[k], align_tol)) return false;
  }
  return true;
}

FrameworkPredicates framework_predicates(const TriangulatedLamanGraph& g,
                                         const Configuration& p,
                                         double align_tol) {
  require_size(p, g.vertex_count(), "framework_predicates");
  FrameworkPredicates out;

  out.strongly_rigid = true;
  for (const auto& tri : g.cycles3()) {
    if (aligned(p.points[static_cast<std::size_t>(tri[0] - 1)],
                p.points[static_cast<std::size_t>(tri[1] - 1)],
                p.points[static_cast<std::size_t>(tri[2] - 1)], align_tol)) {
      out.strongly_rigid = false;
      break;
    }
  }

  out.line_configuration = collinear(p.points, align_tol);

  const Eigen::MatrixXd J = distance_map_jacobian(g, p);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-10 * smax) ++rank;
  out.rigidity_rank = rank;
  out.infinitesimally_rigid = rank == 2 * g.vertex_count() - 3;
  return out;
}

}  // namespace formation
