#pragma once

#include <Eigen/Core>
#include <vector>

#include "formation/graph.hpp"

namespace formation {

/// Scale-normalized collinearity tolerance shared by framework predicates and
/// the partition recursion, so the two never disagree on "aligned".
inline constexpr double kDefaultAlignTol = 1e-9;

/// An embedding of n agents in the plane. Membership in the configuration
/// space of a graph (no coincident adjacent agents) is checked at the
/// operations that require it, not at construction.
struct Configuration {
  std::vector<Eigen::Vector2d> points;

  Configuration() = default;
  explicit Configuration(std::vector<Eigen::Vector2d> pts)
      : points(std::move(pts)) {}

  int size() const { return static_cast<int>(points.size()); }
  bool operator==(const Configuration& o) const {
    if (points.size() != o.points.size()) return false;
    for (std::size_t i = 0; i < points.size(); ++i)
      if (points[i].x() != o.points[i].x() || points[i].y() != o.points[i].y())
        return false;
    return true;
  }
};

Eigen::VectorXd flatten(const Configuration& p);
Configuration unflatten(const Eigen::VectorXd& x);

/// Restriction of p to the listed (1-based) vertex ids, in the given order.
Configuration restrict_to(const Configuration& p, const std::vector<int>& vertices);

/// Proper rigid motion x -> R x + t with det(R) = +1.
struct RigidMotion {
  Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();

  static RigidMotion identity() { return {}; }
  static RigidMotion from_angle(double theta,
                                const Eigen::Vector2d& t = Eigen::Vector2d::Zero());
};

/// Group product: (compose(g2, g1))(x) = g2(g1(x)).
RigidMotion compose(const RigidMotion& g2, const RigidMotion& g1);

Configuration apply_motion(const RigidMotion& gamma, const Configuration& p);

/// Squared edge lengths in canonical lexicographic edge order.
Eigen::VectorXd distance_map(const TriangulatedLamanGraph& g, const Configuration& p);

/// Jacobian of distance_map: |E| x 2n, rows 2(x_i - x_j)^T / -2(x_i - x_j)^T.
Eigen::MatrixXd distance_map_jacobian(const TriangulatedLamanGraph& g,
                                      const Configuration& p);

/// Plain (unsquared) edge lengths, same order.
Eigen::VectorXd edge_lengths(const TriangulatedLamanGraph& g, const Configuration& p);

/// Orthonormal basis of the tangent space of the rigid-motion orbit through p:
/// two translations plus the rotation generator (J x_1, ..., J x_n), Gram-
/// Schmidt orthonormalized. Throws `degenerate_rotation` when the generator is
/// linearly dependent on the translations (all agents coincide, or n == 1).
Eigen::MatrixXd orbit_tangent_basis(const Configuration& p);

/// Minimum RMSD between q and gamma.p over proper rotations and translations
/// (closed form: centroid alignment plus the optimal proper rotation angle).
double orbit_distance(const Configuration& p, const Configuration& q);

/// True iff p and q lie on the same rigid-motion orbit within tol (RMSD).
/// Reflections are deliberately excluded: mirror images are distinct orbits.
bool same_orbit(const Configuration& p, const Configuration& q, double tol);

/// Scale-normalized alignment test: |cross(b-a, c-a)| <= tol |b-a| |c-a|.
bool aligned(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
             const Eigen::Vector2d& c, double align_tol = kDefaultAlignTol);

/// True iff all points are collinear under the same normalized test.
bool collinear(const std::vector<Eigen::Vector2d>& pts,
               double align_tol = kDefaultAlignTol);

struct FrameworkPredicates {
  bool strongly_rigid = false;      // no 3-cycle embedded collinearly
  bool line_configuration = false;  // all agents collinear
  int rigidity_rank = 0;            // numerical rank of the distance-map Jacobian
  bool infinitesimally_rigid = false;  // rank == 2n - 3
};

FrameworkPredicates framework_predicates(const TriangulatedLamanGraph& g,
                                         const Configuration& p,
                                         double align_tol = kDefaultAlignTol);

}  // namespace formation
