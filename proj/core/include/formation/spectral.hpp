#pragma once

#include <Eigen/Core>
#include <vector>

#include "formation/control.hpp"
#include "formation/geometry.hpp"
#include "formation/partition.hpp"

namespace formation {

/// Relative eigenvalue threshold separating the rigid-motion kernel from
/// genuine curvature.
inline constexpr double kDefaultZeroTol = 1e-8;

/// Default gradient-norm threshold below which a configuration is accepted
/// as an equilibrium.
inline constexpr double kDefaultEquilibriumTol = 1e-8;

/// Counts of positive, negative, and zero eigenvalues of a symmetric matrix.
struct Signature {
  int n_plus = 0;
  int n_minus = 0;
  int n_zero = 0;

  friend bool operator==(const Signature&, const Signature&) = default;
};

enum class StabilityClass { exponentially_stable, unstable, degenerate };

const char* to_string(StabilityClass cls) noexcept;

/// Eigenvalues with |lambda| <= zero_tol * max(1, |lambda|_max) count as
/// zero. Throws `not_symmetric` when the relative asymmetry exceeds 1e-10.
Signature signature_of(const Eigen::MatrixXd& H, double zero_tol = kDefaultZeroTol);

struct MbifResult {
  Signature total;                    // summed N+, N-; N0 = 2n - N+ - N-
  std::vector<Signature> per_part;    // full sub-Hessian signatures
  IndependentPartition partition;
};

/// Signature decomposition over the independent partition: assembles each
/// block's induced sub-Hessian and sums the positive/negative counts. The
/// identity with the direct signature is guaranteed at equilibria; elsewhere
/// callers should treat agreement as informational.
MbifResult mbif_signature(const FormationSystem& sys, const Configuration& p,
                          double align_tol = kDefaultAlignTol,
                          double zero_tol = kDefaultZeroTol);

/// Congruence W^T H_p W = Lambda built from the orbit tangent basis and the
/// pushed-forward sub-Hessian eigenvectors. Requires every part to be an
/// equilibrium of its induced subsystem (throws `sub_equilibrium_violated`);
/// throws `ill_conditioned_w` when W is numerically singular.
struct CongruencePair {
  Eigen::MatrixXd W;         // 2n x 2n, nonsingular
  Eigen::VectorXd lambda;    // diagonal of Lambda: three zeros then per-part eigenvalues
};

CongruencePair congruence_matrices(const FormationSystem& sys,
                                   const Configuration& p,
                                   const IndependentPartition& partition,
                                   double sub_eq_tol = kDefaultEquilibriumTol);

/// The two zero-row-sum n x n blocks of the Hessian at a line configuration
/// rotated onto the first coordinate (the rotation is performed internally).
/// Off-diagonal entries: F uses -u(d), D uses -d(x u(x))/dx. Asserts that the
/// block signatures add up to the full Hessian signature.
struct LineMatrices {
  Eigen::MatrixXd D;
  Eigen::MatrixXd F;
  Configuration rotated;  // the input after rotation onto the first coordinate
};

LineMatrices line_matrices(const FormationSystem& sys, const Configuration& p_line,
                           double align_tol = kDefaultAlignTol,
                           double zero_tol = kDefaultZeroTol);

/// Removal of an aligned, individually equilibrated degree-2 vertex. The lost
/// interactions are folded into the anchor edge as an inverse-square gain
/// g(d) = kappa (1 - (target/d)^2); the reduced dynamics match the original
/// on every surviving agent.
struct ReducedSystem {
  FormationSystem system;          // on the relabeled graph without vertex k
  Configuration p_star;            // restriction of p to the surviving agents
  std::vector<int> vertex_map;     // local id l -> global id vertex_map[l-1]
  int removed_vertex = 0;          // global id
  Edge anchor_edge{0, 0};          // global ids of the compensated edge
  double kappa = 0.0;              // gain of the compensating term
  bool gain_monotone = false;      // d(x g(x))/dx >= 0, i.e. kappa >= 0
};

ReducedSystem reduce_system(const FormationSystem& sys, const Configuration& p,
                            int k, double align_tol = kDefaultAlignTol,
                            double vertex_eq_tol = 1e-10);

struct OrbitClassification {
  StabilityClass stability = StabilityClass::unstable;
  Signature signature;
  FrameworkPredicates predicates;
};

/// Classifies the critical orbit through an equilibrium and cross-checks the
/// numeric verdict against strong rigidity; a disagreement raises
/// `inconsistent_with_theory` instead of silently trusting either side.
OrbitClassification classify_orbit(const FormationSystem& sys,
                                   const Configuration& p_eq,
                                   double zero_tol = kDefaultZeroTol,
                                   double align_tol = kDefaultAlignTol,
                                   double eq_tol = kDefaultEquilibriumTol);

/// All 2^(n-2) configurations realizing every target distance: the base edge
/// is placed on the positive x-axis and each construction step picks one of
/// the two circle intersections. Output index bit t chooses the side of step
/// t's directed anchor edge (0 = left, 1 = right); outputs are pairwise
/// non-congruent under proper rigid motions.
std::vector<Configuration> enumerate_target_orbits(const FormationSystem& sys);

/// True iff every part of the partition is an equilibrium of its induced
/// subsystem. Throws `not_an_equilibrium` when p_eq itself is not one.
bool subsystem_equilibrium_check(const FormationSystem& sys,
                                 const Configuration& p_eq,
                                 const IndependentPartition& partition,
                                 double eq_tol = kDefaultEquilibriumTol);

}  // namespace formation
