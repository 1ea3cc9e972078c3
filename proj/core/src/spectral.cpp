#include "formation/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "formation/errors.hpp"

namespace formation {
namespace {

const Eigen::Vector2d& point_of(const Configuration& p, int v) {
  return p.points[static_cast<std::size_t>(v - 1)];
}

double spectral_scale(const Eigen::VectorXd& eigenvalues) {
  return eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
}

/// Orthonormal basis of the orthogonal complement of the orbit tangent space,
/// via the full QR factor of the 2n x 3 tangent basis.
Eigen::MatrixXd orbit_normal_basis(const Configuration& p) {
  const Eigen::MatrixXd T = orbit_tangent_basis(p);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(T);
  const Eigen::MatrixXd Q = qr.householderQ();
  return Q.rightCols(Q.cols() - 3);
}

}  // namespace

const char* to_string(StabilityClass cls) noexcept {
  switch (cls) {
    case StabilityClass::exponentially_stable: return "exponentially_stable";
    case StabilityClass::unstable: return "unstable";
    case StabilityClass::degenerate: return "degenerate";
  }
  return "unknown";
}

Signature signature_of(const Eigen::MatrixXd& H, double zero_tol) {
  if (H.rows() != H.cols())
    raise(errc::not_symmetric, "matrix is not square");
  const double scale = H.cwiseAbs().maxCoeff();
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale))
    raise(errc::not_symmetric, "matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (H + H.transpose()), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = solver.eigenvalues();
  const double threshold = zero_tol * std::max(1.0, spectral_scale(ev));
  Signature sig;
  for (int i = 0; i < ev.size(); ++i) {
    if (std::abs(ev[i]) <= threshold)
      ++sig.n_zero;
    else if (ev[i] > 0.0)
      ++sig.n_plus;
    else
      ++sig.n_minus;
  }
  return sig;
}

MbifResult mbif_signature(const FormationSystem& sys, const Configuration& p,
                          double align_tol, double zero_tol) {
  MbifResult out;
  out.partition = independent_partition(sys.graph, p, align_tol);
  out.per_part.reserve(out.partition.parts.size());
  int n_plus = 0, n_minus = 0;
  for (const PartFramework& part : out.partition.parts) {
    const FormationSystem sub =
        induced_subsystem(sys, part.subgraph, part.vertices_global);
    const Signature sig = signature_of(hessian(sub, part.subconfig), zero_tol);
    n_plus += sig.n_plus;
    n_minus += sig.n_minus;
    out.per_part.push_back(sig);
  }
  out.total.n_plus = n_plus;
  out.total.n_minus = n_minus;
  out.total.n_zero = 2 * sys.vertex_count() - n_plus - n_minus;
  return out;
}

CongruencePair congruence_matrices(const FormationSystem& sys,
                                   const Configuration& p,
                                   const IndependentPartition& partition,
                                   double sub_eq_tol) {
  const int n2 = 2 * sys.vertex_count();
  CongruencePair out;
  out.W = Eigen::MatrixXd::Zero(n2, n2);
  out.lambda = Eigen::VectorXd::Zero(n2);
  out.W.leftCols(3) = orbit_tangent_basis(p);

  int col = 3;
  for (int i = 0; i < partition.size(); ++i) {
    const PartFramework& part = partition.parts[static_cast<std::size_t>(i)];
    const FormationSystem sub =
        induced_subsystem(sys, part.subgraph, part.vertices_global);

    const Eigen::VectorXd sub_grad = gradient(sub, part.subconfig);
    if (sub_grad.norm() > sub_eq_tol)
      raise(errc::sub_equilibrium_violated,
            "part " + std::to_string(i) +
                " is not an equilibrium of its induced subsystem (|grad| = " +
                std::to_string(sub_grad.norm()) + ")");

    const Eigen::MatrixXd H_i = hessian(sub, part.subconfig);
    const Eigen::MatrixXd N = orbit_normal_basis(part.subconfig);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(N.transpose() * H_i * N);
    const Eigen::MatrixXd Deta = eta_derivative(sys.graph, p, partition, i);

    for (int j = 0; j < solver.eigenvalues().size(); ++j) {
      const Eigen::VectorXd v = N * solver.eigenvectors().col(j);
      out.W.col(col) = Deta * v;
      out.lambda[col] = solver.eigenvalues()[j];
      ++col;
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.W);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv[sv.size() - 1] <= 1e-12 * sv[0] || !(sv[sv.size() - 1] > 0.0))
    raise(errc::ill_conditioned_w, "congruence basis is numerically singular");
  return out;
}

LineMatrices line_matrices(const FormationSystem& sys, const Configuration& p_line,
                           double align_tol, double zero_tol) {
  if (p_line.size() != sys.vertex_count())
    raise(errc::dimension_mismatch, "line_matrices: wrong point count");
  if (!collinear(p_line.points, align_tol))
    raise(errc::not_line_configuration, "configuration is not a line framework");

  // Rotate the line onto the first coordinate, using the farthest pair as the
  // direction estimate.
  const int n = sys.vertex_count();
  int ia = 0, ib = 1;
  double best = -1.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = (p_line.points[static_cast<std::size_t>(i)] -
                        p_line.points[static_cast<std::size_t>(j)])
                           .squaredNorm();
      if (d > best) {
        best = d;
        ia = i;
        ib = j;
      }
    }
  const Eigen::Vector2d dir = (p_line.points[static_cast<std::size_t>(ib)] -
                               p_line.points[static_cast<std::size_t>(ia)])
                                  .normalized();
  RigidMotion rot;
  rot.rotation << dir.x(), dir.y(), -dir.y(), dir.x();

  LineMatrices out;
  out.rotated = apply_motion(rot, p_line);
  out.D = Eigen::MatrixXd::Zero(n, n);
  out.F = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t e = 0; e < sys.graph.edges().size(); ++e) {
    const Edge& ed = sys.graph.edges()[e];
    const int i = ed.first - 1;
    const int j = ed.second - 1;
    const double d = (out.rotated.points[static_cast<std::size_t>(i)] -
                      out.rotated.points[static_cast<std::size_t>(j)])
                         .norm();
    const double u = sys.laws[e].gain(d);
    const double slope = u + d * sys.laws[e].gain_derivative(d);
    out.F(i, j) = out.F(j, i) = -u;
    out.D(i, j) = out.D(j, i) = -slope;
  }
  for (int i = 0; i < n; ++i) {
    out.F(i, i) = -out.F.row(i).sum();
    out.D(i, i) = -out.D.row(i).sum();
  }

  const Signature full = signature_of(hessian(sys, out.rotated), zero_tol);
  const Signature sd = signature_of(out.D, zero_tol);
  const Signature sf = signature_of(out.F, zero_tol);
  if (full.n_plus != sd.n_plus + sf.n_plus ||
      full.n_minus != sd.n_minus + sf.n_minus ||
      full.n_zero != sd.n_zero + sf.n_zero)
    raise(errc::inconsistent_with_theory,
          "block signatures do not add up to the Hessian signature");
  return out;
}

ReducedSystem reduce_system(const FormationSystem& sys, const Configuration& p,
                            int k, double align_tol, double vertex_eq_tol) {
  const TriangulatedLamanGraph& g = sys.graph;
  if (k < 1 || k > g.vertex_count())
    raise(errc::invalid_argument, "vertex id out of range");
  if (g.degree(k) != 2)
    raise(errc::invalid_argument,
          "vertex " + std::to_string(k) + " does not have degree 2");
  if (p.size() != g.vertex_count())
    raise(errc::dimension_mismatch, "reduce_system: wrong point count");

  const int i = g.neighbors(k)[0];
  const int j = g.neighbors(k)[1];
  const Eigen::Vector2d& xi = point_of(p, i);
  const Eigen::Vector2d& xj = point_of(p, j);
  const Eigen::Vector2d& xk = point_of(p, k);
  if (!aligned(xi, xj, xk, align_tol))
    raise(errc::precondition_not_aligned,
          "agents " + std::to_string(i) + "," + std::to_string(j) + "," +
              std::to_string(k) + " are not aligned");

  const double d_ik = (xi - xk).norm();
  const double d_jk = (xj - xk).norm();
  const double f_ik = sys.law_of(i, k).gain(d_ik);
  const double f_jk = sys.law_of(j, k).gain(d_jk);
  const Eigen::Vector2d xdot_k = f_ik * (xi - xk) + f_jk * (xj - xk);
  if (xdot_k.norm() > vertex_eq_tol)
    raise(errc::precondition_not_equilibrated_vertex,
          "dynamics of vertex " + std::to_string(k) +
              " are nonzero (|xdot| = " + std::to_string(xdot_k.norm()) + ")");

  // x_k - x_i = s (x_j - x_i); required gain value g(d_ij) = f_ik(d_ik) * s.
  const Eigen::Vector2d uij = xj - xi;
  const double s = (xk - xi).dot(uij) / uij.squaredNorm();
  const double g_required = f_ik * s;

  const double d_ij = uij.norm();
  const double dbar_ij = sys.target_of(i, j);
  const double denom = 1.0 - (dbar_ij / d_ij) * (dbar_ij / d_ij);
  double kappa = 0.0;
  if (std::abs(denom) <= 1e-14) {
    if (std::abs(g_required) > 1e-12)
      raise(errc::gain_undefined,
            "anchor edge sits at its target distance but a nonzero gain value "
            "is required");
  } else {
    kappa = g_required / denom;
  }

  const ControlLaw& base_law = sys.law_of(i, j);
  const ControlLaw gain_law = law_inverse_square(dbar_ij);
  ControlLaw modified;
  modified.family = base_law.family + "+inverse_square_gain";
  modified.target = dbar_ij;
  modified.gain = [base_law, gain_law, kappa](double d) {
    return base_law.gain(d) + kappa * gain_law.gain(d);
  };
  modified.gain_derivative = [base_law, gain_law, kappa](double d) {
    return base_law.gain_derivative(d) + kappa * gain_law.gain_derivative(d);
  };
  modified.edge_energy = [base_law, gain_law, kappa](double r) {
    return base_law.edge_energy(r) + kappa * gain_law.edge_energy(r);
  };

  ReducedSystem out;
  out.removed_vertex = k;
  out.anchor_edge = make_edge(i, j);
  out.kappa = kappa;
  out.gain_monotone = kappa >= 0.0;

  for (int v = 1; v <= g.vertex_count(); ++v)
    if (v != k) out.vertex_map.push_back(v);
  auto local_id = [&out](int v) {
    return static_cast<int>(std::lower_bound(out.vertex_map.begin(),
                                             out.vertex_map.end(), v) -
                            out.vertex_map.begin()) +
           1;
  };

  std::vector<Edge> local_edges;
  std::vector<Edge> kept_global;
  for (const Edge& e : g.edges()) {
    if (e.first == k || e.second == k) continue;
    kept_global.push_back(e);
    local_edges.push_back(make_edge(local_id(e.first), local_id(e.second)));
  }
  TriangulatedLamanGraph reduced_graph = TriangulatedLamanGraph::from_edge_set(
      g.vertex_count() - 1, std::move(local_edges));

  std::vector<double> targets;
  std::vector<ControlLaw> laws;
  for (const Edge& e : reduced_graph.edges()) {
    const int gi = out.vertex_map[static_cast<std::size_t>(e.first - 1)];
    const int gj = out.vertex_map[static_cast<std::size_t>(e.second - 1)];
    const int idx = g.edge_index(gi, gj);
    targets.push_back(sys.targets[static_cast<std::size_t>(idx)]);
    if (make_edge(gi, gj) == out.anchor_edge)
      laws.push_back(modified);
    else
      laws.push_back(sys.laws[static_cast<std::size_t>(idx)]);
  }
  out.system = assemble_system_unchecked(std::move(reduced_graph),
                                         std::move(targets), std::move(laws));
  out.p_star = restrict_to(p, out.vertex_map);

  // The reduced dynamics must match the original on every surviving agent.
  const Eigen::VectorXd g_full = gradient(sys, p);
  const Eigen::VectorXd g_red = gradient(out.system, out.p_star);
  double residual = 0.0;
  for (std::size_t l = 0; l < out.vertex_map.size(); ++l) {
    const int gv = out.vertex_map[l] - 1;
    residual = std::max(residual,
                        (g_red.segment<2>(2 * static_cast<int>(l)) -
                         g_full.segment<2>(2 * gv))
                            .norm());
  }
  if (residual > std::max(1e-10, 10.0 * vertex_eq_tol))
    raise(errc::inconsistent_with_theory,
          "reduced dynamics deviate from the original (residual = " +
              std::to_string(residual) + ")");
  return out;
}

OrbitClassification classify_orbit(const FormationSystem& sys,
                                   const Configuration& p_eq, double zero_tol,
                                   double align_tol, double eq_tol) {
  const double gnorm = gradient(sys, p_eq).norm();
  if (gnorm > eq_tol)
    raise(errc::not_an_equilibrium,
          "gradient norm " + std::to_string(gnorm) + " exceeds " +
              std::to_string(eq_tol));

  OrbitClassification out;
  out.signature = signature_of(hessian(sys, p_eq), zero_tol);
  out.predicates = framework_predicates(sys.graph, p_eq, align_tol);

  const int n = sys.vertex_count();
  const bool stable = out.signature.n_plus == 2 * n - 3 &&
                      out.signature.n_minus == 0 && out.signature.n_zero == 3;
  if (out.signature.n_zero < 3)
    raise(errc::inconsistent_with_theory,
          "fewer than three zero eigenvalues at an equilibrium");
  if (stable != out.predicates.strongly_rigid)
    raise(errc::inconsistent_with_theory,
          std::string("numeric stability verdict (") +
              (stable ? "stable" : "not stable") +
              ") disagrees with strong rigidity (" +
              (out.predicates.strongly_rigid ? "strongly rigid" : "not strongly rigid") +
              ")");

  if (stable)
    out.stability = StabilityClass::exponentially_stable;
  else if (out.signature.n_zero > 3)
    out.stability = StabilityClass::degenerate;
  else
    out.stability = StabilityClass::unstable;
  return out;
}

std::vector<Configuration> enumerate_target_orbits(const FormationSystem& sys) {
  const TriangulatedLamanGraph& g = sys.graph;
  const int n = g.vertex_count();
  const auto& steps = g.sequence();
  const std::size_t count = std::size_t{1} << steps.size();

  std::vector<Configuration> out;
  out.reserve(count);
  for (std::size_t choice = 0; choice < count; ++choice) {
    Configuration p;
    p.points.assign(static_cast<std::size_t>(n), Eigen::Vector2d::Zero());
    const auto [a, b] = g.base_edge();
    p.points[static_cast<std::size_t>(a - 1)] = Eigen::Vector2d::Zero();
    p.points[static_cast<std::size_t>(b - 1)] =
        Eigen::Vector2d(sys.target_of(a, b), 0.0);

    for (std::size_t t = 0; t < steps.size(); ++t) {
      const int k = steps[t].new_vertex;
      const int i = steps[t].anchor.first;
      const int j = steps[t].anchor.second;
      const Eigen::Vector2d& xi = p.points[static_cast<std::size_t>(i - 1)];
      const Eigen::Vector2d& xj = p.points[static_cast<std::size_t>(j - 1)];
      const double r_i = sys.target_of(i, k);
      const double r_j = sys.target_of(j, k);
      const Eigen::Vector2d u = xj - xi;
      const double L = u.norm();
      const double along = (r_i * r_i - r_j * r_j + L * L) / (2.0 * L);
      const double h2 = r_i * r_i - along * along;
      // Strict triangle inequalities guarantee two distinct intersections.
      const double h = std::sqrt(std::max(0.0, h2));
      const Eigen::Vector2d axis = u / L;
      const Eigen::Vector2d left(-axis.y(), axis.x());
      const double side = (choice >> t) & 1 ? -1.0 : 1.0;  // bit 0 = left
      p.points[static_cast<std::size_t>(k - 1)] = xi + along * axis + side * h * left;
    }
    out.push_back(std::move(p));
  }
  return out;
}

bool subsystem_equilibrium_check(const FormationSystem& sys,
                                 const Configuration& p_eq,
                                 const IndependentPartition& partition,
                                 double eq_tol) {
  const double gnorm = gradient(sys, p_eq).norm();
  if (gnorm > eq_tol)
    raise(errc::not_an_equilibrium,
          "gradient norm " + std::to_string(gnorm) + " exceeds " +
              std::to_string(eq_tol));
  for (const PartFramework& part : partition.parts) {
    const FormationSystem sub =
        induced_subsystem(sys, part.subgraph, part.vertices_global);
    if (gradient(sub, part.subconfig).norm() > eq_tol) return false;
  }
  return true;
}

}  // namespace formation
