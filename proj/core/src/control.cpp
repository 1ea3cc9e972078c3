#include "formation/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "formation/errors.hpp"

namespace formation {
namespace {

std::string cycle_str(const std::array<int, 3>& t) {
  return "(" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
         std::to_string(t[2]) + ")";
}

/// Largest coordinate spread; the collision threshold scales with it.
double extent_of(const Configuration& p) {
  double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
  bool first = true;
  for (const auto& x : p.points) {
    if (first) {
      lo_x = hi_x = x.x();
      lo_y = hi_y = x.y();
      first = false;
    } else {
      lo_x = std::min(lo_x, x.x());
      hi_x = std::max(hi_x, x.x());
      lo_y = std::min(lo_y, x.y());
      hi_y = std::max(hi_y, x.y());
    }
  }
  return std::max(hi_x - lo_x, hi_y - lo_y);
}

void check_membership(const FormationSystem& sys, const Configuration& p,
                      const char* where) {
  if (p.size() != sys.vertex_count())
    raise(errc::dimension_mismatch, std::string(where) + ": wrong point count");
  const double threshold = 1e-12 * extent_of(p);
  for (const Edge& e : sys.graph.edges()) {
    const double d = (p.points[static_cast<std::size_t>(e.first - 1)] -
                      p.points[static_cast<std::size_t>(e.second - 1)])
                         .norm();
    if (d <= threshold || d == 0.0)
      raise(errc::collision_on_edge,
            std::string(where) + ": adjacent agents " + std::to_string(e.first) +
                " and " + std::to_string(e.second) + " coincide");
  }
}

}  // namespace

ControlLaw law_inverse_square(double target) {
  if (!(target > 0.0))
    raise(errc::nonpositive_target, "target distance must be positive");
  ControlLaw law;
  law.family = "inverse_square";
  law.target = target;
  const double t2 = target * target;
  law.gain = [t2](double d) { return 1.0 - t2 / (d * d); };
  law.gain_derivative = [t2](double d) { return 2.0 * t2 / (d * d * d); };
  law.edge_energy = [t2](double r) {
    return 0.5 * (r * r - 1.0) - t2 * std::log(r);
  };
  return law;
}

void validate_law(const ControlLaw& law) {
  const double dbar = law.target;
  if (!(dbar > 0.0)) raise(errc::nonpositive_target, "law target not positive");

  constexpr int kGridPoints = 400;
  const double lo = std::log(1e-4 * dbar);
  const double hi = std::log(1e4 * dbar);
  for (int k = 0; k < kGridPoints; ++k) {
    const double x = std::exp(lo + (hi - lo) * k / (kGridPoints - 1));
    const double slope = law.gain(x) + x * law.gain_derivative(x);  // d(x u)/dx
    if (!(slope > 0.0))
      raise(errc::c1_violated,
            "d(x*u(x))/dx not positive at x = " + std::to_string(x));
    const double sign_expected = x < dbar ? -1.0 : (x > dbar ? 1.0 : 0.0);
    const double u = law.gain(x);
    if (sign_expected < 0.0 && !(u < 0.0))
      raise(errc::c1_violated, "gain not negative below target");
    if (sign_expected > 0.0 && !(u > 0.0))
      raise(errc::c1_violated, "gain not positive above target");
  }
  if (std::abs(law.gain(dbar)) > 1e-9)
    raise(errc::c1_violated, "gain does not vanish at the target distance");

  // Divergence probe: the collision barrier must keep growing as the
  // distance shrinks by decades, with increments that do not die out.
  double prev = law.edge_energy(0.1 * dbar);
  double first_rise = 0.0;
  for (int k = 2; k <= 4; ++k) {
    const double cur = law.edge_energy(std::pow(10.0, -k) * dbar);
    const double rise = cur - prev;
    if (!(rise > 0.0))
      raise(errc::c2_suspect, "collision energy stopped growing toward d = 0");
    if (k == 2) first_rise = rise;
    if (k == 4 && rise < 0.25 * first_rise)
      raise(errc::c2_suspect, "collision energy increments vanish toward d = 0");
    prev = cur;
  }
}

FormationSystem build_system(TriangulatedLamanGraph g,
                             const std::vector<double>& targets,
                             const LawFactory& family) {
  const auto& es = g.edges();
  if (targets.size() != es.size())
    raise(errc::dimension_mismatch, "one target per edge required");
  for (double t : targets)
    if (!(t > 0.0)) raise(errc::nonpositive_target, "targets must be positive");

  for (const auto& tri : g.cycles3()) {
    const double a = targets[static_cast<std::size_t>(g.edge_index(tri[0], tri[1]))];
    const double b = targets[static_cast<std::size_t>(g.edge_index(tri[0], tri[2]))];
    const double c = targets[static_cast<std::size_t>(g.edge_index(tri[1], tri[2]))];
    if (!(a + b > c && a + c > b && b + c > a))
      raise(errc::triangle_inequality_violated,
            "targets violate the strict triangle inequality on cycle " +
                cycle_str(tri));
  }

  FormationSystem sys;
  sys.targets = targets;
  sys.laws.reserve(targets.size());
  for (double t : targets) {
    ControlLaw law = family(t);
    validate_law(law);
    sys.laws.push_back(std::move(law));
  }
  sys.graph = std::move(g);
  return sys;
}

FormationSystem assemble_system_unchecked(TriangulatedLamanGraph g,
                                          std::vector<double> targets,
                                          std::vector<ControlLaw> laws) {
  FormationSystem sys;
  sys.graph = std::move(g);
  sys.targets = std::move(targets);
  sys.laws = std::move(laws);
  return sys;
}

FormationSystem induced_subsystem(const FormationSystem& sys,
                                  const TriangulatedLamanGraph& subgraph,
                                  const std::vector<int>& vertices_global) {
  std::vector<double> targets;
  std::vector<ControlLaw> laws;
  targets.reserve(subgraph.edges().size());
  laws.reserve(subgraph.edges().size());
  for (const Edge& e : subgraph.edges()) {
    const int gi = vertices_global[static_cast<std::size_t>(e.first - 1)];
    const int gj = vertices_global[static_cast<std::size_t>(e.second - 1)];
    const int idx = sys.graph.edge_index(gi, gj);
    targets.push_back(sys.targets[static_cast<std::size_t>(idx)]);
    laws.push_back(sys.laws[static_cast<std::size_t>(idx)]);
  }
  return assemble_system_unchecked(subgraph, std::move(targets), std::move(laws));
}

double potential(const FormationSystem& sys, const Configuration& p) {
  check_membership(sys, p, "potential");
  const auto& es = sys.graph.edges();
  double phi = 0.0;
  for (std::size_t e = 0; e < es.size(); ++e) {
    const double d = (p.points[static_cast<std::size_t>(es[e].first - 1)] -
                      p.points[static_cast<std::size_t>(es[e].second - 1)])
                         .norm();
    phi += sys.laws[e].edge_energy(d);
  }
  return phi;
}

Eigen::VectorXd gradient(const FormationSystem& sys, const Configuration& p) {
  check_membership(sys, p, "gradient");
  const auto& es = sys.graph.edges();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(2 * p.size());
  for (std::size_t e = 0; e < es.size(); ++e) {
    const int i = es[e].first - 1;
    const int j = es[e].second - 1;
    const Eigen::Vector2d v =
        p.points[static_cast<std::size_t>(i)] - p.points[static_cast<std::size_t>(j)];
    const Eigen::Vector2d contrib = sys.laws[e].gain(v.norm()) * v;
    grad.segment<2>(2 * i) += contrib;
    grad.segment<2>(2 * j) -= contrib;
  }
  return grad;
}

Eigen::MatrixXd hessian(const FormationSystem& sys, const Configuration& p) {
  check_membership(sys, p, "hessian");
  const auto& es = sys.graph.edges();
  const int n = p.size();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (std::size_t e = 0; e < es.size(); ++e) {
    const int i = es[e].first - 1;
    const int j = es[e].second - 1;
    const Eigen::Vector2d v =
        p.points[static_cast<std::size_t>(i)] - p.points[static_cast<std::size_t>(j)];
    const double d = v.norm();
    const Eigen::Matrix2d block =
        sys.laws[e].gain(d) * Eigen::Matrix2d::Identity() +
        (sys.laws[e].gain_derivative(d) / d) * (v * v.transpose());
    H.block<2, 2>(2 * i, 2 * i) += block;
    H.block<2, 2>(2 * j, 2 * j) += block;
    H.block<2, 2>(2 * i, 2 * j) -= block;
    H.block<2, 2>(2 * j, 2 * i) -= block;
  }
  return H;
}

}  // namespace formation
