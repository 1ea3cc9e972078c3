#include "formation/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "formation/errors.hpp"

namespace formation {
namespace {

double extent_of(const Configuration& p) {
  double lo_x = p.points[0].x(), hi_x = lo_x, lo_y = p.points[0].y(), hi_y = lo_y;
  for (const auto& x : p.points) {
    lo_x = std::min(lo_x, x.x());
    hi_x = std::max(hi_x, x.x());
    lo_y = std::min(lo_y, x.y());
    hi_y = std::max(hi_y, x.y());
  }
  return std::max(hi_x - lo_x, hi_y - lo_y);
}

/// Negative gradient of the (optionally biased) flow field, flattened.
struct Flow {
  const FormationSystem& sys;
  std::vector<double> bias;  // per canonical edge, 0 when absent

  explicit Flow(const FormationSystem& s, const EdgeBias& b)
      : sys(s), bias(s.graph.edges().size(), 0.0) {
    for (const auto& [edge, delta] : b) {
      const Edge key = make_edge(edge.first, edge.second);
      bias[static_cast<std::size_t>(sys.graph.edge_index(key.first, key.second))] =
          delta;
    }
  }

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    const auto& es = sys.graph.edges();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(x.size());
    double lo_x = x[0], hi_x = x[0], lo_y = x[1], hi_y = x[1];
    for (int i = 0; i < x.size(); i += 2) {
      lo_x = std::min(lo_x, x[i]);
      hi_x = std::max(hi_x, x[i]);
      lo_y = std::min(lo_y, x[i + 1]);
      hi_y = std::max(hi_y, x[i + 1]);
    }
    const double threshold = 1e-12 * std::max(hi_x - lo_x, hi_y - lo_y);
    for (std::size_t e = 0; e < es.size(); ++e) {
      const int i = es[e].first - 1;
      const int j = es[e].second - 1;
      const Eigen::Vector2d diff = x.segment<2>(2 * i) - x.segment<2>(2 * j);
      const double d = diff.norm();
      if (d <= threshold || d == 0.0)
        raise(errc::collision_detected,
              "adjacent agents " + std::to_string(i + 1) + " and " +
                  std::to_string(j + 1) + " collided during integration");
      const Eigen::Vector2d contrib = sys.laws[e].gain(d + bias[e]) * diff;
      v.segment<2>(2 * i) -= contrib;
      v.segment<2>(2 * j) += contrib;
    }
    return v;
  }
};

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0,
                 kE4 = 71.0 / 1920.0, kE5 = -17253.0 / 339200.0,
                 kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

}  // namespace

const char* to_string(TerminalClass cls) noexcept {
  switch (cls) {
    case TerminalClass::target_orbit: return "target_orbit";
    case TerminalClass::line_equilibrium: return "line_equilibrium";
    case TerminalClass::other_equilibrium: return "other_equilibrium";
    case TerminalClass::max_steps_reached: return "max_steps_reached";
  }
  return "unknown";
}

Trajectory integrate(const FormationSystem& sys, const Configuration& p0,
                     const IntegratorSettings& settings) {
  if (p0.size() != sys.vertex_count())
    raise(errc::dimension_mismatch, "integrate: wrong point count");
  const Flow flow(sys, settings.bias);

  Trajectory traj;
  Eigen::VectorXd x = flatten(p0);
  double t = 0.0;
  long steps = 0;

  auto record = [&](double time, const Eigen::VectorXd& state, double gnorm) {
    traj.times.push_back(time);
    traj.configurations.push_back(unflatten(state));
    traj.potential_values.push_back(potential(sys, traj.configurations.back()));
    traj.gradient_norms.push_back(gnorm);
  };

  Eigen::VectorXd f = flow(x);
  record(t, x, f.norm());
  if (f.norm() <= settings.grad_stop) return traj;

  if (settings.method == IntegratorMethod::rk4_fixed) {
    const double h = settings.dt;
    while (true) {
      const Eigen::VectorXd k1 = flow(x);
      const Eigen::VectorXd k2 = flow(x + 0.5 * h * k1);
      const Eigen::VectorXd k3 = flow(x + 0.5 * h * k2);
      const Eigen::VectorXd k4 = flow(x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += h;
      ++steps;
      const double gnorm = flow(x).norm();
      const bool sample = steps % settings.record_stride == 0;
      const bool done = gnorm <= settings.grad_stop || t >= settings.t_max ||
                        steps >= settings.max_steps;
      if (sample || done) record(t, x, gnorm);
      if (done) {
        traj.stop_reason = gnorm <= settings.grad_stop
                               ? StopReason::gradient_threshold
                               : (t >= settings.t_max ? StopReason::time_limit
                                                      : StopReason::step_limit);
        return traj;
      }
    }
  }

  // Adaptive Dormand-Prince with a PI-free elementary controller.
  double h = std::min(1e-2, settings.t_max);
  Eigen::VectorXd k1 = f;
  while (true) {
    if (t + h > settings.t_max) h = settings.t_max - t;
    const Eigen::VectorXd k2 = flow(x + h * (kA21 * k1));
    const Eigen::VectorXd k3 = flow(x + h * (kA31 * k1 + kA32 * k2));
    const Eigen::VectorXd k4 = flow(x + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    const Eigen::VectorXd k5 =
        flow(x + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    const Eigen::VectorXd k6 = flow(
        x + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    const Eigen::VectorXd x5 =
        x + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    const Eigen::VectorXd k7 = flow(x5);
    const Eigen::VectorXd err_vec =
        h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

    double err = 0.0;
    for (int c = 0; c < x.size(); ++c) {
      const double scale =
          settings.abs_tol +
          settings.rel_tol * std::max(std::abs(x[c]), std::abs(x5[c]));
      err += std::pow(err_vec[c] / scale, 2);
    }
    err = std::sqrt(err / x.size());

    if (err <= 1.0) {
      t += h;
      x = x5;
      k1 = k7;  // FSAL
      ++steps;
      const double gnorm = k1.norm();
      const bool sample = steps % settings.record_stride == 0;
      const bool done = gnorm <= settings.grad_stop || t >= settings.t_max ||
                        steps >= settings.max_steps;
      if (sample || done) record(t, x, gnorm);
      if (done) {
        traj.stop_reason = gnorm <= settings.grad_stop
                               ? StopReason::gradient_threshold
                               : (t >= settings.t_max ? StopReason::time_limit
                                                      : StopReason::step_limit);
        return traj;
      }
    }
    const double factor =
        std::clamp(0.9 * std::pow(err > 0.0 ? 1.0 / err : 1e8, 0.2), 0.2, 5.0);
    h *= factor;
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      raise(errc::step_underflow, "adaptive step collapsed at t = " + std::to_string(t));
  }
}

Configuration find_equilibrium(const FormationSystem& sys, const Configuration& p0,
                               const IntegratorSettings& settings,
                               double newton_tol) {
  IntegratorSettings flow_settings = settings;
  flow_settings.record_stride = 1 << 20;  // only the terminal state is needed
  Trajectory traj = integrate(sys, p0, flow_settings);
  Configuration p = traj.terminal();

  // Newton on the gradient with the three orbit directions pinned.
  const int n2 = 2 * sys.vertex_count();
  Eigen::VectorXd x = flatten(p);
  for (int it = 0; it < 60; ++it) {
    const Configuration cur = unflatten(x);
    const Eigen::VectorXd g = gradient(sys, cur);
    if (g.norm() <= newton_tol) return cur;

    const Eigen::MatrixXd T = orbit_tangent_basis(cur);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(T);
    const Eigen::MatrixXd Q =
        Eigen::MatrixXd(qr.householderQ()).rightCols(n2 - 3);
    const Eigen::MatrixXd Hr = Q.transpose() * hessian(sys, cur) * Q;
    const Eigen::VectorXd gr = Q.transpose() * g;

    Eigen::VectorXd y;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Hr);
    if (lu.isInvertible()) {
      y = lu.solve(-gr);
    } else {
      y = Hr.completeOrthogonalDecomposition().solve(-gr);
    }
    Eigen::VectorXd step = Q * y;
    const double max_step = std::max(1.0, extent_of(cur));
    if (step.norm() > max_step) step *= max_step / step.norm();
    x += step;
  }
  raise(errc::newton_stalled, "Newton polish did not reach the gradient tolerance");
}

SimOutcome classify_outcome(const FormationSystem& sys,
                            const std::vector<Configuration>& target_orbits,
                            const Configuration& terminal, bool converged,
                            double align_tol) {
  SimOutcome out;
  out.terminal = terminal;
  if (!converged) {
    out.cls = TerminalClass::max_steps_reached;
    return out;
  }

  double max_target = 0.0;
  for (double t : sys.targets) max_target = std::max(max_target, t);
  const Eigen::VectorXd lengths = edge_lengths(sys.graph, terminal);
  double deviation = 0.0;
  for (std::size_t e = 0; e < sys.targets.size(); ++e)
    deviation = std::max(deviation,
                         std::abs(lengths[static_cast<int>(e)] - sys.targets[e]));

  if (deviation <= 1e-6 * max_target) {
    double diameter = 0.0;
    for (int i = 0; i < terminal.size(); ++i)
      for (int j = i + 1; j < terminal.size(); ++j)
        diameter = std::max(
            diameter, (terminal.points[static_cast<std::size_t>(i)] -
                       terminal.points[static_cast<std::size_t>(j)])
                          .norm());
    for (std::size_t idx = 0; idx < target_orbits.size(); ++idx) {
      if (same_orbit(terminal, target_orbits[idx], 1e-5 * diameter)) {
        out.cls = TerminalClass::target_orbit;
        out.orbit_index = static_cast<int>(idx);
        return out;
      }
    }
  }
  out.cls = collinear(terminal.points, align_tol)
                ? TerminalClass::line_equilibrium
                : TerminalClass::other_equilibrium;
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Configuration sample_admissible_configuration(const FormationSystem& sys,
                                              std::mt19937_64& rng, double box) {
  const int n = sys.vertex_count();
  while (true) {
    Configuration p;
    p.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      p.points.emplace_back(box * (uniform_unit(rng) - 0.5),
                            box * (uniform_unit(rng) - 0.5));
    bool ok = true;
    for (const Edge& e : sys.graph.edges()) {
      if ((p.points[static_cast<std::size_t>(e.first - 1)] -
           p.points[static_cast<std::size_t>(e.second - 1)])
              .norm() < 1e-3 * box) {
        ok = false;
        break;
      }
    }
    if (ok) return p;
  }
}

std::mt19937_64 trial_generator(std::uint64_t master_seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(master_seed ^ splitmix64(index)));
}

MonteCarloStats monte_carlo(const FormationSystem& sys, long trials,
                            std::uint64_t seed, double box,
                            const IntegratorSettings& settings, int threads) {
  if (trials < 1) raise(errc::invalid_argument, "need at least one trial");
  const std::vector<Configuration> orbits = enumerate_target_orbits(sys);

  MonteCarloStats stats;
  stats.trials = trials;
  stats.seed = seed;
  stats.box = box;
  stats.per_orbit.assign(orbits.size(), 0);

  std::vector<TerminalClass> classes(static_cast<std::size_t>(trials));
  std::vector<int> orbit_idx(static_cast<std::size_t>(trials), -1);

  auto run_range = [&](long lo, long hi) {
    for (long trial = lo; trial < hi; ++trial) {
      std::mt19937_64 rng = trial_generator(seed, static_cast<std::uint64_t>(trial));
      const Configuration p0 = sample_admissible_configuration(sys, rng, box);
      TerminalClass cls = TerminalClass::max_steps_reached;
      int matched = -1;
      try {
        const Configuration eq = find_equilibrium(sys, p0, settings);
        const SimOutcome outcome = classify_outcome(sys, orbits, eq, true);
        cls = outcome.cls;
        if (outcome.orbit_index) matched = *outcome.orbit_index;
      } catch (const Error&) {
      }
      classes[static_cast<std::size_t>(trial)] = cls;
      orbit_idx[static_cast<std::size_t>(trial)] = matched;
    }
  };

  int nthreads = threads;
  if (nthreads <= 0)
    nthreads = static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(trials)));

  if (nthreads == 1) {
    run_range(0, trials);
  } else {
    std::vector<std::thread> pool;
    const long chunk = (trials + nthreads - 1) / nthreads;
    for (int w = 0; w < nthreads; ++w) {
      const long lo = w * chunk;
      const long hi = std::min(trials, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  for (long trial = 0; trial < trials; ++trial) {
    ++stats.per_class[classes[static_cast<std::size_t>(trial)]];
    const int idx = orbit_idx[static_cast<std::size_t>(trial)];
    if (idx >= 0) ++stats.per_orbit[static_cast<std::size_t>(idx)];
  }
  return stats;
}

}  // namespace formation
