#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "formation/control.hpp"
#include "formation/geometry.hpp"
#include "formation/spectral.hpp"

namespace formation {

enum class IntegratorMethod { rk4_fixed, rk45_adaptive };

/// Optional constant per-edge measurement bias: the gain of edge (i,j) is
/// evaluated at d_ij + bias[(i,j)] while the displacement vector is exact.
using EdgeBias = std::map<Edge, double>;

struct IntegratorSettings {
  IntegratorMethod method = IntegratorMethod::rk45_adaptive;
  double dt = 1e-2;          // fixed-step size (rk4_fixed)
  double rel_tol = 1e-8;     // adaptive error control
  double abs_tol = 1e-10;
  double t_max = 1e4;
  double grad_stop = 1e-6;   // stop when the driving field norm drops below
  long max_steps = 1'000'000;
  int record_stride = 1;     // sample every k-th accepted step
  EdgeBias bias;
};

enum class StopReason { gradient_threshold, time_limit, step_limit };

struct Trajectory {
  std::vector<double> times;
  std::vector<Configuration> configurations;
  std::vector<double> potential_values;  // unbiased potential along the run
  std::vector<double> gradient_norms;    // norm of the driving field
  StopReason stop_reason = StopReason::gradient_threshold;

  const Configuration& terminal() const { return configurations.back(); }
};

/// Integrates the gradient flow from p0 until the field norm drops below
/// grad_stop, t_max is reached, or max_steps accepted steps were taken.
/// Throws `collision_detected` when adjacent agents approach within the
/// collision threshold (the exact flow cannot collide; this flags integrator
/// failure) and `step_underflow` when adaptive steps collapse.
Trajectory integrate(const FormationSystem& sys, const Configuration& p0,
                     const IntegratorSettings& settings = {});

/// Flow-then-polish equilibrium finder: gradient flow down to grad_stop, then
/// Newton on the gradient restricted to the orthogonal complement of the
/// orbit tangent space, to gradient norm <= newton_tol. Throws
/// `newton_stalled` when polishing fails to converge.
Configuration find_equilibrium(const FormationSystem& sys, const Configuration& p0,
                               const IntegratorSettings& settings = {},
                               double newton_tol = 1e-12);

enum class TerminalClass {
  target_orbit,
  line_equilibrium,
  other_equilibrium,
  max_steps_reached
};

const char* to_string(TerminalClass cls) noexcept;

struct SimOutcome {
  Configuration terminal;
  std::optional<int> orbit_index;  // index into enumerate_target_orbits order
  TerminalClass cls = TerminalClass::max_steps_reached;
};

/// Labels a terminal configuration: a target orbit when every edge sits at
/// its target distance (matched to the enumerated orbit list by congruence),
/// otherwise a line or other equilibrium.
SimOutcome classify_outcome(const FormationSystem& sys,
                            const std::vector<Configuration>& target_orbits,
                            const Configuration& terminal,
                            bool converged,
                            double align_tol = kDefaultAlignTol);

/// Uniform sample in the centered box, resampled until no adjacent pair is
/// closer than 1e-3 * box. The generator is consumed deterministically.
Configuration sample_admissible_configuration(const FormationSystem& sys,
                                              std::mt19937_64& rng, double box);

/// Generator for trial `index` derived from a master seed; used by the Monte
/// Carlo driver and reusable for reproducible sampling elsewhere.
std::mt19937_64 trial_generator(std::uint64_t master_seed, std::uint64_t index);

struct MonteCarloStats {
  long trials = 0;
  std::uint64_t seed = 0;
  double box = 0.0;
  std::vector<long> per_orbit;              // counts per target-orbit index
  std::map<TerminalClass, long> per_class;  // counts per terminal class

  long class_count(TerminalClass c) const {
    auto it = per_class.find(c);
    return it == per_class.end() ? 0 : it->second;
  }
};

/// Seeded basin study: initial conditions are sampled uniformly in the
/// centered box (resampling whole configurations while any adjacent pair is
/// closer than 1e-3 * box), each trial runs find_equilibrium and is tallied.
/// Per-trial generators are derived from the master seed by trial index, so
/// results are reproducible for any thread count (threads <= 0 uses the
/// hardware concurrency).
MonteCarloStats monte_carlo(const FormationSystem& sys, long trials,
                            std::uint64_t seed, double box,
                            const IntegratorSettings& settings = {},
                            int threads = 1);

}  // namespace formation
