#pragma once

#include <stdexcept>
#include <string>

namespace formation {

/// Stable machine-readable error codes. The string form of each code is part
/// of the CLI's error-JSON contract and must not change between releases.
enum class errc {
  invalid_argument,
  anchor_not_edge,
  duplicate_vertex,
  bad_vertex_label,
  wrong_step_count,
  too_large,
  not_subgraph,
  not_triangulated_laman,
  dimension_mismatch,
  degenerate_rotation,
  nonpositive_target,
  triangle_inequality_violated,
  c1_violated,
  c2_suspect,
  collision_on_edge,
  newton_diverged,
  part_index_out_of_range,
  not_symmetric,
  sub_equilibrium_violated,
  ill_conditioned_w,
  not_line_configuration,
  precondition_not_aligned,
  precondition_not_equilibrated_vertex,
  gain_undefined,
  not_an_equilibrium,
  inconsistent_with_theory,
  newton_stalled,
  collision_detected,
  step_underflow,
  io_error,
};

const char* to_string(errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace formation
