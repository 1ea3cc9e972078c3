#include "formation/errors.hpp"

namespace formation {

const char* to_string(errc code) noexcept {
  switch (code) {
    case errc::invalid_argument: return "invalid_argument";
    case errc::anchor_not_edge: return "anchor_not_edge";
    case errc::duplicate_vertex: return "duplicate_vertex";
    case errc::bad_vertex_label: return "bad_vertex_label";
    case errc::wrong_step_count: return "wrong_step_count";
    case errc::too_large: return "too_large";
    case errc::not_subgraph: return "not_subgraph";
    case errc::not_triangulated_laman: return "not_triangulated_laman";
    case errc::dimension_mismatch: return "dimension_mismatch";
    case errc::degenerate_rotation: return "degenerate_rotation";
    case errc::nonpositive_target: return "nonpositive_target";
    case errc::triangle_inequality_violated: return "triangle_inequality_violated";
    case errc::c1_violated: return "c1_violated";
    case errc::c2_suspect: return "c2_suspect";
    case errc::collision_on_edge: return "collision_on_edge";
    case errc::newton_diverged: return "newton_diverged";
    case errc::part_index_out_of_range: return "part_index_out_of_range";
    case errc::not_symmetric: return "not_symmetric";
    case errc::sub_equilibrium_violated: return "sub_equilibrium_violated";
    case errc::ill_conditioned_w: return "ill_conditioned_w";
    case errc::not_line_configuration: return "not_line_configuration";
    case errc::precondition_not_aligned: return "precondition_not_aligned";
    case errc::precondition_not_equilibrated_vertex: return "precondition_not_equilibrated_vertex";
    case errc::gain_undefined: return "gain_undefined";
    case errc::not_an_equilibrium: return "not_an_equilibrium";
    case errc::inconsistent_with_theory: return "inconsistent_with_theory";
    case errc::newton_stalled: return "newton_stalled";
    case errc::collision_detected: return "collision_detected";
    case errc::step_underflow: return "step_underflow";
    case errc::io_error: return "io_error";
  }
  return "unknown";
}

}  // namespace formation
