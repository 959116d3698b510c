#include "ddimdp/error.hpp"

namespace ddimdp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::singular_transform: return "singular transform";
    case ErrorKind::unbounded_polytope: return "unbounded polytope";
    case ErrorKind::dimension_mismatch: return "dimension mismatch";
    case ErrorKind::singular_dynamics: return "singular dynamics";
    case ErrorKind::input_constraint_violated: return "input constraint violated";
    case ErrorKind::action_not_applicable: return "action not applicable at x";
    case ErrorKind::invalid_scenario_parameters: return "invalid scenario parameters";
    case ErrorKind::no_samples: return "no samples";
    case ErrorKind::degenerate_domain: return "degenerate domain";
    case ErrorKind::not_a_cover: return "not a cover";
    case ErrorKind::misaligned_region: return "misaligned region";
    case ErrorKind::interval_row_infeasible: return "interval row infeasible";
    case ErrorKind::uncontrolled_state: return "uncontrolled state";
    case ErrorKind::invalid_config: return "invalid config";
    case ErrorKind::io: return "i/o error";
  }
  return "error";
}

}  // namespace ddimdp
