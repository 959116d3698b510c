#pragma once

#include <stdexcept>
#include <string>

namespace ddimdp {

enum class ErrorKind {
  singular_transform,
  unbounded_polytope,
  dimension_mismatch,
  singular_dynamics,
  input_constraint_violated,
  action_not_applicable,
  invalid_scenario_parameters,
  no_samples,
  degenerate_domain,
  not_a_cover,
  misaligned_region,
  interval_row_infeasible,
  uncontrolled_state,
  invalid_config,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ddimdp
