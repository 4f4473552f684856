#pragma once

#include <stdexcept>
#include <string>

namespace popdyn {

/// Distinct failure codes surfaced by the library. Codes in the
/// `validation` category indicate bad inputs; `numerical` codes indicate
/// a computation that could not be completed.
enum class ErrorCode {
  // input validation
  too_few_strategies,
  index_out_of_range,
  self_loop,
  disconnected_graph,
  length_mismatch,
  antisymmetry_violation,
  invalid_simplex_point,
  boundary_state,
  not_potential_game,
  unsupported_operation,
  potential_gradient_mismatch,
  step_too_large,
  trajectory_too_short,
  config_error,
  // numerical failures
  step_size_underflow,
  invariant_violation,
  non_convergence,
  degenerate_metric,
  nonsmooth_state,
  evaluation_error,
};

inline bool is_validation_error(ErrorCode c) {
  return c < ErrorCode::step_size_underflow;
}

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace popdyn
