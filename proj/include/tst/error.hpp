#pragma once

#include <stdexcept>
#include <string>

namespace tst {

enum class ErrorKind {
  invalid_dyad,
  dimension,
  invalid_design,
  budget_exhausted,
  empty_space,
  regime_not_found,
  disconnected_states,
  no_interior,
  absorbing_state,
  malformed_trajectory,
  empty_input,
  config,
  io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tst
